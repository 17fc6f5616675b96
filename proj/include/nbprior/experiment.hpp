#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nbprior/corpus.hpp"
#include "nbprior/nb_model.hpp"
#include "nbprior/prior_search.hpp"
#include "nbprior/ranking.hpp"

namespace nbprior::experiment {

using corpus::CategoryIndex;
using corpus::Corpus;

/// Name of the sampling procedure recorded in run manifests.
inline constexpr std::string_view kSamplerName =
    "mt19937_64(seed); partial Fisher-Yates over ascending non-member ids; "
    "bounded draws by rejection of r < (2^64 - n) mod n, then r mod n";

struct TrainingSet {
  std::vector<DocId> positives;  // ascending
  std::vector<DocId> negatives;  // ascending
  std::uint64_t seed = 0;
};

/// k ids drawn uniformly without replacement from the ascending list of
/// corpus documents outside `category`. Returned ascending. Throws when fewer
/// than k non-members exist.
std::vector<DocId> sample_negatives(const Corpus& corpus, const CategoryIndex& categories,
                                    std::string_view category, std::size_t k, std::uint64_t seed);

/// All direct members as positives plus as many seeded negatives.
TrainingSet make_training_set(const Corpus& corpus, const CategoryIndex& categories,
                              std::string_view category, std::uint64_t seed);

model::CountModel build_model(const Corpus& corpus, const TrainingSet& training);

/// Scores every document not in `exclude` (ascending ids), one shard per task.
RankedPredictions rank_corpus(const Corpus& corpus, const model::CountModel& model,
                              const model::Hyperparameters& hp, std::span<const DocId> exclude,
                              unsigned workers = 1);

struct ExperimentSpec {
  std::string category;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<search::Cell> starts = search::default_starts();
  std::size_t top_n = 1000;
  unsigned workers = 1;

  /// Predictions are reported under the first seed's training set.
  std::uint64_t reporting_seed() const { return seeds.front(); }
  void validate(const CategoryIndex& categories) const;
};

struct BranchResult {
  TrainingSet training;
  model::Hyperparameters hp;
  RankedPredictions ranked;
};

struct SeedSearch {
  TrainingSet training;
  search::MultiStartResult search;
};

struct LearnedPriors {
  std::vector<SeedSearch> seeds;
  search::Aggregate aggregate;
  search::Cell cell;
  model::Hyperparameters hp;
};

/// Multi-start search per seed, then cross-seed averaging.
LearnedPriors learn_priors(const Corpus& corpus, const CategoryIndex& categories,
                           const ExperimentSpec& spec);

/// Bayes-Laplace priors (1, 1) under the reporting seed's training set.
BranchResult run_baseline(const Corpus& corpus, const CategoryIndex& categories,
                          const ExperimentSpec& spec);

struct StudyResult {
  LearnedPriors learned;
  BranchResult branch;
};

StudyResult run_study(const Corpus& corpus, const CategoryIndex& categories,
                      const ExperimentSpec& spec);

using TitleLookup = std::function<std::string(DocId)>;

TitleLookup corpus_titles(const Corpus& corpus);

struct ReviewOptions {
  /// "{title}" is replaced by the title with spaces as underscores, percent-encoded.
  std::string link_template = "https://en.wikipedia.org/wiki/{title}";
};

/// HTML list of links to the union of both top-n title sets, deduplicated and
/// sorted, with nothing that tells which list a title came from.
std::string export_review_list(const RankedPredictions& a, const RankedPredictions& b,
                               std::size_t top_n, const TitleLookup& titles,
                               const ReviewOptions& options = {});

/// CSV "rank,doc_id,title,log_odds,p_pos".
void write_predictions_csv(std::ostream& out, const RankedPredictions& ranked,
                           const TitleLookup& titles);

struct PredictionsFile {
  RankedPredictions ranked;
  std::unordered_map<DocId, std::string> titles;
};
PredictionsFile read_predictions_csv(std::istream& in);
PredictionsFile read_predictions_csv(const std::filesystem::path& path);

/// One id per line; blank lines ignored.
std::vector<DocId> read_id_list(const std::filesystem::path& path);
void write_id_list(std::ostream& out, std::span<const DocId> ids);

struct RunManifest {
  std::string category;
  std::vector<std::uint64_t> seeds;
  std::vector<search::Cell> starts;
  model::Hyperparameters learned;
  std::size_t baseline_positives_predicted = 0;
  std::size_t study_positives_predicted = 0;
  std::size_t top_n = 0;
};

/// JSON document; also names the sampling procedure.
void write_run_manifest(std::ostream& out, const RunManifest& manifest);

}  // namespace nbprior::experiment
