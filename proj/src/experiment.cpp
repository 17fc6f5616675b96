#include "nbprior/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <thread>

#include "json.hpp"
#include "nbprior/error.hpp"
#include "nbprior/random.hpp"
#include "nbprior/text.hpp"

namespace nbprior::experiment {

namespace {

std::vector<const corpus::Document*> lookup(const Corpus& corpus, std::span<const DocId> ids) {
  std::vector<const corpus::Document*> docs;
  docs.reserve(ids.size());
  for (DocId id : ids) docs.push_back(&corpus.at(id));
  return docs;
}

std::string link_for(const std::string& tmpl, const std::string& title) {
  std::string page = title;
  std::replace(page.begin(), page.end(), ' ', '_');
  page = percent_encode(page);
  std::string out = tmpl;
  const std::string key = "{title}";
  for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + page.size()))
    out.replace(pos, key.size(), page);
  return out;
}

}  // namespace

std::vector<DocId> sample_negatives(const Corpus& corpus, const CategoryIndex& categories,
                                    std::string_view category, std::size_t k, std::uint64_t seed) {
  const auto& members = categories.members(category);
  std::vector<DocId> pool;
  for (DocId id : corpus.ids())
    if (!std::binary_search(members.begin(), members.end(), id)) pool.push_back(id);
  if (pool.size() < k)
    throw Error("category '" + std::string(category) + "' leaves only " +
                std::to_string(pool.size()) + " non-members, " + std::to_string(k) + " needed");
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + std::size_t(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

TrainingSet make_training_set(const Corpus& corpus, const CategoryIndex& categories,
                              std::string_view category, std::uint64_t seed) {
  TrainingSet t;
  t.positives = categories.members(category);
  if (t.positives.empty()) throw Error("category '" + std::string(category) + "' has no members");
  t.negatives = sample_negatives(corpus, categories, category, t.positives.size(), seed);
  t.seed = seed;
  return t;
}

model::CountModel build_model(const Corpus& corpus, const TrainingSet& training) {
  const auto pos = lookup(corpus, training.positives);
  const auto neg = lookup(corpus, training.negatives);
  return model::build_counts(pos, neg);
}

RankedPredictions rank_corpus(const Corpus& corpus, const model::CountModel& model,
                              const model::Hyperparameters& hp, std::span<const DocId> exclude,
                              unsigned workers) {
  const model::Scorer scorer(model, hp);
  const std::size_t shards = corpus.shard_count();
  std::vector<std::vector<Prediction>> parts(shards);
  auto run_shard = [&](std::size_t s) {
    for (const auto& doc : corpus.shard(s)) {
      if (std::binary_search(exclude.begin(), exclude.end(), doc.id)) continue;
      const auto post = scorer(doc.tokens);
      parts[s].push_back({doc.id, post.p_pos, post.log_odds});
    }
  };
  if (workers <= 1) {
    for (std::size_t s = 0; s < shards; ++s) run_shard(s);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < shards; s += workers) run_shard(s);
      });
  }
  std::vector<Prediction> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return RankedPredictions(std::move(all));
}

void ExperimentSpec::validate(const CategoryIndex& categories) const {
  if (!categories.contains(category)) throw Error("unknown category '" + category + "'");
  if (seeds.empty()) throw Error("at least one seed is required");
  if (starts.empty()) throw Error("at least one search start is required");
  if (top_n == 0) throw Error("top-n must be at least 1");
}

LearnedPriors learn_priors(const Corpus& corpus, const CategoryIndex& categories,
                           const ExperimentSpec& spec) {
  spec.validate(categories);
  LearnedPriors out;
  std::vector<model::CountModel> models;
  models.reserve(spec.seeds.size());
  std::vector<search::Evaluator> evaluators;
  std::vector<search::MemoTable> memos;
  for (auto seed : spec.seeds) {
    auto training = make_training_set(corpus, categories, spec.category, seed);
    models.push_back(build_model(corpus, training));
    evaluators.push_back(search::make_evaluator(models.back()));
    auto result = search::multi_start_search(spec.starts, evaluators.back(), spec.workers);
    out.seeds.push_back({std::move(training), std::move(result)});
  }
  for (auto& s : out.seeds) memos.push_back(s.search.memo);
  out.aggregate = search::aggregate_over_seeds(memos, evaluators);
  for (std::size_t i = 0; i < memos.size(); ++i) out.seeds[i].search.memo = std::move(memos[i]);
  out.cell = out.aggregate.best;
  out.hp = search::to_hyperparameters(out.cell);
  return out;
}

BranchResult run_baseline(const Corpus& corpus, const CategoryIndex& categories,
                          const ExperimentSpec& spec) {
  spec.validate(categories);
  BranchResult out;
  out.training = make_training_set(corpus, categories, spec.category, spec.reporting_seed());
  out.hp = search::to_hyperparameters(search::kBayesLaplace);
  const auto model = build_model(corpus, out.training);
  out.ranked = rank_corpus(corpus, model, out.hp, out.training.positives, spec.workers);
  return out;
}

StudyResult run_study(const Corpus& corpus, const CategoryIndex& categories,
                      const ExperimentSpec& spec) {
  StudyResult out;
  out.learned = learn_priors(corpus, categories, spec);
  out.branch.training = out.learned.seeds.front().training;
  out.branch.hp = out.learned.hp;
  const auto model = build_model(corpus, out.branch.training);
  out.branch.ranked = rank_corpus(corpus, model, out.branch.hp, out.branch.training.positives,
                                  spec.workers);
  return out;
}

TitleLookup corpus_titles(const Corpus& corpus) {
  return [&corpus](DocId id) { return corpus.at(id).title; };
}

std::string export_review_list(const RankedPredictions& a, const RankedPredictions& b,
                               std::size_t top_n, const TitleLookup& titles,
                               const ReviewOptions& options) {
  std::set<std::string> merged;
  for (const auto* list : {&a, &b})
    for (std::size_t i = 0; i < std::min(top_n, list->size()); ++i)
      merged.insert(titles((*list)[i].id));

  std::string html =
      "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Articles for "
      "review</title>\n</head>\n<body>\n<ul>\n";
  for (const auto& title : merged)
    html += "<li><a href=\"" + html_escape(link_for(options.link_template, title)) + "\">" +
            html_escape(title) + "</a></li>\n";
  html += "</ul>\n</body>\n</html>\n";
  return html;
}

void write_predictions_csv(std::ostream& out, const RankedPredictions& ranked,
                           const TitleLookup& titles) {
  out << "rank,doc_id,title,log_odds,p_pos\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& p = ranked[i];
    out << (i + 1) << ',' << p.id << ',' << csv_field(titles(p.id)) << ','
        << format_double(p.log_odds) << ',' << format_double(p.p_pos) << '\n';
  }
}

PredictionsFile read_predictions_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "rank,doc_id,title,log_odds,p_pos")
    throw Error("predictions file lacks the expected header");
  PredictionsFile file;
  std::vector<Prediction> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = parse_csv_line(line);
    if (fields.size() != 5)
      throw Error("predictions line " + std::to_string(line_no) + ": expected 5 fields");
    if (parse_uint(fields[0]) != entries.size() + 1)
      throw Error("predictions line " + std::to_string(line_no) + ": ranks out of sequence");
    Prediction p{parse_uint(fields[1]), parse_double(fields[4]), parse_double(fields[3])};
    file.titles[p.id] = fields[2];
    entries.push_back(p);
  }
  file.ranked = RankedPredictions(entries);
  if (file.ranked.entries() != entries) throw Error("predictions are not in ranked order");
  return file;
}

PredictionsFile read_predictions_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open predictions file " + path.string());
  return read_predictions_csv(in);
}

std::vector<DocId> read_id_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open id list " + path.string());
  std::vector<DocId> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ids.push_back(parse_uint(line));
  }
  return ids;
}

void write_id_list(std::ostream& out, std::span<const DocId> ids) {
  for (DocId id : ids) out << id << '\n';
}

void write_run_manifest(std::ostream& out, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["category"] = m.category;
  j["seeds"] = m.seeds;
  auto starts = nlohmann::ordered_json::array();
  for (const auto& c : m.starts)
    starts.push_back({search::grid()[c.x], search::grid()[c.y]});
  j["starts"] = starts;
  j["learned"] = {{"lambda_neg", m.learned.lambda_neg}, {"lambda_pos", m.learned.lambda_pos}};
  j["positives_predicted"] = {{"baseline", m.baseline_positives_predicted},
                              {"study", m.study_positives_predicted}};
  j["top_n"] = m.top_n;
  j["sampler"] = kSamplerName;
  out << j.dump(2) << '\n';
}

}  // namespace nbprior::experiment
