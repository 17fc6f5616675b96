// nbprior: learn naive Bayes prior pseudo-counts by leave-one-out search and
// rank a corpus with them.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 internal error.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nbprior/corpus.hpp"
#include "nbprior/error.hpp"
#include "nbprior/experiment.hpp"
#include "nbprior/metrics.hpp"
#include "nbprior/prior_search.hpp"
#include "nbprior/stats.hpp"
#include "nbprior/synthetic.hpp"
#include "nbprior/text.hpp"

namespace fs = std::filesystem;
using namespace nbprior;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct RunConfig {
  std::string corpus;
  std::string category;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<std::string> starts;
  std::size_t top_n = 1000;
  std::size_t eval_k = 250;
  double lambda_neg = 1.0;
  double lambda_pos = 1.0;
  std::size_t bootstrap_b = stats::kDefaultResamples;
  double alpha = 0.05;
  std::uint64_t bootstrap_seed = 0;
  unsigned workers = 1;
  std::string out;

  // ingest / generate
  std::string dump;
  std::size_t min_bytes = 300;
  std::size_t shards = 0;

  // evaluate / report
  std::string predictions;
  std::string truth;
  std::string baseline;
  std::string study;
  std::string link_template = experiment::ReviewOptions{}.link_template;

  synthetic::Config synth;
};

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  body(out);
  if (!out) throw Error("error writing " + path.string());
}

std::vector<search::Cell> parse_starts(const std::vector<std::string>& specs) {
  if (specs.empty()) return search::default_starts();
  std::vector<search::Cell> cells;
  for (const auto& s : specs) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) throw Error("start '" + s + "' must be lambda_neg:lambda_pos");
    cells.push_back(search::cell_of(parse_double(parts[0]), parse_double(parts[1])));
  }
  return cells;
}

experiment::ExperimentSpec make_spec(const RunConfig& cfg) {
  experiment::ExperimentSpec spec;
  spec.category = cfg.category;
  spec.seeds = cfg.seeds;
  spec.starts = parse_starts(cfg.starts);
  spec.top_n = cfg.top_n;
  spec.workers = cfg.workers;
  return spec;
}

std::pair<corpus::Corpus, corpus::CategoryIndex> open_corpus(const RunConfig& cfg) {
  if (!fs::exists(cfg.corpus)) throw Error("corpus directory '" + cfg.corpus + "' does not exist");
  return corpus::load_corpus(cfg.corpus);
}

metrics::IdSet read_truth(const std::string& path) {
  const auto ids = experiment::read_id_list(path);
  return metrics::IdSet(ids.begin(), ids.end());
}

void write_memos(const fs::path& out, const experiment::LearnedPriors& learned) {
  for (const auto& s : learned.seeds)
    write_file(out / ("memo_seed" + std::to_string(s.training.seed) + ".csv"),
               [&](std::ostream& o) { search::write_memo_csv(o, s.search.memo); });
  write_file(out / "means.csv",
             [&](std::ostream& o) { search::write_means_csv(o, learned.aggregate); });
  write_file(out / "search_log.txt", [&](std::ostream& o) {
    for (const auto& s : learned.seeds) {
      o << "seed " << s.training.seed << '\n';
      search::write_search_log(o, s.search.runs);
    }
  });
  write_file(out / "learned.txt", [&](std::ostream& o) {
    o << "lambda_neg " << format_double(learned.hp.lambda_neg) << "\nlambda_pos "
      << format_double(learned.hp.lambda_pos) << "\nmean_ppv "
      << format_double(learned.aggregate.mean_ppv) << "\nmean_sensitivity "
      << format_double(learned.aggregate.mean_sensitivity) << '\n';
  });
}

// --- commands -------------------------------------------------------------------

void cmd_ingest(const RunConfig& cfg) {
  std::ifstream in(cfg.dump, std::ios::binary);
  if (!in) throw Error("cannot open dump '" + cfg.dump + "'");
  corpus::IngestOptions options;
  options.min_bytes = cfg.min_bytes;
  options.shard_count = cfg.shards == 0 ? corpus::Corpus::kDefaultShards : cfg.shards;
  const auto result = corpus::ingest_wiki_dump(in, options);
  corpus::store_corpus(result.corpus, result.categories, cfg.out);
  const auto& s = result.stats;
  std::cout << "pages " << s.pages << " kept " << s.kept << " skipped_namespace "
            << s.skipped_namespace << " skipped_redirect " << s.skipped_redirect
            << " skipped_disambiguation " << s.skipped_disambiguation << " skipped_short "
            << s.skipped_short << " categories " << result.categories.size() << '\n';
}

void cmd_generate(const RunConfig& cfg) {
  auto synth = cfg.synth;
  synth.shard_count = cfg.shards == 0 ? 1 : cfg.shards;
  const auto generated = synthetic::generate(synth);
  corpus::store_corpus(generated.corpus, generated.categories, cfg.out);
  write_file(fs::path(cfg.out) / "truth.txt",
             [&](std::ostream& o) { experiment::write_id_list(o, generated.hidden_positives); });
  std::cout << "documents " << generated.corpus.doc_count() << " members "
            << generated.categories.members(synth.category).size() << " hidden "
            << generated.hidden_positives.size() << '\n';
}

void cmd_search(const RunConfig& cfg) {
  const auto [corpus, categories] = open_corpus(cfg);
  const auto learned = experiment::learn_priors(corpus, categories, make_spec(cfg));
  write_memos(cfg.out, learned);
  std::cout << "lambda_neg " << format_double(learned.hp.lambda_neg) << " lambda_pos "
            << format_double(learned.hp.lambda_pos) << " mean_ppv "
            << format_double(learned.aggregate.mean_ppv) << '\n';
}

void cmd_classify(const RunConfig& cfg) {
  const auto [corpus, categories] = open_corpus(cfg);
  const auto spec = make_spec(cfg);
  spec.validate(categories);
  const model::Hyperparameters hp{cfg.lambda_neg, cfg.lambda_pos};
  hp.validate();
  const auto training =
      experiment::make_training_set(corpus, categories, spec.category, spec.reporting_seed());
  const auto model = experiment::build_model(corpus, training);
  const auto ranked = experiment::rank_corpus(corpus, model, hp, training.positives, cfg.workers);
  const fs::path out(cfg.out);
  write_file(out / "predictions.csv", [&](std::ostream& o) {
    experiment::write_predictions_csv(o, ranked, experiment::corpus_titles(corpus));
  });
  write_file(out / "model.tsv", [&](std::ostream& o) { model.write_manifest(o); });
  std::cout << "ranked " << ranked.size() << " positives_predicted "
            << ranked.positives_predicted() << '\n';
}

void cmd_evaluate(const RunConfig& cfg) {
  const auto file = experiment::read_predictions_csv(cfg.predictions);
  const auto truth = read_truth(cfg.truth);
  const auto k = std::min(cfg.eval_k, file.ranked.size());
  const auto profile = metrics::ppv_profile(file.ranked, truth, k);
  const fs::path out(cfg.out);
  write_file(out / "profile.csv", [&](std::ostream& o) { metrics::write_profile_csv(o, profile); });
  const auto hits = profile.empty() ? 0 : profile.back().hits;
  const double ppv = profile.empty() ? 0.0 : profile.back().ppv;
  write_file(out / "evaluation.csv", [&](std::ostream& o) {
    o << "k,hits,ppv,positives_predicted\n"
      << k << ',' << hits << ',' << format_double(ppv) << ','
      << file.ranked.positives_predicted() << '\n';
  });
  std::cout << "ppv@" << k << ' ' << format_double(ppv) << " (" << hits << '/' << k << ")\n";
}

void cmd_report(const RunConfig& cfg) {
  const auto base = experiment::read_predictions_csv(cfg.baseline);
  const auto study = experiment::read_predictions_csv(cfg.study);
  const auto truth = read_truth(cfg.truth);
  const auto k = std::min({cfg.eval_k, base.ranked.size(), study.ranked.size()});
  const auto vb = stats::outcome_vector(base.ranked, truth, k);
  const auto vs = stats::outcome_vector(study.ranked, truth, k);
  const auto test = stats::significance_test(vb, vs);
  std::vector<stats::ReportRow> rows{
      {"baseline", k, stats::mean(vb), stats::bootstrap_ci(vb, cfg.bootstrap_b, cfg.alpha, cfg.bootstrap_seed), test.p_value},
      {"study", k, stats::mean(vs), stats::bootstrap_ci(vs, cfg.bootstrap_b, cfg.alpha, cfg.bootstrap_seed), test.p_value}};
  const fs::path out(cfg.out);
  write_file(out / "stats.csv", [&](std::ostream& o) { stats::write_report_csv(o, rows); });

  auto titles = [&](DocId id) {
    if (auto it = base.titles.find(id); it != base.titles.end()) return it->second;
    return study.titles.at(id);
  };
  experiment::ReviewOptions options;
  options.link_template = cfg.link_template;
  write_file(out / "review.html", [&](std::ostream& o) {
    o << experiment::export_review_list(base.ranked, study.ranked, cfg.top_n, titles, options);
  });
  std::cout << "baseline ppv@" << k << ' ' << format_double(rows[0].ppv) << " study ppv@" << k
            << ' ' << format_double(rows[1].ppv) << " p " << format_double(test.p_value) << '\n';
}

void cmd_experiment(const RunConfig& cfg) {
  const auto [corpus, categories] = open_corpus(cfg);
  const auto spec = make_spec(cfg);
  const auto baseline = experiment::run_baseline(corpus, categories, spec);
  const auto study = experiment::run_study(corpus, categories, spec);
  const fs::path out(cfg.out);
  const auto titles = experiment::corpus_titles(corpus);
  write_memos(out, study.learned);
  write_file(out / "baseline_predictions.csv", [&](std::ostream& o) {
    experiment::write_predictions_csv(o, baseline.ranked, titles);
  });
  write_file(out / "study_predictions.csv", [&](std::ostream& o) {
    experiment::write_predictions_csv(o, study.branch.ranked, titles);
  });
  experiment::ReviewOptions options;
  options.link_template = cfg.link_template;
  write_file(out / "review.html", [&](std::ostream& o) {
    o << experiment::export_review_list(baseline.ranked, study.branch.ranked, spec.top_n, titles,
                                        options);
  });
  experiment::RunManifest manifest{spec.category,
                                   spec.seeds,
                                   spec.starts,
                                   study.learned.hp,
                                   baseline.ranked.positives_predicted(),
                                   study.branch.ranked.positives_predicted(),
                                   spec.top_n};
  write_file(out / "manifest.json",
             [&](std::ostream& o) { experiment::write_run_manifest(o, manifest); });
  std::cout << "lambda_neg " << format_double(study.learned.hp.lambda_neg) << " lambda_pos "
            << format_double(study.learned.hp.lambda_pos) << " positives_predicted baseline "
            << manifest.baseline_positives_predicted << " study "
            << manifest.study_positives_predicted << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn naive Bayes prior pseudo-counts by leave-one-out grid search", "nbprior"};
  app.require_subcommand(0, 1);
  RunConfig cfg;

  auto corpus_opts = [&](CLI::App* cmd) {
    cmd->add_option("--corpus", cfg.corpus, "Corpus directory")->required();
    cmd->add_option("--category", cfg.category, "Target category")->required();
    cmd->add_option("--seeds", cfg.seeds, "Negative-sampling seeds; the first is reported")
        ->delimiter(',');
    cmd->add_option("--starts", cfg.starts, "Search starts as lambda_neg:lambda_pos")
        ->delimiter(',');
    cmd->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* ingest = app.add_subcommand("ingest", "Build a corpus store from a MediaWiki XML dump");
  ingest->add_option("--dump", cfg.dump, "Pages XML export")->required();
  ingest->add_option("--min-bytes", cfg.min_bytes, "Minimum retained body size");
  ingest->add_option("--shards", cfg.shards, "Shard count (default 1000)");
  ingest->add_option("--out", cfg.out, "Output corpus directory")->required();

  auto* generate = app.add_subcommand("generate", "Write a synthetic labelled corpus");
  generate->add_option("--seed", cfg.synth.seed, "Generator seed");
  generate->add_option("--vocab", cfg.synth.vocab, "Vocabulary size");
  generate->add_option("--members", cfg.synth.members, "Labelled category members");
  generate->add_option("--pool", cfg.synth.pool, "Unlabelled documents");
  generate->add_option("--hidden-fraction", cfg.synth.hidden_fraction, "Share of hidden positives");
  generate->add_option("--category", cfg.synth.category, "Category name");
  generate->add_option("--shards", cfg.shards, "Shard count (default 1)");
  generate->add_option("--out", cfg.out, "Output corpus directory")->required();

  auto* search = app.add_subcommand("search", "Learn priors; write memo dumps and search log");
  corpus_opts(search);
  search->add_option("--out", cfg.out, "Output directory")->required();

  auto* classify = app.add_subcommand("classify", "Rank the corpus under given priors");
  corpus_opts(classify);
  classify->add_option("--lambda-neg", cfg.lambda_neg, "Negative pseudo-count")->check(CLI::PositiveNumber);
  classify->add_option("--lambda-pos", cfg.lambda_pos, "Positive pseudo-count")->check(CLI::PositiveNumber);
  classify->add_option("--out", cfg.out, "Output directory")->required();

  auto* evaluate = app.add_subcommand("evaluate", "PPV@k and cumulative PPV profile");
  evaluate->add_option("--predictions", cfg.predictions, "Predictions CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--truth", cfg.truth, "Truth id list")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--eval-k", cfg.eval_k, "Cut-off rank")->check(CLI::PositiveNumber);
  evaluate->add_option("--out", cfg.out, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Bootstrap CIs, t-test and blinded review list");
  report->add_option("--baseline", cfg.baseline, "Baseline predictions CSV")->required()->check(CLI::ExistingFile);
  report->add_option("--study", cfg.study, "Study predictions CSV")->required()->check(CLI::ExistingFile);
  report->add_option("--truth", cfg.truth, "Truth id list")->required()->check(CLI::ExistingFile);
  report->add_option("--eval-k", cfg.eval_k, "Cut-off rank")->check(CLI::PositiveNumber);
  report->add_option("--top-n", cfg.top_n, "Titles per model in the review list")->check(CLI::PositiveNumber);
  report->add_option("--bootstrap-b", cfg.bootstrap_b, "Bootstrap resamples")->check(CLI::PositiveNumber);
  report->add_option("--alpha", cfg.alpha, "Two-sided tail mass")->check(CLI::Range(0.0, 1.0));
  report->add_option("--bootstrap-seed", cfg.bootstrap_seed, "Bootstrap PRNG seed");
  report->add_option("--link-template", cfg.link_template, "Review link; {title} is substituted");
  report->add_option("--out", cfg.out, "Output directory")->required();

  auto* exp = app.add_subcommand("experiment", "Baseline and study branches end to end");
  corpus_opts(exp);
  exp->add_option("--top-n", cfg.top_n, "Titles per model in the review list")->check(CLI::PositiveNumber);
  exp->add_option("--link-template", cfg.link_template, "Review link; {title} is substituted");
  exp->add_option("--out", cfg.out, "Output directory")->required();

  if (argc <= 1) {
    std::cout << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest) cmd_ingest(cfg);
    else if (*generate) cmd_generate(cfg);
    else if (*search) cmd_search(cfg);
    else if (*classify) cmd_classify(cfg);
    else if (*evaluate) cmd_evaluate(cfg);
    else if (*report) cmd_report(cfg);
    else if (*exp) cmd_experiment(cfg);
    else {
      std::cout << app.help();
      return kExitUsage;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
