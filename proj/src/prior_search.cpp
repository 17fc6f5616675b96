#include "nbprior/prior_search.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

#include "nbprior/error.hpp"
#include "nbprior/metrics.hpp"
#include "nbprior/text.hpp"

namespace nbprior::search {

namespace {

std::size_t slot(Cell c) { return std::size_t(c.x) * kGridSize + c.y; }

std::string describe(Cell c) {
  return "(" + format_double(grid()[c.x]) + ", " + format_double(grid()[c.y]) + ")";
}

void check_score(Cell c, const CellScore& s) {
  if (!(s.ppv >= 0.0 && s.ppv <= 1.0 && s.sensitivity >= 0.0 && s.sensitivity <= 1.0))
    throw Error("evaluator returned a score outside [0, 1] at cell " + describe(c));
}

bool better_pick(const CellScore& a, Cell ca, const CellScore& b, Cell cb) {
  if (beats(a, b)) return true;
  if (beats(b, a)) return false;
  return ca < cb;
}

}  // namespace

const std::array<double, kGridSize>& grid() {
  static const std::array<double, kGridSize> values = [] {
    std::array<double, kGridSize> v{};
    v[0] = 0.01;
    v[1] = 0.1;
    v[2] = 0.5;
    for (std::size_t i = 3; i < kGridSize; ++i) v[i] = double(i - 2);
    return v;
  }();
  return values;
}

std::optional<std::size_t> grid_index(double lambda) {
  const auto& g = grid();
  const auto it = std::lower_bound(g.begin(), g.end(), lambda);
  if (it == g.end() || *it != lambda) return std::nullopt;
  return std::size_t(it - g.begin());
}

bool in_bounds(int x, int y) {
  return x >= 0 && y >= 0 && x < int(kGridSize) && y < int(kGridSize);
}

model::Hyperparameters to_hyperparameters(Cell cell) {
  if (!in_bounds(cell.x, cell.y)) throw Error("cell outside the grid");
  return {grid()[cell.x], grid()[cell.y]};
}

Cell cell_of(double lambda_neg, double lambda_pos) {
  const auto x = grid_index(lambda_neg);
  const auto y = grid_index(lambda_pos);
  if (!x || !y)
    throw Error("(" + format_double(lambda_neg) + ", " + format_double(lambda_pos) +
                ") is not a point of the hyperparameter grid");
  return {std::uint16_t(*x), std::uint16_t(*y)};
}

bool beats(const CellScore& a, const CellScore& b) {
  if (a.ppv != b.ppv) return a.ppv > b.ppv;
  return a.sensitivity > b.sensitivity;
}

// --- MemoTable ----------------------------------------------------------------

MemoTable::MemoTable() : cells_(kGridSize * kGridSize) {}

std::optional<CellScore> MemoTable::find(Cell cell) const {
  if (!in_bounds(cell.x, cell.y)) return std::nullopt;
  return cells_[slot(cell)];
}

void MemoTable::insert(Cell cell, const CellScore& score) {
  if (!in_bounds(cell.x, cell.y)) throw Error("cell outside the grid");
  auto& entry = cells_[slot(cell)];
  if (entry) {
    if (!(*entry == score))
      throw Error("conflicting scores recorded for cell " + describe(cell));
    return;
  }
  entry = score;
  ++size_;
}

void MemoTable::merge(const MemoTable& other) {
  for (const auto& [cell, score] : other.entries()) insert(cell, score);
}

std::vector<std::pair<Cell, CellScore>> MemoTable::entries() const {
  std::vector<std::pair<Cell, CellScore>> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < cells_.size(); ++i)
    if (cells_[i])
      out.emplace_back(Cell{std::uint16_t(i / kGridSize), std::uint16_t(i % kGridSize)}, *cells_[i]);
  return out;
}

// --- search -------------------------------------------------------------------

SearchOutcome radial_gradient_search(Cell start, const Evaluator& evaluate, MemoTable& memo) {
  if (!in_bounds(start.x, start.y)) throw Error("search start outside the grid");
  SearchOutcome out;
  out.start = start;

  auto score_of = [&](Cell c) {
    if (auto known = memo.find(c)) return *known;
    const CellScore s = evaluate(c);
    check_score(c, s);
    ++out.evaluations;
    memo.insert(c, s);
    return s;
  };

  out.best = start;
  out.best_score = score_of(start);
  while (true) {
    bool improved = false;
    const Cell centre = out.best;
    ++out.sweeps;
    for (int i = -2; i <= 2; ++i) {
      for (int j = -2; j <= 2; ++j) {
        if (i == 0 && j == 0) continue;
        const int x = centre.x + i;
        const int y = centre.y + j;
        if (!in_bounds(x, y)) continue;
        const Cell c{std::uint16_t(x), std::uint16_t(y)};
        const CellScore s = score_of(c);
        if (beats(s, out.best_score)) {
          out.moves.push_back({out.best, c, out.best_score, s});
          out.best = c;
          out.best_score = s;
          improved = true;
        }
      }
    }
    if (!improved) return out;
  }
}

std::vector<Cell> default_starts() {
  std::vector<Cell> starts;
  for (double neg : {1.0, 8.0, 15.0})
    for (double pos : {1.0, 8.0, 15.0}) starts.push_back(cell_of(neg, pos));
  return starts;
}

MultiStartResult multi_start_search(std::span<const Cell> starts, const Evaluator& evaluate,
                                    unsigned workers) {
  if (starts.empty()) throw Error("no search starts given");
  MultiStartResult result;
  result.runs.resize(starts.size());

  if (workers <= 1) {
    for (std::size_t i = 0; i < starts.size(); ++i)
      result.runs[i] = radial_gradient_search(starts[i], evaluate, result.memo);
  } else {
    std::vector<MemoTable> memos(starts.size());
    std::vector<std::exception_ptr> errors(starts.size());
    std::size_t next = 0;
    while (next < starts.size()) {
      std::vector<std::jthread> batch;
      for (unsigned w = 0; w < workers && next < starts.size(); ++w, ++next) {
        batch.emplace_back([&, i = next] {
          try {
            result.runs[i] = radial_gradient_search(starts[i], evaluate, memos[i]);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (const auto& m : memos) result.memo.merge(m);
  }

  result.best = result.runs.front().best;
  result.best_score = result.runs.front().best_score;
  for (const auto& run : result.runs) {
    result.evaluations += run.evaluations;
    if (better_pick(run.best_score, run.best, result.best_score, result.best)) {
      result.best = run.best;
      result.best_score = run.best_score;
    }
  }
  return result;
}

CellScore evaluate_priors(Cell cell, const model::CountModel& model) {
  const auto hp = to_hyperparameters(cell);
  const auto posteriors = model::loo_scores(model, hp);
  metrics::ConfusionCounts counts;
  for (std::size_t i = 0; i < posteriors.size(); ++i)
    counts.add(model::classify(posteriors[i]) == model::Label::positive,
               model.cases()[i].label == model::Label::positive);
  return {metrics::ppv(counts), metrics::sensitivity(counts)};
}

Evaluator make_evaluator(const model::CountModel& model) {
  return [&model](Cell c) { return evaluate_priors(c, model); };
}

Aggregate aggregate_over_seeds(std::span<MemoTable> memos, std::span<const Evaluator> evaluators) {
  if (memos.empty()) throw Error("no per-seed memo tables to aggregate");
  if (memos.size() != evaluators.size())
    throw Error("need one evaluator per seed memo table");

  MemoTable seen;
  for (const auto& memo : memos)
    for (const auto& [cell, score] : memo.entries())
      if (!seen.contains(cell)) seen.insert(cell, {});
  if (seen.size() == 0) throw Error("no explored cells to aggregate");

  Aggregate agg;
  const double seeds = double(memos.size());
  for (const auto& [cell, unused] : seen.entries()) {
    double sum_ppv = 0.0, sum_sens = 0.0;
    for (std::size_t s = 0; s < memos.size(); ++s) {
      auto score = memos[s].find(cell);
      if (!score) {
        score = evaluators[s](cell);
        check_score(cell, *score);
        memos[s].insert(cell, *score);
        ++agg.backfilled;
      }
      sum_ppv += score->ppv;
      sum_sens += score->sensitivity;
    }
    agg.means.push_back({cell, sum_ppv / seeds, sum_sens / seeds});
  }

  const CellMean* best = &agg.means.front();
  for (const auto& m : agg.means)
    if (beats({m.ppv, m.sensitivity}, {best->ppv, best->sensitivity})) best = &m;
  agg.best = best->cell;
  agg.mean_ppv = best->ppv;
  agg.mean_sensitivity = best->sensitivity;
  return agg;
}

void write_memo_csv(std::ostream& out, const MemoTable& memo) {
  out << "lambda_neg,lambda_pos,ppv,sensitivity\n";
  for (const auto& [cell, s] : memo.entries())
    out << format_double(grid()[cell.x]) << ',' << format_double(grid()[cell.y]) << ','
        << format_double(s.ppv) << ',' << format_double(s.sensitivity) << '\n';
}

void write_means_csv(std::ostream& out, const Aggregate& aggregate) {
  out << "lambda_neg,lambda_pos,mean_ppv,mean_sensitivity\n";
  for (const auto& m : aggregate.means)
    out << format_double(grid()[m.cell.x]) << ',' << format_double(grid()[m.cell.y]) << ','
        << format_double(m.ppv) << ',' << format_double(m.sensitivity) << '\n';
}

void write_search_log(std::ostream& out, const std::vector<SearchOutcome>& runs) {
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    for (const auto& m : run.moves)
      out << "start " << describe(run.start) << " move " << describe(m.from) << " -> "
          << describe(m.to) << " ppv " << format_double(m.from_score.ppv) << " -> "
          << format_double(m.to_score.ppv) << " sensitivity "
          << format_double(m.from_score.sensitivity) << " -> "
          << format_double(m.to_score.sensitivity) << '\n';
    out << "start " << describe(run.start) << " done best " << describe(run.best) << " ppv "
        << format_double(run.best_score.ppv) << " sensitivity "
        << format_double(run.best_score.sensitivity) << " evaluations " << run.evaluations
        << " sweeps " << run.sweeps << '\n';
  }
}

}  // namespace nbprior::search
