#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nbprior/nb_model.hpp"

namespace nbprior::search {

inline constexpr std::size_t kGridSize = 203;

/// Candidate pseudo-counts: 0.01, 0.1, 0.5, then every integer 1..200.
/// Integer v sits at index v + 2.
const std::array<double, kGridSize>& grid();

/// Index of an exact grid value, if it is one.
std::optional<std::size_t> grid_index(double lambda);

/// A point on the 203 x 203 grid: x indexes lambda_neg, y indexes lambda_pos.
struct Cell {
  std::uint16_t x = 0;
  std::uint16_t y = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline constexpr Cell kBayesLaplace{3, 3};
inline constexpr Cell kJeffreys{2, 2};

bool in_bounds(int x, int y);
model::Hyperparameters to_hyperparameters(Cell cell);
/// Throws nbprior::Error when either value is not on the grid.
Cell cell_of(double lambda_neg, double lambda_pos);

struct CellScore {
  double ppv = 0.0;
  double sensitivity = 0.0;

  friend bool operator==(const CellScore&, const CellScore&) = default;
};

/// Lexicographic (ppv, sensitivity) comparison: true iff a strictly beats b.
bool beats(const CellScore& a, const CellScore& b);

/// Scores of every cell evaluated so far. Each cell is written once; writing
/// a different score for a known cell throws.
class MemoTable {
 public:
  MemoTable();

  std::optional<CellScore> find(Cell cell) const;
  bool contains(Cell cell) const { return find(cell).has_value(); }
  void insert(Cell cell, const CellScore& score);
  void merge(const MemoTable& other);
  std::size_t size() const noexcept { return size_; }

  /// All entries ordered by (x, y).
  std::vector<std::pair<Cell, CellScore>> entries() const;

  friend bool operator==(const MemoTable&, const MemoTable&) = default;

 private:
  std::vector<std::optional<CellScore>> cells_;
  std::size_t size_ = 0;
};

using Evaluator = std::function<CellScore(Cell)>;

struct Move {
  Cell from;
  Cell to;
  CellScore from_score;
  CellScore to_score;
};

struct SearchOutcome {
  Cell start;
  Cell best;
  CellScore best_score;
  std::size_t evaluations = 0;  // evaluator calls made by this search
  std::size_t sweeps = 0;
  std::vector<Move> moves;
};

/// Hill climbing over 5 x 5 neighbourhoods. Each sweep visits the 24 in-bounds
/// cells around the current centre; a cell replaces the best whenever its
/// (ppv, sensitivity) strictly beats it, and the next sweep is centred on the
/// best found. Stops after a sweep with no replacement. Cells already in the
/// memo are compared using the stored score and not re-evaluated.
///
/// Throws nbprior::Error when start is off the grid or a score is outside [0, 1].
SearchOutcome radial_gradient_search(Cell start, const Evaluator& evaluate, MemoTable& memo);

/// The nine starting points (lambda_neg, lambda_pos) in {1, 8, 15}^2.
std::vector<Cell> default_starts();

struct MultiStartResult {
  Cell best;
  CellScore best_score;
  std::vector<SearchOutcome> runs;
  MemoTable memo;
  std::size_t evaluations = 0;
};

/// Runs one search per start and returns the best of their results (ties go
/// to the smaller cell). With workers <= 1 the searches share one memo, so a
/// cell is evaluated at most once; with more workers each search runs on its
/// own thread with a private memo and the memos are merged afterwards. Both
/// modes return the same best cell and the same merged memo.
MultiStartResult multi_start_search(std::span<const Cell> starts, const Evaluator& evaluate,
                                    unsigned workers = 1);

/// Leave-one-out PPV and sensitivity of the model's training set at the
/// cell's hyperparameters, thresholding each held-out posterior at 0.5.
CellScore evaluate_priors(Cell cell, const model::CountModel& model);

/// Evaluator bound to `model`, which must outlive it.
Evaluator make_evaluator(const model::CountModel& model);

struct CellMean {
  Cell cell;
  double ppv;
  double sensitivity;
};

struct Aggregate {
  Cell best;
  double mean_ppv = 0.0;
  double mean_sensitivity = 0.0;
  std::vector<CellMean> means;  // every cell explored under any seed, by (x, y)
  std::size_t backfilled = 0;   // evaluations added to complete the union
};

/// Averages scores across seeds over the union of cells explored under any
/// seed. Cells a seed never visited are evaluated with that seed's evaluator
/// and written into its memo. The winner maximises mean ppv, then mean
/// sensitivity, then takes the smallest (x, y).
Aggregate aggregate_over_seeds(std::span<MemoTable> memos, std::span<const Evaluator> evaluators);

/// CSV "lambda_neg,lambda_pos,ppv,sensitivity", one row per memo entry.
void write_memo_csv(std::ostream& out, const MemoTable& memo);
/// CSV "lambda_neg,lambda_pos,mean_ppv,mean_sensitivity".
void write_means_csv(std::ostream& out, const Aggregate& aggregate);
/// One line per accepted move.
void write_search_log(std::ostream& out, const std::vector<SearchOutcome>& runs);

}  // namespace nbprior::search
