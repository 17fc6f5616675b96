#pragma once

#include <cstddef>
#include <vector>

#include "nbprior/corpus.hpp"

namespace nbprior {

struct Prediction {
  DocId id = 0;
  double p_pos = 0.0;
  double log_odds = 0.0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Predictions ordered by log_odds descending, ties by ascending id.
class RankedPredictions {
 public:
  RankedPredictions() = default;
  /// Sorts; throws nbprior::Error on a repeated id.
  explicit RankedPredictions(std::vector<Prediction> entries);

  const std::vector<Prediction>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const Prediction& operator[](std::size_t rank) const { return entries_[rank]; }
  /// Entries with p_pos > 0.5.
  std::size_t positives_predicted() const noexcept { return positives_predicted_; }

  friend bool operator==(const RankedPredictions&, const RankedPredictions&) = default;

 private:
  std::vector<Prediction> entries_;
  std::size_t positives_predicted_ = 0;
};

}  // namespace nbprior
