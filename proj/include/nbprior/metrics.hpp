#pragma once

#include <cstddef>
#include <iosfwd>
#include <unordered_set>
#include <vector>

#include "nbprior/ranking.hpp"

namespace nbprior::metrics {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  void add(bool predicted_positive, bool actually_positive);

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// tp / (tp + fp), or 0 when nothing was predicted positive.
double ppv(const ConfusionCounts& counts);
/// tp / (tp + fn), or 0 when there are no actual positives.
double sensitivity(const ConfusionCounts& counts);

using IdSet = std::unordered_set<DocId>;

/// Number of the top-k ids found in truth. Throws when k exceeds the list.
std::size_t hits_at_k(const RankedPredictions& ranked, const IdSet& truth, std::size_t k);
/// Throws nbprior::Error when k is 0 or exceeds the list length.
double ppv_at_k(const RankedPredictions& ranked, const IdSet& truth, std::size_t k);

struct ProfilePoint {
  std::size_t rank;
  std::size_t hits;
  double ppv;
};
using PpvProfile = std::vector<ProfilePoint>;

/// Cumulative PPV at every rank 1..K.
PpvProfile ppv_profile(const RankedPredictions& ranked, const IdSet& truth, std::size_t K);

/// CSV with header "rank,hits,ppv".
void write_profile_csv(std::ostream& out, const PpvProfile& profile);

}  // namespace nbprior::metrics
