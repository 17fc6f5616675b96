#include "nbprior/metrics.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_set>

#include "nbprior/error.hpp"
#include "nbprior/text.hpp"

namespace nbprior {

RankedPredictions::RankedPredictions(std::vector<Prediction> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(), [](const Prediction& a, const Prediction& b) {
    if (a.log_odds != b.log_odds) return a.log_odds > b.log_odds;
    return a.id < b.id;
  });
  std::unordered_set<DocId> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.id).second)
      throw Error("repeated document id " + std::to_string(e.id) + " in predictions");
    if (e.p_pos > 0.5) ++positives_predicted_;
  }
}

namespace metrics {

void ConfusionCounts::add(bool predicted_positive, bool actually_positive) {
  if (predicted_positive)
    ++(actually_positive ? tp : fp);
  else
    ++(actually_positive ? fn : tn);
}

double ppv(const ConfusionCounts& c) {
  const auto predicted = c.tp + c.fp;
  return predicted == 0 ? 0.0 : double(c.tp) / double(predicted);
}

double sensitivity(const ConfusionCounts& c) {
  const auto actual = c.tp + c.fn;
  return actual == 0 ? 0.0 : double(c.tp) / double(actual);
}

std::size_t hits_at_k(const RankedPredictions& ranked, const IdSet& truth, std::size_t k) {
  if (k > ranked.size())
    throw Error("k = " + std::to_string(k) + " exceeds the " + std::to_string(ranked.size()) +
                " ranked predictions");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += truth.count(ranked[i].id);
  return hits;
}

double ppv_at_k(const RankedPredictions& ranked, const IdSet& truth, std::size_t k) {
  if (k == 0) throw Error("k must be at least 1");
  return double(hits_at_k(ranked, truth, k)) / double(k);
}

PpvProfile ppv_profile(const RankedPredictions& ranked, const IdSet& truth, std::size_t K) {
  if (K > ranked.size())
    throw Error("profile length " + std::to_string(K) + " exceeds the " +
                std::to_string(ranked.size()) + " ranked predictions");
  PpvProfile profile;
  profile.reserve(K);
  std::size_t hits = 0;
  for (std::size_t k = 1; k <= K; ++k) {
    hits += truth.count(ranked[k - 1].id);
    profile.push_back({k, hits, double(hits) / double(k)});
  }
  return profile;
}

void write_profile_csv(std::ostream& out, const PpvProfile& profile) {
  out << "rank,hits,ppv\n";
  for (const auto& p : profile) out << p.rank << ',' << p.hits << ',' << format_double(p.ppv) << '\n';
}

}  // namespace metrics
}  // namespace nbprior
