#include "nbprior/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <ostream>

#include "nbprior/error.hpp"
#include "nbprior/random.hpp"
#include "nbprior/text.hpp"

namespace nbprior::stats {

namespace {

double sample_variance(const OutcomeVector& v, double m) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (auto b : v) ss += (b - m) * (b - m);
  return ss / double(v.size() - 1);
}

}  // namespace

OutcomeVector outcome_vector(const RankedPredictions& ranked, const metrics::IdSet& truth,
                             std::size_t k) {
  if (k == 0 || k > ranked.size())
    throw Error("outcome length " + std::to_string(k) + " not in 1.." +
                std::to_string(ranked.size()));
  OutcomeVector v(k);
  for (std::size_t i = 0; i < k; ++i) v[i] = truth.count(ranked[i].id) ? 1 : 0;
  return v;
}

double mean(const OutcomeVector& v) {
  if (v.empty()) throw Error("mean of an empty outcome vector");
  std::size_t ones = 0;
  for (auto b : v) ones += b;
  return double(ones) / double(v.size());
}

BootstrapCI bootstrap_ci(const OutcomeVector& v, std::size_t resamples, double alpha,
                         std::uint64_t seed) {
  if (v.empty()) throw Error("cannot bootstrap an empty outcome vector");
  if (resamples == 0) throw Error("bootstrap needs at least one resample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");

  Rng rng(seed);
  const std::size_t k = v.size();
  std::vector<double> means(resamples);
  for (auto& m : means) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < k; ++i) ones += v[rng.below(k)];
    m = double(ones) / double(k);
  }
  std::sort(means.begin(), means.end());

  const double B = double(resamples);
  auto lo_rank = std::size_t(std::floor(B * alpha / 2.0));
  auto hi_rank = std::size_t(std::ceil(B * (1.0 - alpha / 2.0)));
  hi_rank = hi_rank == 0 ? 0 : hi_rank - 1;
  lo_rank = std::min(lo_rank, resamples - 1);
  hi_rank = std::min(std::max(hi_rank, lo_rank), resamples - 1);
  return {means[lo_rank], means[hi_rank], resamples, alpha};
}

TTest significance_test(const OutcomeVector& baseline, const OutcomeVector& study) {
  if (baseline.size() < 2 || study.size() < 2)
    throw Error("t-test needs at least two outcomes per group");
  const double ma = mean(baseline), mb = mean(study);
  const double va = sample_variance(baseline, ma) / double(baseline.size());
  const double vb = sample_variance(study, mb) / double(study.size());
  const double se2 = va + vb;

  TTest result;
  if (se2 == 0.0) {
    result.p_value = ma == mb ? 1.0 : 0.0;
    result.t = ma == mb ? 0.0 : std::copysign(INFINITY, mb - ma);
    result.df = double(baseline.size() + study.size() - 2);
    return result;
  }
  result.t = (mb - ma) / std::sqrt(se2);
  const double da = double(baseline.size() - 1), db = double(study.size() - 1);
  result.df = se2 * se2 / (va * va / da + vb * vb / db);
  boost::math::students_t dist(result.df);
  result.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(result.t))));
  return result;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "model,k,ppv,ci_lo,ci_hi,p_value\n";
  for (const auto& r : rows)
    out << csv_field(r.model) << ',' << r.k << ',' << format_double(r.ppv) << ','
        << format_double(r.ci.lo) << ',' << format_double(r.ci.hi) << ','
        << format_double(r.p_value) << '\n';
}

}  // namespace nbprior::stats
