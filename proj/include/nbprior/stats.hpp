#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nbprior/metrics.hpp"

namespace nbprior::stats {

/// Bit i is 1 iff the rank-(i+1) prediction is a true positive.
using OutcomeVector = std::vector<std::uint8_t>;

OutcomeVector outcome_vector(const RankedPredictions& ranked, const metrics::IdSet& truth,
                             std::size_t k);

double mean(const OutcomeVector& v);

struct BootstrapCI {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t resamples = 0;
  double alpha = 0.05;
};

inline constexpr std::size_t kDefaultResamples = 10000;

/// Percentile bootstrap of the mean: B resamples of size k drawn with
/// replacement; lo and hi are the order statistics at ranks
/// floor(B * alpha / 2) and ceil(B * (1 - alpha / 2)) - 1 of the sorted
/// resample means. Throws on an empty vector, B == 0 or alpha outside (0, 1).
BootstrapCI bootstrap_ci(const OutcomeVector& v, std::size_t resamples, double alpha,
                         std::uint64_t seed);

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

/// Two-sided Welch two-sample t-test of the means. Zero variance on both sides
/// gives p = 1 for equal means and p = 0 otherwise.
TTest significance_test(const OutcomeVector& baseline, const OutcomeVector& study);

struct ReportRow {
  std::string model;
  std::size_t k = 0;
  double ppv = 0.0;
  BootstrapCI ci;
  double p_value = 1.0;
};

/// CSV "model,k,ppv,ci_lo,ci_hi,p_value".
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace nbprior::stats
