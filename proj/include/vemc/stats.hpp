#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vemc/errors.hpp"

namespace vemc {

struct SampleSet;

double sample_mean(std::span<const double> values);

/// Sample standard deviation with divisor n - 1, computed in two passes.
double sample_std(std::span<const double> values);

struct HistogramBin {
    double low;
    double high;
    std::uint64_t count;
};

/// Estimate, standard uncertainty, shortest coverage interval, and an
/// equal-width histogram of a sample.
struct SummaryReport {
    std::size_t n;
    double mean;
    double std_dev;
    double coverage_p;
    double ci_low;
    double ci_high;
    std::vector<HistogramBin> histogram;
};

SummaryReport summarize(std::span<const double> values, double coverage_p = 0.95,
                        std::size_t bins = 200);
SummaryReport summarize(const SampleSet& samples, double coverage_p = 0.95,
                        std::size_t bins = 200);

/// Narrowest window [v[i], v[i+k-1]] with k = ceil(p * n); ties resolved
/// toward the smallest i. Input must be sorted ascending.
std::pair<double, double> shortest_coverage_interval(std::span<const double> sorted_values,
                                                     double p);

struct KsResult {
    double stat;
    double critical;
    bool pass;
};

/// Two-sample Kolmogorov-Smirnov test: stat is the supremum gap between the
/// empirical CDFs over the pooled sample; the critical value is the large-n
/// approximation c(alpha) * sqrt((n_a + n_b) / (n_a * n_b)) with
/// c(alpha) = sqrt(-ln(alpha / 2) / 2).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double alpha = 0.001);

struct MomentComparison {
    double mean_diff_sigmas; ///< mean difference in combined standard errors
    double std_ratio;        ///< std_a / std_b
};

MomentComparison moment_equivalence(std::span<const double> a, std::span<const double> b);

/// Combined distribution-equality verdict for two sample sets. pass requires
/// the KS test, |mean_diff_sigmas| <= nsigma, and std_ratio within
/// [0.98, 1.02].
struct EquivalenceReport {
    double ks_stat;
    double ks_critical;
    bool ks_pass;
    double mean_diff_sigmas;
    double std_ratio;
    bool pass;
};

EquivalenceReport equivalence_report(std::span<const double> a, std::span<const double> b,
                                     double alpha = 0.001, double nsigma = 5.0);

} // namespace vemc
