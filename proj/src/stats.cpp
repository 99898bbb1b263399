#include "vemc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vemc/engines.hpp"

namespace vemc {

double sample_mean(std::span<const double> values) {
    if (values.empty()) throw ConfigError("mean of an empty sample");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
    if (values.size() < 2) throw ConfigError("standard deviation needs at least 2 values");
    const double mean = sample_mean(values);
    double ss = 0.0;
    for (double v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::pair<double, double> shortest_coverage_interval(std::span<const double> sorted_values,
                                                     double p) {
    const std::size_t n = sorted_values.size();
    if (n < 2) throw ConfigError("coverage interval needs at least 2 values");
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("coverage probability must lie in (0, 1)");
    if (!std::is_sorted(sorted_values.begin(), sorted_values.end())) {
        throw ConfigError("coverage interval input must be sorted ascending");
    }

    auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);

    std::size_t best_i = 0;
    double best_width = sorted_values[k - 1] - sorted_values[0];
    for (std::size_t i = 1; i + k <= n; ++i) {
        const double width = sorted_values[i + k - 1] - sorted_values[i];
        if (width < best_width) {
            best_width = width;
            best_i = i;
        }
    }
    return {sorted_values[best_i], sorted_values[best_i + k - 1]};
}

SummaryReport summarize(std::span<const double> values, double coverage_p, std::size_t bins) {
    if (values.size() < 2) throw ConfigError("summary needs at least 2 values");
    if (bins < 1) throw ConfigError("summary needs at least 1 histogram bin");
    for (double v : values) {
        if (!std::isfinite(v)) throw ConfigError("summary input contains a non-finite value");
    }

    SummaryReport report;
    report.n = values.size();
    report.mean = sample_mean(values);
    report.std_dev = sample_std(values);
    report.coverage_p = coverage_p;

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::tie(report.ci_low, report.ci_high) = shortest_coverage_interval(sorted, coverage_p);

    const double lo = sorted.front();
    const double hi = sorted.back();
    if (lo == hi) {
        report.histogram.push_back({lo, hi, static_cast<std::uint64_t>(values.size())});
        return report;
    }

    std::vector<std::uint64_t> counts(bins, 0);
    const double range = hi - lo;
    for (double v : values) {
        auto idx = static_cast<std::size_t>((v - lo) / range * static_cast<double>(bins));
        idx = std::min(idx, bins - 1); // v == hi lands in the last bin
        ++counts[idx];
    }
    report.histogram.reserve(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        const double bin_low = lo + range * static_cast<double>(i) / static_cast<double>(bins);
        const double bin_high =
            (i + 1 == bins) ? hi : lo + range * static_cast<double>(i + 1) / static_cast<double>(bins);
        report.histogram.push_back({bin_low, bin_high, counts[i]});
    }
    return report;
}

SummaryReport summarize(const SampleSet& samples, double coverage_p, std::size_t bins) {
    return summarize(std::span<const double>(samples.values), coverage_p, bins);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
    if (a.empty() || b.empty()) throw ConfigError("KS test requires non-empty samples");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("KS alpha must lie in (0, 1)");

    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t ia = 0;
    std::size_t ib = 0;
    double stat = 0.0;
    while (ia < sa.size() && ib < sb.size()) {
        const double x = std::min(sa[ia], sb[ib]);
        while (ia < sa.size() && sa[ia] == x) ++ia;
        while (ib < sb.size() && sb[ib] == x) ++ib;
        stat = std::max(stat, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }

    const double c_alpha = std::sqrt(-std::log(alpha / 2.0) / 2.0);
    const double critical = c_alpha * std::sqrt((na + nb) / (na * nb));
    return {stat, critical, stat <= critical};
}

MomentComparison moment_equivalence(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw ConfigError("moment comparison needs at least 2 values per sample");
    }
    const double mean_a = sample_mean(a);
    const double mean_b = sample_mean(b);
    const double std_a = sample_std(a);
    const double std_b = sample_std(b);
    const double se = std::sqrt(std_a * std_a / static_cast<double>(a.size()) +
                                std_b * std_b / static_cast<double>(b.size()));
    // degenerate spreads: equal constants compare as identical, not as 0/0
    const double mean_diff =
        (se == 0.0) ? (mean_a == mean_b ? 0.0 : std::numeric_limits<double>::infinity())
                    : (mean_a - mean_b) / se;
    const double std_ratio = (std_b == 0.0 && std_a == 0.0) ? 1.0 : std_a / std_b;
    return {mean_diff, std_ratio};
}

EquivalenceReport equivalence_report(std::span<const double> a, std::span<const double> b,
                                     double alpha, double nsigma) {
    const KsResult ks = ks_two_sample(a, b, alpha);
    const MomentComparison moments = moment_equivalence(a, b);
    const bool pass = ks.pass && std::abs(moments.mean_diff_sigmas) <= nsigma &&
                      moments.std_ratio >= 0.98 && moments.std_ratio <= 1.02;
    return {ks.stat, ks.critical, ks.pass, moments.mean_diff_sigmas, moments.std_ratio, pass};
}

} // namespace vemc
