#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vemc/model.hpp"

namespace vemc {

enum class EngineKind { Jcgm101, McVe, Conditional };

std::string_view engine_name(EngineKind kind);
EngineKind engine_from_name(std::string_view name);

/// Measurand draws plus the provenance needed to reproduce them.
struct SampleSet {
    std::vector<double> values;
    EngineKind engine = EngineKind::Jcgm101;
    std::uint64_t master_seed = 0;
    std::string scenario_id;
    std::size_t n = 0;
    std::optional<double> y0; ///< hypothetical measurand (virtual-experiment engine only)
};

struct EngineConfig {
    std::size_t n = 1;              ///< Monte Carlo runs
    std::uint64_t master_seed = 0;
    double y0 = 0.0;                ///< hypothetical measurand for run_mc_ve
    bool literal_inner_loop = true; ///< draw the m inner observations one by one
    unsigned workers = 1;           ///< worker threads; the output never depends on this
};

/// Standard Monte Carlo propagation through the inverted measurement model.
///
/// Iteration i draws, from substream i in fixed order, x'_i ~ N(mean,
/// variance / count) and then the influence quantities in declaration order;
/// the sample is y'_i = (x'_i - delta2(z_i)) / delta1(z_i). Output is
/// identical for any worker count. A numerically singular delta1 aborts with
/// the iteration index and z values.
SampleSet run_jcgm101(const VirtualExperiment& ve, const MeasurementData& data,
                      const TypeBSpec& typeb, const EngineConfig& cfg);

/// Monte Carlo propagation driven by the virtual experiment itself.
///
/// Iteration i draws, from substream i in fixed order, the influence
/// quantities and then the inner noise; it simulates the mean of m virtual
/// observations at the hypothetical measurand y0 and corrects it to
/// y_i = (mean - simulated_mean_i) / delta1(z_i) + y0. Because the draws are
/// consumed before y0 enters, reusing a seed makes the output invariant to
/// the choice of y0. With literal_inner_loop the m noise values are drawn one
/// by one; otherwise their mean is drawn directly from N(0, variance / m),
/// which has the identical distribution. Requires ve.noise_variance() ==
/// data.variance.
SampleSet run_mc_ve(const VirtualExperiment& ve, const MeasurementData& data,
                    const TypeBSpec& typeb, const EngineConfig& cfg);

/// k draws of the measurand conditional on fixed influence values:
/// y | z ~ N((mean - delta2) / delta1, variance / (count * delta1^2)).
SampleSet sample_conditional(std::span<const double> z, const VirtualExperiment& ve,
                             const MeasurementData& data, std::size_t k, RandomStream& stream);

} // namespace vemc
