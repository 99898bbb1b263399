#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vemc/errors.hpp"
#include "vemc/rng.hpp"

namespace vemc {

/// Summary of the observed real data: mean of `count` observations from a
/// Gaussian with known variance.
struct MeasurementData {
    double mean;
    long count;
    double variance;

    MeasurementData(double mean, long count, double variance);
};

/// Ordered, uniquely named influence-quantity distributions. The declaration
/// order fixes both the kernel slot layout and the per-iteration draw order.
class TypeBSpec {
public:
    using Entry = std::pair<std::string, Distribution>;

    TypeBSpec() = default;
    explicit TypeBSpec(std::vector<Entry> entries);

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::vector<std::string> names() const;

    /// Draw every component in declaration order from one stream.
    void sample_into(RandomStream& stream, std::span<double> out) const;

private:
    std::vector<Entry> entries_;
};

using KernelFn = std::function<double(double y, std::span<const double> z)>;

/// Slot budget (measurand plus influence quantities) for expression-backed
/// kernels; evaluation uses a fixed buffer of this size.
inline constexpr std::size_t kMaxKernelSlots = 64;

/// Deterministic forward kernel plus the variance of the additive Gaussian
/// noise the engines apply on top of it. The kernel itself carries no
/// randomness: the same (y, z) always yields the same value.
class VirtualExperiment {
public:
    VirtualExperiment(KernelFn kernel, std::vector<std::string> z_names, double noise_variance);

    /// Compile an expression over "y" and the given influence names.
    static VirtualExperiment from_expression(std::string_view kernel_text,
                                             std::vector<std::string> z_names,
                                             double noise_variance);

    double kernel(double y, std::span<const double> z) const;
    const std::vector<std::string>& z_names() const noexcept { return z_names_; }
    double noise_variance() const noexcept { return noise_variance_; }

private:
    KernelFn kernel_;
    std::vector<std::string> z_names_;
    double noise_variance_;
};

/// Noiseless kernel evaluation; z is positional in z_names order.
double eval_forward(const VirtualExperiment& ve, double y, std::span<const double> z);

/// Convenience overload taking named bindings; extra names are ignored, a
/// missing one raises EvalError.
double eval_forward(const VirtualExperiment& ve, double y, const std::map<std::string, double>& z);

/// Values of the measurand coefficient and offset at one fixed z, for kernels
/// of the form delta1(z) * y + delta2(z).
struct AffineParts {
    double delta1;
    double delta2;
};

/// Recover (delta1, delta2) from two kernel probes; exact when the kernel is
/// affine in y. Throws SingularModelError when |delta1| falls below
/// 1e-12 * max(1, |delta2|, |kernel(probe_a, z)|).
AffineParts extract_affine(const VirtualExperiment& ve, std::span<const double> z,
                           double probe_a = 0.0, double probe_b = 1.0);

struct AffineCheck {
    bool ok;
    double worst_probe;    ///< probe with the largest residual from the fitted line
    double worst_residual; ///< absolute residual at that probe
    double tolerance;      ///< absolute tolerance the residuals were held to
};

/// Fit a line through the kernel values at the first two probes and test every
/// remaining probe against it within rel_tol * max(1, max |kernel value|).
/// A violation is a result, not an error.
AffineCheck check_affine(const VirtualExperiment& ve, std::span<const double> z,
                         std::span<const double> probes, double rel_tol = 1e-9);

/// Probes {0, 1, 2} scaled by max(1, |y_scale|).
std::vector<double> default_affinity_probes(double y_scale);

/// y = (x - delta2) / delta1.
double invert_measurement(double x, const AffineParts& parts);

/// Descriptor of a noise family F_v(W) with parameter vector v.
struct NoiseLaw {
    std::string family;
    std::vector<double> params;
};

/// General stochastic model x = G(y, z, w) with w drawn from a parametric
/// noise law. Declared for completeness only: no engine evaluates it. Setting
/// w = 0 recovers a deterministic forward kernel.
class StochasticVE {
public:
    using Kernel = std::function<double(double y, std::span<const double> z, double w)>;

    StochasticVE(Kernel kernel, std::vector<std::string> z_names, NoiseLaw noise_law);

    double eval(double y, std::span<const double> z, double w) const;
    const NoiseLaw& noise_law() const noexcept { return noise_law_; }
    const std::vector<std::string>& z_names() const noexcept { return z_names_; }

    /// The w = 0 restriction as an engine-ready deterministic kernel.
    VirtualExperiment forward_model(double noise_variance) const;

private:
    Kernel kernel_;
    std::vector<std::string> z_names_;
    NoiseLaw noise_law_;
};

} // namespace vemc
