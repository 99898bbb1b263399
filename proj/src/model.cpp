#include "vemc/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

#include "vemc/expr.hpp"

namespace vemc {

MeasurementData::MeasurementData(double mean_, long count_, double variance_)
    : mean(mean_), count(count_), variance(variance_) {
    if (!std::isfinite(mean)) throw ConfigError("measurement mean must be finite");
    if (count < 1) throw ConfigError("measurement count must be at least 1");
    if (!std::isfinite(variance) || !(variance > 0.0)) {
        throw ConfigError("measurement variance must be finite and positive");
    }
}

TypeBSpec::TypeBSpec(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::set<std::string> seen;
    for (const auto& [name, dist] : entries_) {
        if (!is_identifier(name)) {
            throw ConfigError("influence-quantity name '" + name + "' is not a valid identifier");
        }
        if (name == "y") {
            throw ConfigError("influence-quantity name 'y' collides with the measurand");
        }
        if (!seen.insert(name).second) {
            throw ConfigError("duplicate influence-quantity name '" + name + "'");
        }
    }
}

std::vector<std::string> TypeBSpec::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, dist] : entries_) out.push_back(name);
    return out;
}

void TypeBSpec::sample_into(RandomStream& stream, std::span<double> out) const {
    if (out.size() != entries_.size()) {
        throw ConfigError("sample buffer size does not match the number of influence quantities");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        out[i] = entries_[i].second.sample(stream);
    }
}

VirtualExperiment::VirtualExperiment(KernelFn kernel, std::vector<std::string> z_names,
                                     double noise_variance)
    : kernel_(std::move(kernel)), z_names_(std::move(z_names)), noise_variance_(noise_variance) {
    if (!kernel_) throw ConfigError("virtual experiment requires a kernel");
    if (!std::isfinite(noise_variance_) || noise_variance_ < 0.0) {
        throw ConfigError("noise variance must be finite and non-negative");
    }
}

VirtualExperiment VirtualExperiment::from_expression(std::string_view kernel_text,
                                                     std::vector<std::string> z_names,
                                                     double noise_variance) {
    if (z_names.size() + 1 > kMaxKernelSlots) {
        throw ConfigError("too many influence quantities for an expression kernel");
    }
    std::vector<std::string> slots;
    slots.reserve(z_names.size() + 1);
    slots.emplace_back("y");
    slots.insert(slots.end(), z_names.begin(), z_names.end());

    CompiledExpr compiled = compile(parse(kernel_text), slots);
    const std::size_t n_z = z_names.size();
    KernelFn fn = [compiled = std::move(compiled), n_z](double y, std::span<const double> z) {
        std::array<double, kMaxKernelSlots> slots_buf;
        slots_buf[0] = y;
        std::copy(z.begin(), z.end(), slots_buf.begin() + 1);
        return compiled.eval(std::span<const double>(slots_buf.data(), n_z + 1));
    };
    return VirtualExperiment(std::move(fn), std::move(z_names), noise_variance);
}

double VirtualExperiment::kernel(double y, std::span<const double> z) const {
    if (z.size() != z_names_.size()) {
        throw EvalError("kernel expects " + std::to_string(z_names_.size()) +
                        " influence values, got " + std::to_string(z.size()));
    }
    return kernel_(y, z);
}

double eval_forward(const VirtualExperiment& ve, double y, std::span<const double> z) {
    return ve.kernel(y, z);
}

double eval_forward(const VirtualExperiment& ve, double y, const std::map<std::string, double>& z) {
    std::vector<double> values;
    values.reserve(ve.z_names().size());
    for (const std::string& name : ve.z_names()) {
        const auto it = z.find(name);
        if (it == z.end()) throw EvalError("missing binding for '" + name + "'");
        values.push_back(it->second);
    }
    return ve.kernel(y, values);
}

namespace {

std::string format_z(const VirtualExperiment& ve, std::span<const double> z) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (i > 0) os << ", ";
        if (i < ve.z_names().size()) os << ve.z_names()[i] << " = ";
        os << z[i];
    }
    os << ')';
    return os.str();
}

} // namespace

AffineParts extract_affine(const VirtualExperiment& ve, std::span<const double> z,
                           double probe_a, double probe_b) {
    if (probe_a == probe_b) throw ConfigError("affine probes must be distinct");
    const double ka = ve.kernel(probe_a, z);
    const double kb = ve.kernel(probe_b, z);
    const double delta1 = (kb - ka) / (probe_b - probe_a);
    const double delta2 = ka - probe_a * delta1;
    const double tol_zero = 1e-12 * std::max({1.0, std::abs(delta2), std::abs(ka)});
    if (std::abs(delta1) < tol_zero) {
        throw SingularModelError("measurand coefficient " + std::to_string(delta1) +
                                 " is numerically singular at z = " + format_z(ve, z));
    }
    return {delta1, delta2};
}

AffineCheck check_affine(const VirtualExperiment& ve, std::span<const double> z,
                         std::span<const double> probes, double rel_tol) {
    std::set<double> distinct(probes.begin(), probes.end());
    if (distinct.size() < 3) throw ConfigError("affinity check needs at least 3 distinct probes");
    if (probes[0] == probes[1]) throw ConfigError("the first two affinity probes must differ");

    std::vector<double> values;
    values.reserve(probes.size());
    double scale = 1.0;
    for (double p : probes) {
        const double v = ve.kernel(p, z);
        values.push_back(v);
        scale = std::max(scale, std::abs(v));
    }

    const double slope = (values[1] - values[0]) / (probes[1] - probes[0]);
    const double tolerance = rel_tol * scale;

    AffineCheck result{true, probes[2], 0.0, tolerance};
    for (std::size_t i = 2; i < probes.size(); ++i) {
        const double predicted = values[0] + slope * (probes[i] - probes[0]);
        const double residual = std::abs(values[i] - predicted);
        if (residual > result.worst_residual) {
            result.worst_residual = residual;
            result.worst_probe = probes[i];
        }
    }
    result.ok = result.worst_residual <= tolerance;
    return result;
}

std::vector<double> default_affinity_probes(double y_scale) {
    const double c = std::max(1.0, std::abs(y_scale));
    return {0.0, c, 2.0 * c};
}

double invert_measurement(double x, const AffineParts& parts) {
    return (x - parts.delta2) / parts.delta1;
}

StochasticVE::StochasticVE(Kernel kernel, std::vector<std::string> z_names, NoiseLaw noise_law)
    : kernel_(std::move(kernel)), z_names_(std::move(z_names)), noise_law_(std::move(noise_law)) {
    if (!kernel_) throw ConfigError("stochastic model requires a kernel");
}

double StochasticVE::eval(double y, std::span<const double> z, double w) const {
    return kernel_(y, z, w);
}

VirtualExperiment StochasticVE::forward_model(double noise_variance) const {
    Kernel kernel = kernel_;
    return VirtualExperiment(
        [kernel](double y, std::span<const double> z) { return kernel(y, z, 0.0); }, z_names_,
        noise_variance);
}

} // namespace vemc
