#include "vemc/rng.hpp"

namespace vemc {

double sample_gaussian(RandomStream& stream, double mu, double variance) {
    if (!(variance >= 0.0)) {
        throw ConfigError("gaussian variance must be non-negative");
    }
    // u1 shifted into (0, 1] so the log stays finite.
    const double u1 = 1.0 - stream.next_uniform01();
    const double u2 = stream.next_uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mu + std::sqrt(variance) * z;
}

double sample_uniform(RandomStream& stream, double lower, double upper) {
    if (!(lower < upper)) {
        throw ConfigError("uniform bounds must satisfy lower < upper");
    }
    double v = lower + (upper - lower) * stream.next_uniform01();
    if (v >= upper) {
        // Rounding can land on the upper bound for extreme ranges; keep the
        // half-open contract.
        v = std::nextafter(upper, lower);
    }
    return v;
}

Distribution::Distribution(Gaussian g) : value_(g) {
    if (!std::isfinite(g.mean) || !std::isfinite(g.variance) || !(g.variance > 0.0)) {
        throw ConfigError("gaussian distribution requires finite mean and variance > 0");
    }
}

Distribution::Distribution(Uniform u) : value_(u) {
    if (!std::isfinite(u.lower) || !std::isfinite(u.upper) || !(u.lower < u.upper)) {
        throw ConfigError("uniform distribution requires finite bounds with lower < upper");
    }
}

double Distribution::sample(RandomStream& stream) const {
    if (const auto* g = std::get_if<Gaussian>(&value_)) {
        return sample_gaussian(stream, g->mean, g->variance);
    }
    const auto& u = std::get<Uniform>(value_);
    return sample_uniform(stream, u.lower, u.upper);
}

} // namespace vemc
