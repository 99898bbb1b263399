#include "vemc/engines.hpp"

#include <algorithm>
#include <array>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace vemc {

std::string_view engine_name(EngineKind kind) {
    switch (kind) {
    case EngineKind::Jcgm101: return "jcgm101";
    case EngineKind::McVe: return "mc-ve";
    case EngineKind::Conditional: return "conditional";
    }
    return "unknown";
}

EngineKind engine_from_name(std::string_view name) {
    if (name == "jcgm101") return EngineKind::Jcgm101;
    if (name == "mc-ve") return EngineKind::McVe;
    if (name == "conditional") return EngineKind::Conditional;
    throw ConfigError("unknown engine '" + std::string(name) + "'");
}

namespace {

// Reserved stream index for the pilot affinity check; iteration substreams
// use indices 0..n-1.
constexpr std::uint64_t kPilotStreamIndex = std::numeric_limits<std::uint64_t>::max();

// Earliest-iteration failure across workers; the minimum failing index is
// deterministic because each worker scans its chunk in order.
class FirstError {
public:
    void record(std::size_t index, std::exception_ptr error) {
        const std::lock_guard<std::mutex> lock(mu_);
        if (index < index_) {
            index_ = index;
            error_ = std::move(error);
        }
    }

    void rethrow_if_set() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    mutable std::mutex mu_;
    std::size_t index_ = std::numeric_limits<std::size_t>::max();
    std::exception_ptr error_;
};

// Fill values[i] = iteration(i) for i in [0, n), partitioned into contiguous
// chunks across workers. Each iteration derives its own substream, so the
// result does not depend on the partition.
template <typename IterationFn>
void run_iterations(std::size_t n, unsigned workers, std::vector<double>& values,
                    const IterationFn& iteration) {
    FirstError first_error;
    const auto run_chunk = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                values[i] = iteration(i);
            } catch (const SingularModelError& e) {
                first_error.record(i, std::make_exception_ptr(SingularModelError(
                                          "iteration " + std::to_string(i) + ": " + e.what())));
                return;
            } catch (...) {
                first_error.record(i, std::current_exception());
                return;
            }
        }
    };

    const unsigned thread_count =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
    if (thread_count <= 1) {
        run_chunk(0, n);
    } else {
        const std::size_t chunk = (n + thread_count - 1) / thread_count;
        std::vector<std::thread> threads;
        threads.reserve(thread_count);
        for (unsigned t = 0; t < thread_count; ++t) {
            const std::size_t begin = static_cast<std::size_t>(t) * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            threads.emplace_back(run_chunk, begin, end);
        }
        for (auto& th : threads) th.join();
    }
    first_error.rethrow_if_set();
}

void pilot_affinity_check(const VirtualExperiment& ve, const TypeBSpec& typeb,
                          std::uint64_t master_seed, double y_scale) {
    RandomStream pilot = derive_substream(master_seed, kPilotStreamIndex);
    std::vector<double> z(typeb.size());
    typeb.sample_into(pilot, z);
    const std::vector<double> probes = default_affinity_probes(y_scale);
    const AffineCheck check = check_affine(ve, z, probes);
    if (!check.ok) {
        throw AffinityError("kernel is not affine in the measurand: residual " +
                            std::to_string(check.worst_residual) + " at probe " +
                            std::to_string(check.worst_probe) + " exceeds tolerance " +
                            std::to_string(check.tolerance));
    }
}

void validate_config(const EngineConfig& cfg, const TypeBSpec& typeb) {
    if (cfg.n < 1) throw ConfigError("engine requires n >= 1");
    if (typeb.size() > kMaxKernelSlots) {
        throw ConfigError("too many influence quantities");
    }
}

} // namespace

SampleSet run_jcgm101(const VirtualExperiment& ve, const MeasurementData& data,
                      const TypeBSpec& typeb, const EngineConfig& cfg) {
    validate_config(cfg, typeb);
    pilot_affinity_check(ve, typeb, cfg.master_seed, 1.0);

    const double obs_variance = data.variance / static_cast<double>(data.count);
    SampleSet out;
    out.values.resize(cfg.n);
    run_iterations(cfg.n, cfg.workers, out.values, [&](std::size_t i) {
        RandomStream stream = derive_substream(cfg.master_seed, i);
        const double x_prime = sample_gaussian(stream, data.mean, obs_variance);
        std::array<double, kMaxKernelSlots> z_buf;
        const std::span<double> z(z_buf.data(), typeb.size());
        typeb.sample_into(stream, z);
        const AffineParts parts = extract_affine(ve, z);
        return invert_measurement(x_prime, parts);
    });

    out.engine = EngineKind::Jcgm101;
    out.master_seed = cfg.master_seed;
    out.n = cfg.n;
    return out;
}

SampleSet run_mc_ve(const VirtualExperiment& ve, const MeasurementData& data,
                    const TypeBSpec& typeb, const EngineConfig& cfg) {
    validate_config(cfg, typeb);
    if (ve.noise_variance() != data.variance) {
        throw ConfigError(
            "virtual-experiment noise variance must equal the known data variance");
    }
    pilot_affinity_check(ve, typeb, cfg.master_seed, cfg.y0);

    const double y0 = cfg.y0;
    const double probe_b = std::max(1.0, std::abs(y0));
    const auto m = static_cast<std::size_t>(data.count);
    SampleSet out;
    out.values.resize(cfg.n);
    run_iterations(cfg.n, cfg.workers, out.values, [&](std::size_t i) {
        RandomStream stream = derive_substream(cfg.master_seed, i);
        std::array<double, kMaxKernelSlots> z_buf;
        const std::span<double> z(z_buf.data(), typeb.size());
        typeb.sample_into(stream, z);

        const double kernel_value = ve.kernel(y0, z);
        double simulated_mean;
        if (cfg.literal_inner_loop) {
            double sum = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                sum += kernel_value + sample_gaussian(stream, 0.0, data.variance);
            }
            simulated_mean = sum / static_cast<double>(m);
        } else {
            simulated_mean =
                kernel_value + sample_gaussian(stream, 0.0, data.variance / static_cast<double>(m));
        }

        const AffineParts parts = extract_affine(ve, z, 0.0, probe_b);
        return (data.mean - simulated_mean) / parts.delta1 + y0;
    });

    out.engine = EngineKind::McVe;
    out.master_seed = cfg.master_seed;
    out.n = cfg.n;
    out.y0 = y0;
    return out;
}

SampleSet sample_conditional(std::span<const double> z, const VirtualExperiment& ve,
                             const MeasurementData& data, std::size_t k, RandomStream& stream) {
    if (k < 1) throw ConfigError("conditional sampler requires k >= 1");
    const AffineParts parts = extract_affine(ve, z);
    const double mean = (data.mean - parts.delta2) / parts.delta1;
    const double variance =
        data.variance / (static_cast<double>(data.count) * parts.delta1 * parts.delta1);

    SampleSet out;
    out.values.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.values.push_back(sample_gaussian(stream, mean, variance));
    }
    out.engine = EngineKind::Conditional;
    out.master_seed = stream.master_seed();
    out.n = k;
    return out;
}

} // namespace vemc
