// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion. Exits non-zero if any fail.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "testutil.hpp"
#include "vemc/scenarios.hpp"
#include "vemc/stats.hpp"

namespace {

namespace fs = std::filesystem;
using namespace vemc;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

EngineConfig config(std::size_t n, std::uint64_t seed, double y0) {
    EngineConfig cfg;
    cfg.n = n;
    cfg.master_seed = seed;
    cfg.y0 = y0;
    return cfg;
}

struct SummaryCheck {
    double mean_center, mean_tol;
    double std_center, std_tol;
    double ci_low_center, ci_high_center, ci_tol;
};

bool check_summary(const SummaryReport& s, const SummaryCheck& c, std::string& detail) {
    const bool ok = std::abs(s.mean - c.mean_center) <= c.mean_tol &&
                    std::abs(s.std_dev - c.std_center) <= c.std_tol &&
                    std::abs(s.ci_low - c.ci_low_center) <= c.ci_tol &&
                    std::abs(s.ci_high - c.ci_high_center) <= c.ci_tol;
    detail += fmt("mean=%.4f std=%.4f ci=[%.4f, %.4f]", s.mean, s.std_dev, s.ci_low, s.ci_high);
    return ok;
}

// 1. Generic example through the standard engine at n = 1e6: summary matches
//    the reference statistics (6.06, 1.07, [4.50, 8.06]) and stays under 10 s.
void criterion_1() {
    const Scenario sc = generic_example();
    const auto t0 = std::chrono::steady_clock::now();
    const SampleSet samples = run_scenario(sc, EngineKind::Jcgm101, config(1000000, 42, 0.0));
    const SummaryReport summary = summarize(samples);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::string detail = "generic jcgm101 n=1e6: ";
    const SummaryCheck check{6.06, 0.01, 1.07, 0.01, 4.50, 8.06, 0.02};
    bool ok = check_summary(summary, check, detail);
    detail += fmt(" runtime=%.2fs", seconds);
    ok = ok && seconds < 10.0;
    report(1, ok, detail);
}

// 2. Same tolerances for the virtual-experiment engine at y0 = 50/8.5 and
//    y0 = -100. Returns the two sample sets for criterion 3.
std::pair<SampleSet, SampleSet> criterion_2() {
    const Scenario sc = generic_example();
    SampleSet a = run_scenario(sc, EngineKind::McVe, config(1000000, 43, 50.0 / 8.5));
    SampleSet b = run_scenario(sc, EngineKind::McVe, config(1000000, 43, -100.0));

    const SummaryCheck check{6.06, 0.01, 1.07, 0.01, 4.50, 8.06, 0.02};
    std::string detail = "mc-ve y0=50/8.5: ";
    bool ok = check_summary(summarize(a), check, detail);
    detail += " | y0=-100: ";
    ok = check_summary(summarize(b), check, detail) && ok;
    report(2, ok, detail);
    return {std::move(a), std::move(b)};
}

// 3. With common random numbers the two runs above agree elementwise to 1e-9
//    relative.
void criterion_3(const SampleSet& a, const SampleSet& b) {
    double worst = 0.0;
    const std::size_t n = std::min(a.values.size(), b.values.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double scale = std::max(std::abs(a.values[i]), std::abs(b.values[i]));
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]) / scale);
    }
    const bool ok = a.values.size() == b.values.size() && worst <= 1e-9;
    report(3, ok, fmt("y0-invariance: worst elementwise relative gap = %.3g", worst));
}

// 4. The engine's sample moments match the analytic oracle: mean within
//    5 * (1.0756 / sqrt(n)) of 6.0614, std within 1% of 1.0756, and both
//    consistent with the exact closed-form moments.
void criterion_4() {
    const auto [true_mean, true_std] = generic_true_moments();
    const Scenario sc = generic_example();
    const std::size_t n = 1000000;
    const SampleSet samples = run_scenario(sc, EngineKind::Jcgm101, config(n, 42, 0.0));
    const double mean = sample_mean(samples.values);
    const double std_dev = sample_std(samples.values);
    const double mean_tol = 5.0 * 1.0756 / std::sqrt(static_cast<double>(n));
    const bool ok = std::abs(mean - 6.0614) <= mean_tol &&
                    std::abs(std_dev - 1.0756) <= 0.01 * 1.0756 &&
                    std::abs(mean - true_mean) <= mean_tol &&
                    std::abs(std_dev - true_std) <= 0.01 * true_std;
    report(4, ok,
           fmt("analytic oracle: |mean-6.0614|=%.2g (tol %.2g), |std-1.0756|=%.2g (tol %.2g), "
               "closed form mean=%.4f std=%.4f",
               std::abs(mean - 6.0614), mean_tol, std::abs(std_dev - 1.0756), 0.01 * 1.0756,
               true_mean, true_std));
}

// 5. Conditional law at z = 7, m = 1, mean 50, variance 1: both the direct
//    conditional sampler and the virtual-experiment path at frozen z give
//    mean 6.25 +- 0.002 and std 0.125 +- 0.002 over 1e5 repetitions.
void criterion_5() {
    const Scenario sc = generic_example();
    const std::vector<double> z = {7.0};
    RandomStream stream = derive_substream(271828, 0);
    const SampleSet direct = sample_conditional(z, sc.ve, sc.data, 100000, stream);
    const double direct_mean = sample_mean(direct.values);
    const double direct_std = sample_std(direct.values);

    const VirtualExperiment frozen(
        [](double y, std::span<const double>) { return 8.0 * y; }, {}, 1.0);
    const SampleSet engine_path =
        run_mc_ve(frozen, sc.data, TypeBSpec(), config(100000, 271829, 3.0));
    const double path_mean = sample_mean(engine_path.values);
    const double path_std = sample_std(engine_path.values);

    const bool ok = std::abs(direct_mean - 6.25) <= 0.002 && std::abs(direct_std - 0.125) <= 0.002 &&
                    std::abs(path_mean - 6.25) <= 0.002 && std::abs(path_std - 0.125) <= 0.002;
    report(5, ok,
           fmt("conditional law: sampler mean=%.4f std=%.4f | engine path mean=%.4f std=%.4f",
               direct_mean, direct_std, path_mean, path_std));
}

// 6. Mass calibration, both engines at n = 1e6: summary matches the reference
//    statistics (1.23, 0.0741, [1.09, 1.38]).
void criterion_6() {
    const Scenario sc = mass_calibration();
    const SummaryCheck check{1.23, 0.005, 0.0741, 0.0015, 1.09, 1.38, 0.01};

    std::string detail = "mass jcgm101: ";
    const SampleSet a = run_scenario(sc, EngineKind::Jcgm101, config(1000000, 7, 0.0));
    bool ok = check_summary(summarize(a), check, detail);

    detail += " | mc-ve: ";
    const SampleSet b = run_scenario(sc, EngineKind::McVe, config(1000000, 8, 1.0));
    ok = check_summary(summarize(b), check, detail) && ok;
    report(6, ok, detail);
}

// 7. Engine equivalence: for both scenarios, a KS test at alpha = 0.001 plus
//    a 5-sigma mean check passes for at least 19 of 20 fixed seed pairs.
void criterion_7() {
    bool ok = true;
    std::string detail = "engine equivalence:";
    for (const Scenario& sc : {generic_example(), mass_calibration()}) {
        int passes = 0;
        for (int k = 1; k <= 20; ++k) {
            const SampleSet a =
                run_scenario(sc, EngineKind::Jcgm101, config(100000, 1000 + k, 0.0));
            const SampleSet b =
                run_scenario(sc, EngineKind::McVe, config(100000, 2000 + k, sc.default_y0));
            const KsResult ks = ks_two_sample(a.values, b.values, 0.001);
            const MomentComparison moments = moment_equivalence(a.values, b.values);
            if (ks.pass && std::abs(moments.mean_diff_sigmas) <= 5.0) ++passes;
        }
        detail += fmt(" %s %d/20", sc.id.c_str(), passes);
        ok = ok && passes >= 19;
    }
    report(7, ok, detail);
}

// 8. Class-membership guard: a quadratic kernel fails scenario loading with an
//    affinity violation, while the two shipped kernels pass the check on every
//    probe set from the worked examples.
void criterion_8() {
    bool quad_rejected = false;
    const fs::path quad_path = fs::temp_directory_path() / "vemc_acceptance_quad.json";
    testutil::write_file(quad_path.string(), R"({
      "id": "quad",
      "kernel": "y*y",
      "type_b": [],
      "data": {"mean": 1.0, "count": 1, "variance": 1.0},
      "default_y0": 1.0
    })");
    try {
        (void)load_scenario(quad_path);
    } catch (const AffinityError&) {
        quad_rejected = true;
    } catch (...) {
    }
    fs::remove(quad_path);

    const std::vector<std::vector<double>> probe_sets = {
        {0.0, 1.0, 2.0}, {-1.0, 0.0, 3.0}, {0.0, 100.0, 200.0}, {-7.0, 13.0, 40.0, -2.5}};
    bool accepts = true;
    const Scenario generic = generic_example();
    const Scenario mass = mass_calibration();
    std::mt19937 rng(808);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& probes : probe_sets) {
        for (int rep = 0; rep < 25; ++rep) {
            const std::vector<double> gz = {5.0 + 5.0 * unit(rng)};
            accepts = accepts && check_affine(generic.ve, gz, probes).ok;
            const std::vector<double> mz = {1e5 - 0.15 + 0.3 * unit(rng), 1.1 + 0.2 * unit(rng),
                                            7000.0 + 2000.0 * unit(rng),
                                            7950.0 + 100.0 * unit(rng)};
            accepts = accepts && check_affine(mass.ve, mz, probes).ok;
        }
    }

    // y*y must also fail the direct check on a sign-spanning probe set
    const VirtualExperiment square(
        [](double y, std::span<const double>) { return y * y; }, {}, 1.0);
    const std::vector<double> empty;
    bool square_rejected = true;
    for (const auto& probes : probe_sets) {
        square_rejected = square_rejected && !check_affine(square, empty, probes).ok;
    }

    const bool ok = quad_rejected && accepts && square_rejected;
    report(8, ok,
           fmt("class guard: quadratic load rejected=%d, shipped kernels accepted=%d, "
               "quadratic check rejected=%d",
               quad_rejected, accepts, square_rejected));
}

// 9. The coverage-interval implementation matches exhaustive window search on
//    1000 random arrays (exact endpoint equality).
void criterion_9() {
    std::mt19937 rng(424242);
    std::uniform_int_distribution<int> size_dist(2, 1000);
    std::uniform_real_distribution<double> p_dist(0.02, 0.98);
    std::normal_distribution<double> body(0.0, 10.0);
    int mismatches = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = size_dist(rng);
        std::vector<double> values(n);
        for (double& v : values) {
            v = body(rng);
            if (rng() % 5 == 0) v = std::round(v);
        }
        std::sort(values.begin(), values.end());
        const double p = p_dist(rng);
        const auto got = shortest_coverage_interval(values, p);
        const auto expected = testutil::brute_force_shortest_interval(values, p);
        if (got != expected) ++mismatches;
    }
    report(9, mismatches == 0,
           fmt("coverage interval vs exhaustive search: %d/1000 mismatches", mismatches));
}

// 10. Identical CLI invocations produce byte-identical reports (wall time
//     excluded) regardless of the worker count.
void criterion_10() {
    const std::string cli = VEMC_CLI_PATH;
    const fs::path dir = fs::temp_directory_path() / "vemc_acceptance_cli";
    fs::create_directories(dir);

    const auto run_to = [&](const std::string& args, const std::string& name) {
        const std::string out = (dir / name).string();
        const auto result = testutil::run_command(cli + " " + args + " --out " + out + " 2>/dev/null");
        if (result.exit_code != 0) return std::string();
        return testutil::strip_lines_containing(testutil::read_file(out), "wall_time");
    };

    const std::string generic_args = "run --scenario generic --engine mc-ve --n 100000 --seed 5";
    const std::string r1 = run_to(generic_args + " --workers 1", "g1.json");
    const std::string r1b = run_to(generic_args + " --workers 1", "g1b.json");
    const std::string r8 = run_to(generic_args + " --workers 8", "g8.json");

    const std::string mass_args = "run --scenario mass_calibration --engine jcgm101 --n 20000 --seed 6";
    const std::string m1 = run_to(mass_args + " --workers 1", "m1.json");
    const std::string m8 = run_to(mass_args + " --workers 8", "m8.json");

    fs::remove_all(dir);
    const bool ok = !r1.empty() && r1 == r1b && r1 == r8 && !m1.empty() && m1 == m8;
    report(10, ok, fmt("CLI determinism across reruns and worker counts: %s", ok ? "byte-identical" : "mismatch"));
}

} // namespace

int main() {
    criterion_1();
    auto [mcve_a, mcve_b] = criterion_2();
    criterion_3(mcve_a, mcve_b);
    mcve_a.values.clear();
    mcve_b.values.clear();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criterion(s) failed\n", g_failures);
    }
    return g_failures == 0 ? 0 : 1;
}
