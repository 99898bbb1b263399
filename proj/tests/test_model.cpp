#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "vemc/model.hpp"

using namespace vemc;

namespace {

VirtualExperiment generic_ve(double noise_variance = 1.0) {
    return VirtualExperiment::from_expression("(1+z)*y", {"z"}, noise_variance);
}

VirtualExperiment mass_ve() {
    return VirtualExperiment::from_expression(
        "(y + 100000)/(1 + (rho_a - 1.2)*(1/rho_W - 1/rho_R)) - m_Rc",
        {"m_Rc", "rho_a", "rho_W", "rho_R"}, 0.001);
}

} // namespace

TEST_CASE("measurement data invariants") {
    CHECK_NOTHROW(MeasurementData(50.0, 1, 1.0));
    CHECK_THROWS_AS(MeasurementData(50.0, 0, 1.0), ConfigError);
    CHECK_THROWS_AS(MeasurementData(50.0, 1, 0.0), ConfigError);
    CHECK_THROWS_AS(MeasurementData(50.0, 1, -1.0), ConfigError);
    CHECK_THROWS_AS(MeasurementData(NAN, 1, 1.0), ConfigError);
}

TEST_CASE("influence-quantity spec invariants") {
    CHECK_THROWS_AS(TypeBSpec({{"z", Distribution(Uniform{0, 1})},
                               {"z", Distribution(Uniform{0, 1})}}),
                    ConfigError);
    CHECK_THROWS_AS(TypeBSpec({{"2bad", Distribution(Uniform{0, 1})}}), ConfigError);
    CHECK_THROWS_AS(TypeBSpec({{"a b", Distribution(Uniform{0, 1})}}), ConfigError);
    CHECK_THROWS_AS(TypeBSpec({{"y", Distribution(Uniform{0, 1})}}), ConfigError);
    CHECK_NOTHROW(TypeBSpec());

    const TypeBSpec spec({{"b", Distribution(Uniform{0, 1})}, {"a", Distribution(Uniform{2, 3})}});
    CHECK(spec.names() == std::vector<std::string>{"b", "a"}); // declaration order kept
}

TEST_CASE("influence draws follow declaration order from one stream") {
    const TypeBSpec spec({{"u1", Distribution(Uniform{0, 1})},
                          {"g", Distribution(Gaussian{10.0, 4.0})},
                          {"u2", Distribution(Uniform{5, 6})}});
    RandomStream a = derive_substream(31, 4);
    std::vector<double> drawn(3);
    spec.sample_into(a, drawn);

    RandomStream b = derive_substream(31, 4);
    const double u1 = sample_uniform(b, 0, 1);
    const double g = sample_gaussian(b, 10.0, 4.0);
    const double u2 = sample_uniform(b, 5, 6);
    CHECK(drawn[0] == u1);
    CHECK(drawn[1] == g);
    CHECK(drawn[2] == u2);
}

TEST_CASE("forward evaluation is deterministic and positional") {
    const VirtualExperiment ve = generic_ve();
    const std::vector<double> z = {5.0};
    CHECK(eval_forward(ve, 2.0, z) == 12.0);
    CHECK(eval_forward(ve, 2.0, z) == eval_forward(ve, 2.0, z));

    const VirtualExperiment mass = mass_ve();
    const std::map<std::string, double> bindings = {
        {"m_Rc", 1e5}, {"rho_a", 1.2}, {"rho_W", 8000.0}, {"rho_R", 8000.0}};
    CHECK(eval_forward(mass, 0.0, bindings) == 0.0);
}

TEST_CASE("forward evaluation checks bindings") {
    const VirtualExperiment ve = generic_ve();
    CHECK_THROWS_AS(eval_forward(ve, 1.0, std::map<std::string, double>{}), EvalError);
    // extra bindings are fine
    CHECK(eval_forward(ve, 1.0, std::map<std::string, double>{{"z", 1.0}, {"junk", 9.0}}) == 2.0);
    const std::vector<double> wrong_arity = {1.0, 2.0};
    CHECK_THROWS_AS(ve.kernel(1.0, wrong_arity), EvalError);
}

TEST_CASE("affine extraction on the worked examples") {
    const std::vector<double> z = {5.0};
    const AffineParts generic = extract_affine(generic_ve(), z);
    CHECK(generic.delta1 == doctest::Approx(6.0));
    CHECK(generic.delta2 == doctest::Approx(0.0).epsilon(1e-12));

    // rho_a = 1.2 makes the buoyancy divisor exactly one.
    const std::vector<double> mass_z = {1e5, 1.2, 8000.0, 7990.0};
    const AffineParts mass = extract_affine(mass_ve(), mass_z);
    CHECK(mass.delta1 == doctest::Approx(1.0));
    CHECK(mass.delta2 == doctest::Approx(0.0).epsilon(1e-12));

    const VirtualExperiment plain(
        [](double y, std::span<const double>) { return 2.0 * y + 3.0; }, {}, 0.0);
    const std::vector<double> empty;
    const AffineParts p1 = extract_affine(plain, empty);
    CHECK(p1.delta1 == doctest::Approx(2.0));
    CHECK(p1.delta2 == doctest::Approx(3.0));
    const AffineParts p2 = extract_affine(plain, empty, -7.0, 13.0);
    CHECK(p2.delta1 == doctest::Approx(2.0));
    CHECK(p2.delta2 == doctest::Approx(3.0));
}

TEST_CASE("affine extraction rejects equal probes and singular coefficients") {
    const std::vector<double> empty;
    const std::vector<double> z5 = {5.0};
    CHECK_THROWS_AS(extract_affine(generic_ve(), z5, 1.0, 1.0), ConfigError);

    const VirtualExperiment constant(
        [](double, std::span<const double>) { return 5.0; }, {}, 0.0);
    CHECK_THROWS_AS(extract_affine(constant, empty), SingularModelError);

    const VirtualExperiment named(
        [](double, std::span<const double>) { return 5.0; }, {"q"}, 0.0);
    const std::vector<double> q = {3.25};
    try {
        extract_affine(named, q);
        FAIL("expected SingularModelError");
    } catch (const SingularModelError& e) {
        const std::string what = e.what();
        CHECK(what.find("q") != std::string::npos);
        CHECK(what.find("3.25") != std::string::npos);
    }
}

TEST_CASE("inversion round trip on random affine kernels") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> coef(-50.0, 50.0);
    std::uniform_real_distribution<double> yv(-20.0, 20.0);
    for (int rep = 0; rep < 200; ++rep) {
        double a = coef(rng);
        if (std::abs(a) < 0.1) a = 0.1;
        const double b = coef(rng);
        const VirtualExperiment ve(
            [a, b](double y, std::span<const double> z) { return (a + z[0]) * y + b * z[0]; },
            {"z"}, 0.0);
        const std::vector<double> z = {coef(rng) < 0 ? -0.5 : 0.5};
        const double y = yv(rng);

        const AffineParts parts = extract_affine(ve, z);
        const double x = eval_forward(ve, y, z);
        const double recovered = invert_measurement(x, parts);
        CHECK(recovered == doctest::Approx(y).epsilon(1e-10));

        // probe invariance on the affine class
        const AffineParts other = extract_affine(ve, z, -7.0, 13.0);
        CHECK(other.delta1 == doctest::Approx(parts.delta1).epsilon(1e-9));
        CHECK(other.delta2 == doctest::Approx(parts.delta2).epsilon(1e-9));
    }
}

TEST_CASE("inversion examples") {
    CHECK(invert_measurement(50.0, {6.0, 0.0}) == doctest::Approx(50.0 / 6.0));
    CHECK(invert_measurement(3.0, {17.0, 3.0}) == 0.0);
    CHECK(invert_measurement(1.2345, {1.0, 0.0}) == 1.2345);
}

TEST_CASE("affinity check accepts the in-class kernels") {
    const std::vector<double> z = {7.0};
    const std::vector<double> probes = {0.0, 1.0, 2.0};
    CHECK(check_affine(generic_ve(), z, probes).ok);

    // affine in y for fixed z even with a non-linear z term
    const VirtualExperiment shifted(
        [](double y, std::span<const double> zz) { return (1 + zz[0]) * y + zz[0] * zz[0]; },
        {"z"}, 0.0);
    const std::vector<double> wide = {-1.0, 0.0, 3.0};
    CHECK(check_affine(shifted, z, wide).ok);

    const std::vector<double> mass_z = {1e5, 1.25, 7400.0, 8010.0};
    CHECK(check_affine(mass_ve(), mass_z, probes).ok);
}

TEST_CASE("affinity check rejects non-affine kernels") {
    const std::vector<double> empty;
    const VirtualExperiment square(
        [](double y, std::span<const double>) { return y * y; }, {}, 0.0);
    const std::vector<double> probes = {0.0, 1.0, 2.0};
    const AffineCheck check = check_affine(square, empty, probes);
    CHECK_FALSE(check.ok);
    CHECK(check.worst_probe == 2.0);
    CHECK(check.worst_residual == doctest::Approx(2.0)); // 4 vs the line value 2

    const VirtualExperiment absval(
        [](double y, std::span<const double>) { return std::abs(y); }, {}, 0.0);
    const std::vector<double> sign_change = {-1.0, 0.0, 3.0};
    CHECK_FALSE(check_affine(absval, empty, sign_change).ok);

    const VirtualExperiment expish(
        [](double y, std::span<const double>) { return std::exp(y); }, {}, 0.0);
    CHECK_FALSE(check_affine(expish, empty, probes).ok);
}

TEST_CASE("affinity check accepts random members of the affine class") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> coef(-10.0, 10.0);
    for (int rep = 0; rep < 100; ++rep) {
        const double a = coef(rng);
        const double b = coef(rng);
        const VirtualExperiment ve(
            [a, b](double y, std::span<const double> z) { return (a + z[0]) * y + b + z[0]; },
            {"z"}, 0.0);
        const std::vector<double> z = {coef(rng)};
        const std::vector<double> probes = {coef(rng), coef(rng) + 5.0, coef(rng) - 3.0,
                                            coef(rng) * 2.0};
        if (probes[0] == probes[1]) continue;
        CHECK(check_affine(ve, z, probes).ok);
    }
}

TEST_CASE("affinity check requires three distinct probes") {
    const std::vector<double> z = {5.0};
    const std::vector<double> two = {0.0, 1.0};
    CHECK_THROWS_AS(check_affine(generic_ve(), z, two), ConfigError);
    const std::vector<double> dup = {0.0, 0.0, 1.0};
    CHECK_THROWS_AS(check_affine(generic_ve(), z, dup), ConfigError);
}

TEST_CASE("default affinity probes scale with the hypothetical measurand") {
    CHECK(default_affinity_probes(0.5) == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(default_affinity_probes(-100.0) == std::vector<double>{0.0, 100.0, 200.0});
}

TEST_CASE("stochastic model recovers its forward kernel at w = 0") {
    const StochasticVE sve(
        [](double y, std::span<const double> z, double w) {
            return (1 + z[0]) * y * (1.0 + 0.5 * w) + w * w;
        },
        {"z"}, NoiseLaw{"gaussian", {0.0, 1.0}});
    CHECK(sve.noise_law().family == "gaussian");

    const VirtualExperiment forward = sve.forward_model(1.0);
    const std::vector<double> z = {5.0};
    CHECK(eval_forward(forward, 2.0, z) == sve.eval(2.0, z, 0.0));
    CHECK(eval_forward(forward, 2.0, z) == 12.0);
}
