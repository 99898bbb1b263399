#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include "vemc/engines.hpp"
#include "vemc/model.hpp"

namespace vemc {

/// A self-contained measurement problem: forward kernel (as an expression
/// over "y" and the influence names), influence distributions, observed-data
/// summary, and a default hypothetical measurand.
struct Scenario {
    std::string id;
    std::string kernel_text;
    VirtualExperiment ve; ///< compiled kernel; noise variance equals data.variance
    TypeBSpec type_b;
    MeasurementData data;
    double default_y0;
    std::optional<std::string> units;
    std::optional<std::string> notes;
};

/// Validate and assemble a scenario: names and kernel identifiers must agree,
/// "y" must appear in the kernel, and a seeded pilot draw must pass the
/// affine-in-measurand check.
Scenario make_scenario(std::string id, std::string kernel_text, TypeBSpec type_b,
                       MeasurementData data, double default_y0,
                       std::optional<std::string> units = std::nullopt,
                       std::optional<std::string> notes = std::nullopt);

/// Built-in example: kernel (1+z)*y with Z ~ U(5, 10), a single observation
/// 50 with unit variance, default y0 = 50/8.5.
Scenario generic_example();

/// Closed-form mean and standard deviation of the measurand distribution of
/// generic_example(): with w = 1/(1+Z), mean = 50 E[w] = 50 ln(11/6)/5 and
/// E[Y^2] = E[x'^2] E[w^2] = (50^2 + 1)(1/6 - 1/11)/5.
std::pair<double, double> generic_true_moments();

/// Built-in example: buoyancy-corrected mass calibration with four influence
/// quantities, five observations with mean 1.2345 mg, known variance
/// 0.001 mg^2, default y0 = 1 mg.
Scenario mass_calibration();

/// Parse a scenario from its JSON serialization. The schema is strict:
/// unknown fields are errors.
Scenario parse_scenario(const std::string& json_text);

Scenario load_scenario(const std::filesystem::path& path);

/// Canonical JSON form; load/parse of the result reproduces the scenario.
std::string serialize_scenario(const Scenario& scenario);

/// Run an engine on a scenario and stamp the scenario id into the result.
SampleSet run_scenario(const Scenario& scenario, EngineKind kind, const EngineConfig& cfg);

} // namespace vemc
