// vemc — Monte Carlo measurement-uncertainty evaluation from the command line.
//
// Exit codes: 0 success (compare: equivalent), 1 compare found the samples
// inequivalent, 2 bad flags, 3 scenario load/validation error, 4 engine or
// output error. Diagnostics go to stderr; stdout carries machine output only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vemc/scenarios.hpp"
#include "vemc/stats.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

struct BuiltinEntry {
    const char* id;
    const char* description;
    vemc::Scenario (*factory)();
};

constexpr BuiltinEntry kBuiltins[] = {
    {"generic", "affine kernel (1+z)*y with Z ~ U(5, 10), single observation 50",
     &vemc::generic_example},
    {"mass_calibration", "buoyancy-corrected mass calibration, four influence quantities (mg)",
     &vemc::mass_calibration},
};

vemc::Scenario resolve_scenario(const std::string& spec) {
    for (const BuiltinEntry& entry : kBuiltins) {
        if (spec == entry.id) return entry.factory();
    }
    return vemc::load_scenario(spec);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ordered_json summary_json(const vemc::SummaryReport& report) {
    ordered_json summary;
    summary["n"] = report.n;
    summary["mean"] = report.mean;
    summary["std"] = report.std_dev;
    summary["coverage_p"] = report.coverage_p;
    summary["ci_low"] = report.ci_low;
    summary["ci_high"] = report.ci_high;
    ordered_json bins = ordered_json::array();
    for (const vemc::HistogramBin& bin : report.histogram) {
        bins.push_back({bin.low, bin.high, bin.count});
    }
    summary["histogram"] = std::move(bins);
    return summary;
}

int write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open '" << path << "' for writing\n";
        return 4;
    }
    out << contents;
    return out.good() ? 0 : 4;
}

struct RunArgs {
    std::string scenario;
    std::string engine;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::optional<double> y0;
    double coverage = 0.95;
    unsigned workers = 1;
    bool fast_inner_loop = false;
    std::string out_path;
    std::string hist_path;
    std::string samples_path;
};

int cmd_run(const RunArgs& args) {
    vemc::EngineKind kind = vemc::EngineKind::Jcgm101;
    std::optional<vemc::Scenario> loaded;
    // Load phase: any failure here is a scenario error.
    try {
        kind = vemc::engine_from_name(args.engine);
        loaded = resolve_scenario(args.scenario);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    const vemc::Scenario& scenario = *loaded;

    try {
        vemc::EngineConfig cfg;
        cfg.n = args.n;
        cfg.master_seed = args.seed;
        cfg.y0 = args.y0.value_or(scenario.default_y0);
        cfg.literal_inner_loop = !args.fast_inner_loop;
        cfg.workers = args.workers;

        const auto t0 = std::chrono::steady_clock::now();
        const vemc::SampleSet samples = vemc::run_scenario(scenario, kind, cfg);
        const vemc::SummaryReport report = vemc::summarize(samples, args.coverage);
        const auto t1 = std::chrono::steady_clock::now();

        ordered_json result;
        result["scenario_id"] = samples.scenario_id;
        result["engine"] = std::string(vemc::engine_name(samples.engine));
        result["n"] = samples.n;
        result["master_seed"] = samples.master_seed;
        if (samples.y0) result["y0"] = *samples.y0;
        result["summary"] = summary_json(report);
        result["wall_time_seconds"] = std::chrono::duration<double>(t1 - t0).count();

        const std::string text = result.dump(2) + "\n";
        if (args.out_path.empty()) {
            std::cout << text;
        } else if (const int rc = write_text_file(args.out_path, text); rc != 0) {
            return rc;
        }

        if (!args.hist_path.empty()) {
            std::string csv = "bin_low,bin_high,count\n";
            for (const vemc::HistogramBin& bin : report.histogram) {
                csv += format_double(bin.low) + "," + format_double(bin.high) + "," +
                       std::to_string(bin.count) + "\n";
            }
            if (const int rc = write_text_file(args.hist_path, csv); rc != 0) return rc;
        }

        if (!args.samples_path.empty()) {
            std::string lines;
            lines.reserve(samples.values.size() * 20);
            for (double v : samples.values) {
                lines += format_double(v);
                lines += '\n';
            }
            if (const int rc = write_text_file(args.samples_path, lines); rc != 0) return rc;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}

std::vector<double> read_samples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw vemc::ConfigError("cannot open samples file '" + path + "'");
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double v = 0.0;
        try {
            v = std::stod(line);
        } catch (const std::exception&) {
            throw vemc::ConfigError("malformed value '" + line + "' in '" + path + "'");
        }
        if (!std::isfinite(v)) {
            throw vemc::ConfigError("non-finite value '" + line + "' in '" + path + "'");
        }
        values.push_back(v);
    }
    if (values.empty()) throw vemc::ConfigError("samples file '" + path + "' is empty");
    return values;
}

int cmd_compare(const std::string& path_a, const std::string& path_b, double alpha) {
    std::vector<double> a;
    std::vector<double> b;
    try {
        a = read_samples_file(path_a);
        b = read_samples_file(path_b);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }

    std::optional<vemc::EquivalenceReport> computed;
    try {
        computed = vemc::equivalence_report(a, b, alpha);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    const vemc::EquivalenceReport& report = *computed;
    ordered_json out;
    out["ks_stat"] = report.ks_stat;
    out["ks_critical"] = report.ks_critical;
    out["ks_pass"] = report.ks_pass;
    out["mean_diff_sigmas"] = report.mean_diff_sigmas;
    out["std_ratio"] = report.std_ratio;
    out["pass"] = report.pass;
    std::cout << out.dump(2) << '\n';
    return report.pass ? 0 : 1;
}

int cmd_scenarios_list() {
    for (const BuiltinEntry& entry : kBuiltins) {
        std::cout << entry.id << '\t' << entry.description << '\n';
    }
    return 0;
}

int cmd_scenarios_show(const std::string& id) {
    for (const BuiltinEntry& entry : kBuiltins) {
        if (id == entry.id) {
            std::cout << vemc::serialize_scenario(entry.factory()) << '\n';
            return 0;
        }
    }
    std::cerr << "error: unknown scenario '" << id << "'\n";
    return 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo measurement-uncertainty evaluation"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run an engine on a scenario and report a summary");
    run->add_option("--scenario", run_args.scenario, "Built-in scenario id or path to a scenario JSON file")
        ->required();
    run->add_option("--engine", run_args.engine, "Engine: jcgm101 or mc-ve")
        ->required()
        ->check(CLI::IsMember({"jcgm101", "mc-ve"}));
    run->add_option("--n", run_args.n, "Number of Monte Carlo runs")
        ->required()
        ->check(CLI::PositiveNumber);
    run->add_option("--seed", run_args.seed, "Master seed")->required();
    run->add_option("--y0", run_args.y0, "Hypothetical measurand for mc-ve (default: scenario's)");
    run->add_option("--coverage", run_args.coverage, "Coverage probability for the interval")
        ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
    run->add_option("--out", run_args.out_path, "Write the JSON report here instead of stdout");
    run->add_option("--hist", run_args.hist_path, "Write the histogram as CSV");
    run->add_option("--samples", run_args.samples_path, "Write raw samples, one per line");
    run->add_option("--workers", run_args.workers, "Worker threads (output is identical for any count)");
    run->add_flag("--fast-inner-loop", run_args.fast_inner_loop,
                  "Draw the mean of the inner noise in one shot instead of literally");

    std::string compare_a;
    std::string compare_b;
    double compare_alpha = 0.001;
    CLI::App* compare = app.add_subcommand("compare", "Test two sample files for equivalence");
    compare->add_option("--a", compare_a, "First samples file")->required();
    compare->add_option("--b", compare_b, "Second samples file")->required();
    compare->add_option("--alpha", compare_alpha, "KS significance level")
        ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));

    CLI::App* scenarios = app.add_subcommand("scenarios", "Inspect built-in scenarios");
    scenarios->require_subcommand(1);
    CLI::App* list = scenarios->add_subcommand("list", "List built-in scenario ids");
    std::string show_id;
    CLI::App* show = scenarios->add_subcommand("show", "Print a built-in scenario as JSON");
    show->add_option("id", show_id, "Scenario id")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (run->parsed()) return cmd_run(run_args);
    if (compare->parsed()) return cmd_compare(compare_a, compare_b, compare_alpha);
    if (scenarios->parsed()) {
        if (list->parsed()) return cmd_scenarios_list();
        if (show->parsed()) return cmd_scenarios_show(show_id);
    }
    return 2;
}
