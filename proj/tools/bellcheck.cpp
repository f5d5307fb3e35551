// Copyright 2026 The bellcheck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bellcheck: three-qubit Bell-test analysis from the command line.
//
//   bellcheck bounds    --expr mermin3
//   bellcheck quantum   --v 0.71
//   bellcheck simulate  --quantum-v 0.71 --shots 100000 --seed 7 --out data.json
//   bellcheck compare   data.json
//   bellcheck reproduce
//
// Every subcommand accepts --config FILE (a JSON object keyed by long flag
// names; explicit flags win) and --json FILE ("-" for stdout).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bellcheck/bellcheck.hpp"

namespace {

using namespace bellcheck;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitChecksFailed = 4;

// Human-readable output; moves to stderr when the JSON report goes to stdout.
std::FILE *text_out = stdout;

constexpr const char *kBuiltinExpression = "mermin3";
constexpr const char *kBuiltinModel = "uniform";

/// Usage problems detected after CLI11 parsing succeeded.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("", "cannot open " + path);
    }
    return parse_json(in, path);
}

void write_text_file(const std::string &path, const std::string &text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("", "cannot write " + path);
    }
    out << text;
    if (!out) {
        throw FormatError("", "failed writing " + path);
    }
}

void emit_json(const std::optional<std::string> &path, const Json &j) {
    if (path) {
        write_text_file(*path, j.dump(2) + "\n");
    }
}

// Built-in names resolve before file paths; "./mermin3" forces the file.
BellExpression resolve_expression(const std::string &source) {
    if (source == kBuiltinExpression) {
        return mermin3().expression;
    }
    return expression_from_json(read_json_file(source));
}

SettingsAssignment resolve_assignment(const std::optional<std::string> &source) {
    if (!source || *source == kBuiltinExpression) {
        return mermin3().assignment;
    }
    return assignment_from_json(read_json_file(*source));
}

LhvModel resolve_model(const std::string &source, const Shape &shape) {
    if (source == kBuiltinModel) {
        return LhvModel::uniform(shape);
    }
    return model_from_json(read_json_file(source));
}

std::string tuple_label(const SettingTuple &t) {
    return std::to_string(t[0]) + "," + std::to_string(t[1]) + "," + std::to_string(t[2]);
}

void print_correlations(const CorrelationTable &table) {
    std::fprintf(text_out, "  %-9s %16s\n", "settings", "E");
    for (std::size_t n = 0; n < table.size(); ++n) {
        std::fprintf(text_out, "  %-9s %16.12f\n", tuple_label(table.shape().tuple(n)).c_str(), table[n]);
    }
}

void print_estimates(const EstimateTable &table) {
    std::fprintf(text_out, "  %-9s %16s %14s\n", "settings", "E", "stderr");
    for (std::size_t n = 0; n < table.size(); ++n) {
        std::fprintf(text_out, "  %-9s %16.12f %14.12f\n", tuple_label(table.shape().tuple(n)).c_str(),
                    table[n].mean, table[n].standard_error);
    }
}

Json instruction_set_json(const InstructionSet &s) {
    return {{"index", s.index()}, {"outcomes", s.table()}};
}

// Prepends the contents of a --config JSON file to the subcommand's own
// arguments. Options take their last value, so explicit flags override it.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::optional<std::string> config;
    for (std::size_t n = 1; n < args.size(); ++n) {
        if (args[n] == "--config" && n + 1 < args.size()) {
            config = args[n + 1];
        } else if (args[n].rfind("--config=", 0) == 0) {
            config = args[n].substr(9);
        }
    }
    if (!config || args.size() < 2) {
        return args;
    }
    const Json j = read_json_file(*config);
    if (!j.is_object()) {
        throw FormatError("", *config + ": config must be a JSON object");
    }
    std::vector<std::string> injected;
    for (const auto &[key, value] : j.items()) {
        if (key == "config") {
            continue;
        }
        if (value.is_boolean()) {
            if (value.get<bool>()) {
                injected.push_back("--" + key);
            }
        } else if (value.is_string()) {
            injected.push_back("--" + key);
            injected.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            injected.push_back("--" + key);
            injected.push_back(value.dump());
        } else {
            throw FormatError("/" + key, "config values must be strings, numbers or booleans");
        }
    }
    args.insert(args.begin() + 2, injected.begin(), injected.end());
    return args;
}

struct Common {
    std::optional<std::string> json_path;
    std::string config_path;

    void attach(CLI::App *cmd) {
        cmd->add_option("--json", json_path, "Write the machine-readable report here (- for stdout)");
        cmd->add_option("--config", config_path, "JSON file of default flag values");
    }
};

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
    Common common;
    std::string expr = kBuiltinExpression;
    std::uint64_t cap = kDefaultStrategyCap;
};

int run_bounds(const BoundsArgs &a) {
    const BellExpression expr = resolve_expression(a.expr);
    const LhvBound lhv = lhv_bound(expr, a.cap);
    const double algebraic = algebraic_bound(expr);

    std::fprintf(text_out, "expression      %s  (settings %s)\n", a.expr.c_str(), to_string(expr.shape()).c_str());
    std::fprintf(text_out, "lhv bound       %.12g\n", lhv.value);
    std::fprintf(text_out, "algebraic bound %.12g\n", algebraic);
    std::fprintf(text_out, "witness         strategy #%llu\n",
                static_cast<unsigned long long>(lhv.witness.index()));
    const auto table = lhv.witness.table();
    for (std::size_t p = 0; p < kParties; ++p) {
        std::fprintf(text_out, "  party %zu:", p + 1);
        for (int v : table[p]) {
            std::fprintf(text_out, " %+d", v);
        }
        std::fprintf(text_out, "\n");
    }
    emit_json(a.common.json_path, {{"expression", to_json(expr)},
                                   {"lhv_bound", round12(lhv.value)},
                                   {"algebraic_bound", round12(algebraic)},
                                   {"witness", instruction_set_json(lhv.witness)}});
    return kExitOk;
}

// ---------------------------------------------------------------- quantum

struct QuantumArgs {
    Common common;
    double v = 0.0;
    std::string expr = kBuiltinExpression;
    std::optional<std::string> assignment;
    std::size_t search_restarts = 0;
    std::size_t search_iterations = 200;
    std::uint64_t seed = 1;
};

int run_quantum(const QuantumArgs &a) {
    const Visibility v(a.v);
    const BellExpression expr = resolve_expression(a.expr);
    const SettingsAssignment assign = resolve_assignment(a.assignment);
    assign.require_shape(expr.shape());
    const QuantumState state = mix(ghz_state(), white_noise_state(), v);
    const CorrelationTable table = quantum_correlations(state, assign);
    const double value = evaluate(expr, table);

    std::fprintf(text_out, "state: %.12g * GHZ + %.12g * 1/8\n", v.value(), v.complement());
    print_correlations(table);
    std::fprintf(text_out, "Bell value B = %.12g\n", value);

    Json report = {{"visibility", round12(v.value())},
                   {"assignment", to_json(assign)},
                   {"correlations", to_json(table)},
                   {"bell_value", round12(value)}};
    if (a.search_restarts > 0) {
        const auto best = optimize_settings(expr, state, a.search_restarts, a.search_iterations, a.seed);
        std::fprintf(text_out, "settings search (%zu restarts): best B = %.12g\n", a.search_restarts, best.value);
        report["search"] = {{"restarts", a.search_restarts},
                            {"iterations", a.search_iterations},
                            {"seed", a.seed},
                            {"best_value", round12(best.value)},
                            {"assignment", to_json(best.assignment)}};
    }
    emit_json(a.common.json_path, report);
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    Common common;
    std::optional<double> quantum_v;
    std::optional<std::string> lhv;
    std::uint64_t shots = 100000;
    std::uint64_t seed = 1;
    std::string out;
    std::string expr = kBuiltinExpression;
    std::optional<std::string> assignment;
};

int run_simulate(const SimulateArgs &a) {
    if (a.quantum_v.has_value() == a.lhv.has_value()) {
        throw UsageError("simulate needs exactly one of --quantum-v or --lhv");
    }
    if (a.shots == 0) {
        throw std::invalid_argument("--shots must be at least 1");
    }
    const BellExpression expr = resolve_expression(a.expr);
    const SettingsAssignment assign = resolve_assignment(a.assignment);
    const ExperimentConfig config{a.shots, a.seed, assign, expr};
    config.validate();

    std::string source;
    const Dataset data = [&] {
        if (a.quantum_v) {
            const Visibility v(*a.quantum_v);
            source = "quantum visibility " + std::to_string(v.value());
            return simulate_quantum(mix(ghz_state(), white_noise_state(), v), config);
        }
        source = "lhv " + *a.lhv;
        return simulate_lhv(resolve_model(*a.lhv, assign.shape()), config);
    }();
    write_text_file(a.out, to_json(data).dump(2) + "\n");

    const EstimateTable estimates = estimate_correlations(data);
    const BellEstimate bell = estimate_bell(expr, estimates);
    std::fprintf(text_out, "source %s, %llu shots per setting, seed %llu -> %s\n", source.c_str(),
                static_cast<unsigned long long>(a.shots), static_cast<unsigned long long>(a.seed),
                a.out.c_str());
    print_estimates(estimates);
    std::fprintf(text_out, "Bell value B = %.12g +- %.12g\n", bell.value, bell.standard_error);

    emit_json(a.common.json_path, {{"dataset", a.out},
                                   {"shots_per_setting", a.shots},
                                   {"seed", a.seed},
                                   {"estimates", to_json(estimates)},
                                   {"bell_estimate",
                                    {{"value", round12(bell.value)},
                                     {"stderr", round12(bell.standard_error)}}}});
    return kExitOk;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
    Common common;
    std::optional<std::string> dataset;
    std::optional<std::string> table;
    std::string expr = kBuiltinExpression;
    std::optional<std::string> assignment;
    std::size_t max_iterations = 10000;
    double tolerance = 1e-8;
};

void print_report(const ComparisonReport &r) {
    std::fprintf(text_out, "  %-9s %12s %12s %12s\n", "settings", "observed", "quantum", "lhv");
    for (std::size_t n = 0; n < r.observed.size(); ++n) {
        std::fprintf(text_out, "  %-9s %12.8f %12.8f %12.8f\n", tuple_label(r.observed.shape().tuple(n)).c_str(),
                    r.observed[n], r.quantum_prediction[n], r.lhv_prediction[n]);
    }
    std::fprintf(text_out, "quantum family: V = %.8f +- %.8f, residual %.12g\n", r.quantum_fit.visibility,
                r.quantum_fit.standard_error, r.quantum_fit.residual);
    std::fprintf(text_out, "lhv family:     residual %.12g (%zu iterations, gap %.3g), fitted B = %.12g\n",
                r.lhv_fit.residual, r.lhv_fit.iterations_used, r.lhv_fit.duality_gap,
                r.lhv_bell_value);
    std::fprintf(text_out, "Mermin estimate: %.12g +- %.12g\n", r.mermin_estimate.value,
                r.mermin_estimate.standard_error);
    std::fprintf(text_out, "verdict: %s\n", to_string(r.verdict).c_str());
}

std::string sibling_report_path(const std::string &input) {
    std::filesystem::path p(input);
    p.replace_extension();
    return p.string() + ".compare.json";
}

int run_compare(const CompareArgs &a) {
    if (a.dataset.has_value() == a.table.has_value()) {
        throw UsageError("compare needs exactly one of a dataset path or --table");
    }
    const BellExpression expr = resolve_expression(a.expr);
    std::optional<SettingsAssignment> assign;
    std::optional<EstimateTable> estimates;
    if (a.dataset) {
        const Dataset data = dataset_from_json(read_json_file(*a.dataset));
        assign = a.assignment ? resolve_assignment(a.assignment) : data.assignment();
        estimates = estimate_correlations(data);
    } else {
        std::ifstream in(*a.table);
        if (!in) {
            throw FormatError("", "cannot open " + *a.table);
        }
        assign = resolve_assignment(a.assignment);
        estimates = read_correlation_csv(in, assign->shape());
    }
    const ComparisonReport report =
        compare_estimates(*estimates, expr, *assign, {a.max_iterations, a.tolerance});
    print_report(report);

    const std::string json_path =
        a.common.json_path.value_or(sibling_report_path(a.dataset ? *a.dataset : *a.table));
    emit_json(json_path, to_json(report));
    if (json_path != "-") {
        std::fprintf(text_out, "report written to %s\n", json_path.c_str());
    }
    return kExitOk;
}

// ---------------------------------------------------------------- reproduce

struct ReproduceArgs {
    Common common;
    std::uint64_t seed = 2005;
    std::uint64_t shots = 100000;
    double sigmas = 5.0;
};

struct Check {
    std::string name;
    double value;
    double expected;
    double tolerance;
    bool pass;
};

int run_reproduce(const ReproduceArgs &a) {
    if (a.shots == 0) {
        throw std::invalid_argument("--shots must be at least 1");
    }
    const BellScenario mermin = mermin3();
    const QuantumState ghz = ghz_state();
    const QuantumState noise = white_noise_state();
    const QuantumState rho = mix(ghz, noise, Visibility(0.71));

    std::vector<Check> checks;
    auto check = [&](std::string name, double value, double expected, double tol) {
        checks.push_back({std::move(name), value, expected, tol, std::abs(value - expected) <= tol});
    };

    const double lhv = lhv_bound(mermin.expression).value;
    const double algebraic = algebraic_bound(mermin.expression);
    const double pure = quantum_value(mermin.expression, ghz, mermin.assignment);
    const double noisy = quantum_value(mermin.expression, rho, mermin.assignment);
    double noise_max = 0.0;
    const CorrelationTable noise_table = quantum_correlations(noise, mermin.assignment);
    for (double e : noise_table.values()) {
        noise_max = std::max(noise_max, std::abs(e));
    }
    check("lhv_bound", lhv, 2.0, 0.0);
    check("algebraic_bound", algebraic, 4.0, 0.0);
    check("quantum_value_pure_ghz", pure, 4.0, 1e-12);
    check("quantum_value_v071", noisy, 2.84, 1e-12);
    check("white_noise_max_abs_correlation", noise_max, 0.0, 1e-12);

    const ExperimentConfig config{a.shots, a.seed, mermin.assignment, mermin.expression};
    const Dataset data = simulate_quantum(rho, config);
    const ComparisonReport report = compare_models(data, mermin.expression, mermin.assignment);
    const BellEstimate &est = report.mermin_estimate;
    check("simulated_mermin_estimate", est.value, 2.84, a.sigmas * est.standard_error);
    checks.push_back({"verdict_quantum_closer", report.quantum_fit.residual,
                      report.lhv_fit.residual, 0.0, report.verdict == Verdict::quantum_closer});
    checks.push_back({"fitted_lhv_bell_value_at_most_2", report.lhv_bell_value, 2.0, 1e-9,
                      report.lhv_bell_value <= 2.0 + 1e-9});

    bool all = true;
    Json check_json = Json::array();
    for (const auto &c : checks) {
        all = all && c.pass;
        std::fprintf(text_out, "[%s] %-34s %.12g (expected %.12g, tol %.3g)\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.value, c.expected, c.tolerance);
        check_json.push_back({{"name", c.name},
                              {"value", round12(c.value)},
                              {"expected", round12(c.expected)},
                              {"tolerance", c.tolerance},
                              {"pass", c.pass}});
    }
    std::fprintf(text_out, "verdict on simulated data: %s\n", to_string(report.verdict).c_str());

    emit_json(a.common.json_path,
              {{"values",
                {{"lhv_bound", round_decimals(lhv)},
                 {"algebraic_bound", round_decimals(algebraic)},
                 {"quantum_value_pure_ghz", round_decimals(pure)},
                 {"quantum_value_v071", round_decimals(noisy)},
                 {"white_noise_max_abs_correlation", round_decimals(noise_max)}}},
               {"simulation",
                {{"seed", a.seed},
                 {"shots_per_setting", a.shots},
                 {"visibility", 0.71},
                 {"comparison", to_json(report)}}},
               {"checks", check_json},
               {"passed", all}});
    if (!all) {
        std::fprintf(stderr, "reproduction failed:");
        for (const auto &c : checks) {
            if (!c.pass) {
                std::fprintf(stderr, " %s", c.name.c_str());
            }
        }
        std::fprintf(stderr, "\n");
        return kExitChecksFailed;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Three-qubit Bell-test analysis: bounds, quantum predictions, simulation and "
                 "model comparison"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

    BoundsArgs bounds;
    auto *bounds_cmd = app.add_subcommand("bounds", "Local and algebraic bounds of an expression");
    bounds.common.attach(bounds_cmd);
    bounds_cmd->add_option("--expr", bounds.expr, "Built-in name (mermin3) or expression JSON file");
    bounds_cmd->add_option("--cap", bounds.cap, "Maximum number of strategies to enumerate");

    QuantumArgs quantum;
    auto *quantum_cmd = app.add_subcommand("quantum", "Correlations and Bell value of V*GHZ + (1-V)/8");
    quantum.common.attach(quantum_cmd);
    quantum_cmd->add_option("--v", quantum.v, "Visibility in [0, 1]")->required();
    quantum_cmd->add_option("--expr", quantum.expr, "Built-in name or expression JSON file");
    quantum_cmd->add_option("--assignment", quantum.assignment, "Settings assignment JSON file");
    quantum_cmd->add_option("--search-restarts", quantum.search_restarts,
                            "Also search for better settings with this many random restarts");
    quantum_cmd->add_option("--search-iterations", quantum.search_iterations,
                            "Sweeps per restart in the settings search");
    quantum_cmd->add_option("--seed", quantum.seed, "Root seed for the settings search");

    SimulateArgs simulate;
    auto *simulate_cmd = app.add_subcommand("simulate", "Generate a click-count dataset");
    simulate.common.attach(simulate_cmd);
    simulate_cmd->add_option("--quantum-v", simulate.quantum_v, "Simulate V*GHZ + (1-V)/8");
    simulate_cmd->add_option("--lhv", simulate.lhv, "Simulate an LHV model (uniform or model JSON)");
    simulate_cmd->add_option("--shots", simulate.shots, "Shots per setting tuple");
    simulate_cmd->add_option("--seed", simulate.seed, "Root seed");
    simulate_cmd->add_option("--out", simulate.out, "Dataset JSON output path")->required();
    simulate_cmd->add_option("--expr", simulate.expr, "Built-in name or expression JSON file");
    simulate_cmd->add_option("--assignment", simulate.assignment, "Settings assignment JSON file");

    CompareArgs compare;
    auto *compare_cmd = app.add_subcommand("compare", "Noisy-GHZ vs instruction-set fit of data");
    compare.common.attach(compare_cmd);
    compare_cmd->add_option("dataset", compare.dataset, "Dataset JSON file");
    compare_cmd->add_option("--table", compare.table, "Correlation CSV (i,j,k,E,stderr) instead");
    compare_cmd->add_option("--expr", compare.expr, "Built-in name or expression JSON file");
    compare_cmd->add_option("--assignment", compare.assignment,
                            "Settings assignment JSON (defaults to the dataset's, or mermin3)");
    compare_cmd->add_option("--max-iterations", compare.max_iterations, "Frank-Wolfe iteration cap");
    compare_cmd->add_option("--tolerance", compare.tolerance, "Frank-Wolfe duality-gap tolerance");

    ReproduceArgs reproduce;
    auto *reproduce_cmd = app.add_subcommand("reproduce", "Check the headline numbers end to end");
    reproduce.common.attach(reproduce_cmd);
    reproduce_cmd->add_option("--seed", reproduce.seed, "Seed of the simulated run");
    reproduce_cmd->add_option("--shots", reproduce.shots, "Shots per setting tuple");
    reproduce_cmd->add_option("--sigmas", reproduce.sigmas,
                              "Statistical check tolerance in standard errors");

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = expand_config(std::move(args));
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        try {
            app.parse(std::move(reversed));
        } catch (const CLI::ParseError &e) {
            const int code = app.exit(e);
            return code == 0 ? kExitOk : kExitUsage;
        }
        for (const Common *c : {&bounds.common, &quantum.common, &simulate.common, &compare.common,
                                &reproduce.common}) {
            if (c->json_path == "-") {
                text_out = stderr;
            }
        }

        if (*bounds_cmd) {
            return run_bounds(bounds);
        }
        if (*quantum_cmd) {
            return run_quantum(quantum);
        }
        if (*simulate_cmd) {
            return run_simulate(simulate);
        }
        if (*compare_cmd) {
            return run_compare(compare);
        }
        if (*reproduce_cmd) {
            return run_reproduce(reproduce);
        }
    } catch (const UsageError &e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const FormatError &e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return kExitUsage;
}
