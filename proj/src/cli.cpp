#include "gra/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gra/gram.hpp"
#include "gra/io.hpp"
#include "gra/validation.hpp"

namespace gra::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// JSON has no NaN or infinity; those become strings.
ordered_json number(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return io::format_double(v);
}

ordered_json vector_json(const Eigen::VectorXd& v) {
    ordered_json arr = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(number(v(i)));
    }
    return arr;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string read_input(const fs::path& path) {
    try {
        return io::read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

ordered_json seeds_json(const SeedBundle& s) {
    return {{"basis", s.basis},           {"candidates", s.candidates}, {"optimizer", s.optimizer},
            {"rcc", s.rcc},               {"rcct", s.rcct},             {"multistart", s.multistart},
            {"noise", s.noise}};
}

ordered_json config_json(const RunConfig& rc) {
    const ExperimentConfig& c = rc.experiment;
    ordered_json j = {{"K", c.K},
                      {"alpha_min", c.alpha_min},
                      {"alpha_max", c.alpha_max},
                      {"delta", c.delta},
                      {"u_m", c.greedy.u_m},
                      {"t_f", c.greedy.t_f},
                      {"tol", c.tol},
                      {"K_plus", c.K_plus},
                      {"n_starts", c.greedy.n_starts},
                      {"n_multistart", c.n_multistart},
                      {"radius_factor", c.radius_factor},
                      {"seed", c.master_seed},
                      {"target", rc.target},
                      {"noise_sigma", rc.noise_sigma}};
    if (rc.method) {
        j["method"] = to_string(*rc.method);
    }
    return j;
}

template <typename T>
T get_as(const json& value, const std::string& key, const std::string& source) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(source + ": key '" + key + "' has the wrong type");
    }
}

std::size_t get_count(const json& value, const std::string& key, const std::string& source) {
    if (!value.is_number_integer() || value.get<long long>() < 0) {
        throw ConfigError(source + ": key '" + key + "' must be a nonnegative integer");
    }
    return value.get<std::size_t>();
}

Method method_from(const std::string& name) {
    try {
        return parse_method(name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::vector<Method> all_methods() {
    return {Method::gra, Method::grat, Method::ogra, Method::ograt, Method::rcc, Method::rcct};
}

}  // namespace

void apply_json(RunConfig& config, const std::string& json_text, const std::string& source) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": " + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError(source + ": top level must be an object");
    }
    ExperimentConfig& c = config.experiment;
    for (const auto& [key, value] : root.items()) {
        if (key == "K") {
            c.K = get_count(value, key, source);
        } else if (key == "alpha_min") {
            c.alpha_min = get_as<double>(value, key, source);
        } else if (key == "alpha_max") {
            c.alpha_max = get_as<double>(value, key, source);
        } else if (key == "delta") {
            c.delta = get_as<double>(value, key, source);
        } else if (key == "u_m") {
            c.greedy.u_m = get_as<double>(value, key, source);
        } else if (key == "t_f" || key == "t_f_max") {
            c.greedy.t_f = get_as<double>(value, key, source);
        } else if (key == "tol") {
            c.tol = get_as<double>(value, key, source);
        } else if (key == "K_plus") {
            c.K_plus = get_count(value, key, source);
        } else if (key == "n_starts") {
            c.greedy.n_starts = get_count(value, key, source);
        } else if (key == "time_slices") {
            c.greedy.time_slices = get_count(value, key, source);
        } else if (key == "n_multistart") {
            c.n_multistart = get_count(value, key, source);
        } else if (key == "radius_factor") {
            c.radius_factor = get_as<double>(value, key, source);
        } else if (key == "relative_decrease") {
            c.solver.relative_decrease = get_as<double>(value, key, source);
        } else if (key == "max_solver_iterations") {
            c.solver.max_iterations = get_count(value, key, source);
        } else if (key == "seed") {
            if (!value.is_number_unsigned()) {
                throw ConfigError(source + ": key 'seed' must be a nonnegative integer");
            }
            c.master_seed = value.get<std::uint64_t>();
        } else if (key == "method") {
            config.method = method_from(get_as<std::string>(value, key, source));
        } else if (key == "target") {
            config.target = get_as<std::string>(value, key, source);
        } else if (key == "out") {
            config.out = get_as<std::string>(value, key, source);
        } else if (key == "noise_sigma") {
            config.noise_sigma = get_as<double>(value, key, source);
        } else {
            throw ConfigError(source + ": unknown key '" + key + "'");
        }
    }
}

RunConfig resolve_config(const Overrides& overrides) {
    RunConfig config;
    if (overrides.config) {
        apply_json(config, read_input(*overrides.config), overrides.config->string());
    }
    if (overrides.seed) {
        config.experiment.master_seed = *overrides.seed;
    }
    if (overrides.out) {
        config.out = *overrides.out;
    }
    if (overrides.method) {
        config.method = method_from(*overrides.method);
    }
    if (overrides.target) {
        config.target = *overrides.target;
    }
    if (!(config.noise_sigma >= 0.0)) {
        throw ConfigError("noise_sigma must be nonnegative");
    }
    try {
        config.experiment.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return config;
}

ProbabilityDistribution load_target(const RunConfig& config) {
    const AlphaGrid grid = config.experiment.grid();
    if (config.target == "double-peak" || config.target == "double_peak" || config.target == "step") {
        return named_target(config.target, grid);
    }
    if (config.target == "uniform") {
        return uniform_distribution(grid.size());
    }
    const fs::path path(config.target);
    if (!fs::exists(path)) {
        throw ConfigError("unknown target '" + config.target + "' (not a named target or an existing file)");
    }
    const io::DistributionTable table = io::parse_distribution_csv(read_input(path), path.string());
    if (table.alphas.size() != grid.size()) {
        throw ConfigError(path.string() + ": " + std::to_string(table.alphas.size()) + " rows, grid has " +
                          std::to_string(grid.size()) + " points");
    }
    for (std::size_t l = 0; l < grid.size(); ++l) {
        if (std::abs(table.alphas[l] - grid.alphas[l]) > 1e-9) {
            throw ConfigError(path.string() + ":" + std::to_string(l + 2) + ": alpha differs from the grid");
        }
    }
    try {
        return ProbabilityDistribution(table.p);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string basis_hash(const BasisSet& basis) {
    std::uint64_t h = 14695981039346656037ULL;
    const Eigen::MatrixXd& f = basis.functions;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double v = f.data()[i];
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int cmd_design(const RunConfig& config, std::ostream& log) {
    const Method method = config.method.value_or(Method::gra);
    const ExperimentConfig& ec = config.experiment;
    const DesignOutcome design = design_controls(method, ec);
    const fs::path out = config.out_dir();

    const GramMatrix w = canonical_gram(design.controls.pulses, ec.grid());
    const SeedBundle seeds = SeedBundle::from_master(ec.master_seed);
    ordered_json provenance = {{"method", to_string(method)},
                               {"seed", ec.master_seed},
                               {"derived_seeds", seeds_json(seeds)},
                               {"basis_hash", basis_hash(design.basis)},
                               {"n_controls", design.controls.size()},
                               {"condition_number", number(condition_number(w))},
                               {"config", config_json(config)}};
    if (design.ogra) {
        provenance["stop_reason"] = to_string(design.ogra->stop);
        provenance["selected_indices"] = design.ogra->selected_indices;
        io::write_atomic(out / "trace.csv", io::trace_csv(design.ogra->trace));
    }
    io::write_atomic(out / "controls.csv", io::controls_csv(design.controls));
    io::write_atomic(out / "design.json", dump(provenance));
    log << to_string(method) << ": " << design.controls.size() << " controls written to "
        << (out / "controls.csv").string() << "\n";
    return kSuccess;
}

int cmd_measure(const RunConfig& config, const MeasureInputs& inputs, std::ostream& log) {
    const ControlSet controls = io::parse_controls_csv(read_input(inputs.controls), inputs.controls.string());
    RunConfig effective = config;
    if (inputs.distribution) {
        effective.target = inputs.distribution->string();
    }
    const ProbabilityDistribution p = load_target(effective);
    const AlphaGrid grid = config.experiment.grid();

    MeasurementSet ms = synthesize_measurements(controls, p, grid);
    if (config.noise_sigma > 0.0) {
        ms = add_measurement_noise(ms, config.noise_sigma, SeedBundle::from_master(config.experiment.master_seed).noise);
    }
    const fs::path path = config.out_dir() / "measurements.csv";
    io::write_atomic(path, io::measurements_csv(ms));
    log << ms.readings.size() << " readings written to " << path.string() << "\n";
    return kSuccess;
}

int cmd_reconstruct(const RunConfig& config, const ReconstructInputs& inputs, std::ostream& log) {
    const ExperimentConfig& ec = config.experiment;
    const AlphaGrid grid = ec.grid();
    MeasurementSet ms;
    ms.controls = io::parse_controls_csv(read_input(inputs.controls), inputs.controls.string());
    ms.readings = io::parse_measurements_csv(read_input(inputs.measurements), inputs.measurements.string());
    if (ms.readings.size() != ms.controls.size()) {
        throw ConfigError(inputs.measurements.string() + ": " + std::to_string(ms.readings.size()) +
                          " readings for " + std::to_string(ms.controls.size()) + " controls in " +
                          inputs.controls.string());
    }

    std::optional<ProbabilityDistribution> truth;
    if (inputs.truth) {
        RunConfig t = config;
        t.target = inputs.truth->string();
        truth = load_target(t);
    }

    const IdentificationProblem problem = build_problem(ms.controls, grid, ms);
    const SeedBundle seeds = SeedBundle::from_master(ec.master_seed);
    const ProbabilityDistribution centre = truth ? *truth : uniform_distribution(grid.size());
    const MultistartResult fit =
        multistart_identify(problem, centre, ec.n_multistart, ec.radius_factor, seeds.multistart, ec.solver);

    // Without a reference the best run is the one with the smallest residual.
    const ReconstructionResult* best = &fit.best;
    if (!truth) {
        for (const ReconstructionResult& run : fit.runs) {
            if (run.objective < best->objective) {
                best = &run;
            }
        }
    }
    if (!std::isfinite(best->objective)) {
        throw NumericalError("reconstruction produced a non-finite objective");
    }

    ordered_json summary = {{"objective", number(best->objective)},
                            {"iterations", best->n_iterations},
                            {"converged", best->converged},
                            {"n_controls", ms.controls.size()},
                            {"n_multistart", ec.n_multistart},
                            {"seed", ec.master_seed},
                            {"multistart_seed", seeds.multistart}};
    if (truth) {
        summary["relative_error"] = number(fit.min_relative_error);
    }
    const Eigen::VectorXd truth_values = truth ? truth->values() : Eigen::VectorXd();
    const fs::path out = config.out_dir();
    io::write_atomic(out / "result.csv", io::result_csv(grid, truth ? &truth_values : nullptr, best->p_f.values()));
    io::write_atomic(out / "reconstruct.json", dump(summary));
    log << "objective " << io::format_double(best->objective);
    if (truth) {
        log << ", relative error " << io::format_double(fit.min_relative_error);
    }
    log << "\n";
    return kSuccess;
}

int cmd_spectrum(const RunConfig& config, const SpectrumInputs& inputs, std::ostream& log) {
    if (inputs.controls.has_value() == inputs.matrix.has_value()) {
        throw ConfigError("spectrum: give exactly one of a controls file or a matrix file");
    }
    GramMatrix w;
    if (inputs.matrix) {
        w.w = io::parse_matrix_csv(read_input(*inputs.matrix), inputs.matrix->string());
        if (!w.w.isApprox(w.w.transpose(), 1e-12)) {
            throw ConfigError(inputs.matrix->string() + ": matrix is not symmetric");
        }
    } else {
        const ControlSet controls = io::parse_controls_csv(read_input(*inputs.controls), inputs.controls->string());
        w = canonical_gram(controls.pulses, config.experiment.grid());
    }
    const Eigen::VectorXd ev = spectrum(w);
    if (!ev.allFinite()) {
        throw NumericalError("spectrum: non-finite eigenvalues");
    }
    const double cond = condition_number(w);
    const fs::path out = config.out_dir();
    io::write_atomic(out / "spectrum.csv", io::spectrum_csv(ev));
    ordered_json summary = {{"condition_number", number(cond)},
                            {"numerical_rank", numerical_rank(w)},
                            {"lambda_max", number(ev.size() > 0 ? ev(0) : 0.0)},
                            {"lambda_min", number(ev.size() > 0 ? ev(ev.size() - 1) : 0.0)}};
    io::write_atomic(out / "spectrum.json", dump(summary));
    log << "condition number " << io::format_double(cond) << "\n";
    return kSuccess;
}

std::string benchmark_json(const BenchmarkReport& report) {
    ordered_json rows = ordered_json::array();
    for (const BenchmarkRow& r : report.rows) {
        ordered_json row = {{"method", to_string(r.method)}};
        if (r.failure) {
            row["failure"] = *r.failure;
        } else {
            row["n_controls"] = r.n_controls;
            row["min_relative_error"] = number(r.min_error);
            row["condition_number"] = number(r.condition);
            row["design_seconds"] = r.design_seconds;
            row["reconstruct_seconds"] = r.reconstruct_seconds;
            row["spectrum"] = vector_json(r.spectrum);
            row["p_recovered"] = vector_json(r.p_f);
        }
        rows.push_back(std::move(row));
    }
    ordered_json j = {{"target", report.target_name},
                      {"seed", report.config.master_seed},
                      {"derived_seeds", seeds_json(report.seeds)},
                      {"K", report.config.K},
                      {"n_multistart", report.config.n_multistart},
                      {"p_true", vector_json(report.p_star)},
                      {"rows", rows}};
    return dump(j);
}

std::string benchmark_table(const BenchmarkReport& report) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"method", "controls", "min_rel_error", "cond", "design_s", "reconstruct_s", "status"});
    auto fixed = [](double v, const char* fmt) {
        char buf[64];
        std::snprintf(buf, sizeof buf, fmt, v);
        return std::string(buf);
    };
    for (const BenchmarkRow& r : report.rows) {
        if (r.failure) {
            cells.push_back({to_string(r.method), "-", "-", "-", "-", "-", "failed: " + *r.failure});
            continue;
        }
        cells.push_back({to_string(r.method), std::to_string(r.n_controls), fixed(r.min_error, "%.3e"),
                         fixed(r.condition, "%.3e"), fixed(r.design_seconds, "%.1f"),
                         fixed(r.reconstruct_seconds, "%.1f"), "ok"});
    }
    std::vector<std::size_t> width(cells.front().size(), 0);
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    std::ostringstream os;
    os << "target: " << report.target_name << "  seed: " << report.config.master_seed << "\n";
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::string pad(width[c] - row[c].size(), ' ');
            // Name and status left-aligned, numbers right-aligned.
            if (c == 0 || c + 1 == row.size()) {
                os << row[c] << (c + 1 == row.size() ? "" : pad);
            } else {
                os << pad << row[c];
            }
            if (c + 1 < row.size()) {
                os << "  ";
            }
        }
        os << "\n";
    }
    return os.str();
}

int cmd_benchmark(const RunConfig& config, std::ostream& log) {
    Scenario scenario{config.target, load_target(config), {}, config.experiment};
    if (config.method) {
        scenario.methods = {*config.method};
    } else {
        scenario.methods = all_methods();
    }
    const BenchmarkReport report = run_benchmark(scenario);

    const fs::path out = config.out_dir();
    const std::string table = benchmark_table(report);
    io::write_atomic(out / "benchmark.json", benchmark_json(report));
    io::write_atomic(out / "benchmark.txt", table);
    for (const BenchmarkRow& r : report.rows) {
        if (r.failure) {
            continue;
        }
        const std::string tag = to_string(r.method);
        io::write_atomic(out / ("overlay_" + tag + ".csv"), io::result_csv(report.grid, &report.p_star, r.p_f));
        io::write_atomic(out / ("spectrum_" + tag + ".csv"), io::spectrum_csv(r.spectrum));
    }
    log << table;
    const bool any_ok = std::any_of(report.rows.begin(), report.rows.end(),
                                    [](const BenchmarkRow& r) { return !r.failure; });
    return any_ok ? kSuccess : kNumericalError;
}

int cmd_validate(const RunConfig& config, std::ostream& log) {
    ValidationOptions options;
    options.seed = config.experiment.master_seed;
    const std::vector<CheckResult> results = run_validation(options);
    ordered_json checks = ordered_json::array();
    for (const CheckResult& r : results) {
        log << (r.passed ? "PASS " : "FAIL ") << r.name << " value=" << io::format_double(r.value)
            << " threshold=" << io::format_double(r.threshold);
        if (!r.detail.empty()) {
            log << " detail=\"" << r.detail << "\"";
        }
        log << "\n";
        checks.push_back({{"name", r.name},
                          {"passed", r.passed},
                          {"value", number(r.value)},
                          {"threshold", number(r.threshold)}});
    }
    const bool ok = all_passed(results);
    log << (ok ? "all checks passed" : "some checks failed") << "\n";
    if (config.out) {
        io::write_atomic(*config.out / "validate.json", dump({{"passed", ok}, {"checks", checks}}));
    }
    return ok ? kSuccess : kNumericalError;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const io::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    }
}

}  // namespace gra::cli
