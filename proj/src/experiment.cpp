#include "gra/experiment.hpp"

#include <chrono>
#include <random>
#include <stdexcept>

namespace gra {

MeasurementSet synthesize_measurements(const ControlSet& controls, const ProbabilityDistribution& p_star,
                                       const AlphaGrid& grid) {
    if (p_star.size() != grid.size()) {
        throw std::invalid_argument("synthesize_measurements: distribution and grid sizes differ");
    }
    MeasurementSet ms;
    ms.controls = controls;
    ms.readings.reserve(controls.size());
    for (const auto& pulse : controls.pulses) {
        ms.readings.push_back(response_matrix(pulse, grid).transpose() * p_star.values());
    }
    return ms;
}

MeasurementSet add_measurement_noise(const MeasurementSet& ms, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("add_measurement_noise: sigma must be nonnegative");
    }
    if (sigma == 0.0) {
        return ms;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    MeasurementSet out = ms;
    for (auto& r : out.readings) {
        r.x() += noise(rng);
        r.y() += noise(rng);
    }
    return out;
}

namespace {

ControlSet random_controls(std::size_t count, const GreedyConfig& config, std::uint64_t seed, bool random_time) {
    if (count == 0) {
        throw std::invalid_argument("random controls: count must be at least 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amplitude(-config.u_m, config.u_m);
    std::uniform_real_distribution<double> duration(0.0, config.t_f);
    ControlSet out;
    out.method = random_time ? Method::rcct : Method::rcc;
    out.pulses.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        ControlPulse p;
        p.u_x = amplitude(rng);
        p.u_y = amplitude(rng);
        p.t_f = random_time ? duration(rng) : config.t_f;
        out.pulses.push_back(p);
    }
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ControlSet rcc_controls(std::size_t count, const GreedyConfig& config, std::uint64_t seed) {
    return random_controls(count, config, seed, false);
}

ControlSet rcct_controls(std::size_t count, const GreedyConfig& config, std::uint64_t seed) {
    return random_controls(count, config, seed, true);
}

void ExperimentConfig::validate() const {
    if (K < 2) {
        throw std::invalid_argument("config: K must be at least 2");
    }
    if (!(alpha_min < alpha_max)) {
        throw std::invalid_argument("config: alpha_min must be below alpha_max");
    }
    greedy.validate();
    if (!(tol >= 0.0)) {
        throw std::invalid_argument("config: tol must be nonnegative");
    }
    if (K_plus < K) {
        throw std::invalid_argument("config: K_plus must be at least K");
    }
    if (n_multistart == 0 || !(radius_factor >= 0.0)) {
        throw std::invalid_argument("config: invalid multistart settings");
    }
}

SeedBundle SeedBundle::from_master(std::uint64_t master) {
    return {master + 1, master + 2, master + 3, master + 4, master + 5, master + 6, master + 7};
}

DesignOutcome design_controls(Method method, const ExperimentConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const SeedBundle seeds = SeedBundle::from_master(config.master_seed);
    const AlphaGrid grid = config.grid();

    GreedyConfig greedy = config.greedy;
    greedy.seed = seeds.optimizer;
    greedy.optimize_time = optimizes_time(method);

    DesignOutcome out;
    out.basis = random_orthonormal_basis(config.K, seeds.basis);
    switch (method) {
    case Method::gra:
    case Method::grat: {
        GreedyTrace trace;
        out.controls = method == Method::gra ? run_gra(out.basis, grid, greedy, &trace)
                                             : run_grat(out.basis, grid, greedy, &trace);
        out.greedy_trace = std::move(trace);
        break;
    }
    case Method::ogra:
    case Method::ograt: {
        OgraConfig oc;
        oc.greedy = greedy;
        oc.tol = config.tol;
        oc.K_plus = config.K_plus;
        const Eigen::MatrixXd pool = ogra_candidate_pool(out.basis, config.K_plus - config.K, seeds.candidates);
        OgraResult r = run_ogra(pool, grid, oc);
        out.controls = r.controls;
        out.ogra = std::move(r);
        break;
    }
    case Method::rcc:
        out.controls = rcc_controls(config.K, greedy, seeds.rcc);
        break;
    case Method::rcct:
        out.controls = rcct_controls(config.K, greedy, seeds.rcct);
        break;
    }
    out.seconds = seconds_since(start);
    return out;
}

const BenchmarkRow* BenchmarkReport::find(Method m) const {
    for (const auto& row : rows) {
        if (row.method == m) {
            return &row;
        }
    }
    return nullptr;
}

BenchmarkReport run_benchmark(const Scenario& scenario, DesignCache* cache) {
    scenario.config.validate();
    BenchmarkReport report;
    report.target_name = scenario.target_name;
    report.p_star = scenario.target.values();
    report.grid = scenario.config.grid();
    report.config = scenario.config;
    report.seeds = SeedBundle::from_master(scenario.config.master_seed);
    if (scenario.target.size() != report.grid.size()) {
        throw std::invalid_argument("run_benchmark: target does not match the grid");
    }

    for (Method method : scenario.methods) {
        BenchmarkRow row;
        row.method = method;
        try {
            const DesignOutcome* design = nullptr;
            DesignOutcome local;
            if (cache != nullptr) {
                auto it = cache->find(method);
                if (it == cache->end()) {
                    it = cache->emplace(method, design_controls(method, scenario.config)).first;
                }
                design = &it->second;
            } else {
                local = design_controls(method, scenario.config);
                design = &local;
            }
            row.design_seconds = design->seconds;
            row.n_controls = design->controls.size();

            const auto start = std::chrono::steady_clock::now();
            const MeasurementSet ms = synthesize_measurements(design->controls, scenario.target, report.grid);
            const IdentificationProblem problem = build_problem(design->controls, report.grid, ms);
            const MultistartResult fit =
                multistart_identify(problem, scenario.target, scenario.config.n_multistart,
                                    scenario.config.radius_factor, report.seeds.multistart, scenario.config.solver);
            row.reconstruct_seconds = seconds_since(start);
            row.min_error = fit.min_relative_error;
            row.p_f = fit.best.p_f.values();

            const GramMatrix w = canonical_gram(design->controls.pulses, report.grid);
            row.spectrum = spectrum(w);
            row.condition = condition_number(w);
        } catch (const std::exception& e) {
            row.failure = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

ProbabilityDistribution named_target(const std::string& name, const AlphaGrid& grid) {
    if (name == "double-peak" || name == "double_peak") {
        return double_peak_distribution(grid);
    }
    if (name == "step") {
        return step_distribution(grid);
    }
    throw std::invalid_argument("unknown target '" + name + "'");
}

}  // namespace gra
