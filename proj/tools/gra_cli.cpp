#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gra/cli.hpp"

namespace {

struct SharedFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string method;
    std::string target;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "JSON config file");
        cmd->add_option("--seed", seed, "master seed (default 42)");
        cmd->add_option("--out", out, "output directory");
        cmd->add_option("--method", method, "gra, grat, ogra, ograt, rcc or rcct");
        cmd->add_option("--target", target, "double-peak, step, uniform or a distribution CSV");
    }

    gra::cli::Overrides overrides() const {
        gra::cli::Overrides o;
        if (!config.empty()) o.config = config;
        o.seed = seed;
        if (!out.empty()) o.out = out;
        if (!method.empty()) o.method = method;
        if (!target.empty()) o.target = target;
        return o;
    }
};

}  // namespace

int main(int argc, char** argv) {
    using namespace gra::cli;

    CLI::App app{"Greedy control design and distribution identification for spin ensembles"};
    app.require_subcommand(1);
    SharedFlags flags;

    CLI::App* design = app.add_subcommand("design", "design a control set");
    flags.attach(design);

    CLI::App* measure = app.add_subcommand("measure", "synthesize ensemble readings for a control set");
    flags.attach(measure);
    std::string measure_controls;
    std::string measure_distribution;
    measure->add_option("--controls", measure_controls, "controls CSV")->required();
    measure->add_option("--distribution", measure_distribution, "distribution CSV (defaults to --target)");

    CLI::App* reconstruct = app.add_subcommand("reconstruct", "recover the distribution from readings");
    flags.attach(reconstruct);
    std::string rec_controls;
    std::string rec_measurements;
    std::string rec_truth;
    reconstruct->add_option("--controls", rec_controls, "controls CSV")->required();
    reconstruct->add_option("--measurements", rec_measurements, "measurements CSV")->required();
    reconstruct->add_option("--truth", rec_truth, "true distribution CSV, for the error report");

    CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues and condition number of W");
    flags.attach(spectrum);
    std::string spec_controls;
    std::string spec_matrix;
    spectrum->add_option("--controls", spec_controls, "controls CSV");
    spectrum->add_option("--matrix", spec_matrix, "square matrix CSV without header");

    CLI::App* benchmark = app.add_subcommand("benchmark", "design, measure and reconstruct for each method");
    flags.attach(benchmark);

    CLI::App* validate = app.add_subcommand("validate", "run the numerical self-checks");
    flags.attach(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    return guarded(
        [&]() -> int {
            const RunConfig config = resolve_config(flags.overrides());
            if (design->parsed()) {
                return cmd_design(config, std::cout);
            }
            if (measure->parsed()) {
                MeasureInputs in{measure_controls, std::nullopt};
                if (!measure_distribution.empty()) in.distribution = measure_distribution;
                return cmd_measure(config, in, std::cout);
            }
            if (reconstruct->parsed()) {
                ReconstructInputs in{rec_controls, rec_measurements, std::nullopt};
                if (!rec_truth.empty()) in.truth = rec_truth;
                return cmd_reconstruct(config, in, std::cout);
            }
            if (spectrum->parsed()) {
                SpectrumInputs in;
                if (!spec_controls.empty()) in.controls = spec_controls;
                if (!spec_matrix.empty()) in.matrix = spec_matrix;
                return cmd_spectrum(config, in, std::cout);
            }
            if (benchmark->parsed()) {
                return cmd_benchmark(config, std::cout);
            }
            return cmd_validate(config, std::cout);
        },
        std::cerr);
}
