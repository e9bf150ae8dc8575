#include "vertsim/commands.hpp"
#include "vertsim/errors.hpp"
#include "vertsim/version.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

std::optional<std::filesystem::path> opt_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vertsim: two-tier cellular network simulation pipeline"};
    app.set_version_flag("--version", vertsim::kVersion);
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::string sweep_dir;
    std::string table;
    std::string scenario;
    std::string model;
    std::string overlay;
    std::string intervals;
    std::string reference;
    std::string regressor = "multilinear";
    int degree = 2;
    double ridge_weight = 1e-8;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<double> tolerance_ks;
    std::optional<double> tolerance_mean;

    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", out, "output directory")
            ->required()
            ->envname("VERTSIM_OUT");
    };
    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "root seed override")->envname("VERTSIM_SEED");
    };
    auto add_workers = [&](CLI::App* cmd) {
        cmd->add_option("--workers", workers, "parallel worker bound")
            ->envname("VERTSIM_WORKERS");
    };

    CLI::App* sweep = app.add_subcommand("sweep", "run the detailed-simulator parameter sweep");
    sweep->add_option("--config", config, "sweep config JSON")
        ->required()
        ->envname("VERTSIM_CONFIG")
        ->check(CLI::ExistingFile);
    add_out(sweep);
    add_seed(sweep);
    add_workers(sweep);

    CLI::App* fit = app.add_subcommand("fit", "fit KPI distributions per sweep point");
    fit->add_option("--sweep", sweep_dir, "sweep output directory")
        ->required()
        ->envname("VERTSIM_SWEEP")
        ->check(CLI::ExistingDirectory);
    add_out(fit);

    CLI::App* train = app.add_subcommand("train", "train surrogate regressors on a table");
    train->add_option("--table", table, "distribution table CSV")
        ->required()
        ->envname("VERTSIM_TABLE")
        ->check(CLI::ExistingFile);
    train->add_option("--regressor", regressor, "multilinear or poly_ridge")
        ->envname("VERTSIM_REGRESSOR");
    train->add_option("--degree", degree, "polynomial degree (poly_ridge)");
    train->add_option("--ridge-weight", ridge_weight, "ridge penalty (poly_ridge)");
    add_out(train);

    CLI::App* urban = app.add_subcommand("urban", "derive condition intervals from a scenario");
    urban->add_option("--scenario", scenario, "scenario JSON")
        ->required()
        ->envname("VERTSIM_SCENARIO")
        ->check(CLI::ExistingFile);
    add_out(urban);
    add_seed(urban);

    CLI::App* run = app.add_subcommand("run", "run the city-scale simulation");
    run->add_option("--scenario", scenario, "scenario JSON")
        ->required()
        ->envname("VERTSIM_SCENARIO")
        ->check(CLI::ExistingFile);
    run->add_option("--model", model, "surrogate model JSON")
        ->required()
        ->envname("VERTSIM_MODEL")
        ->check(CLI::ExistingFile);
    run->add_option("--intervals", intervals, "precomputed intervals CSV (default: derive)")
        ->check(CLI::ExistingFile);
    add_out(run);
    add_seed(run);

    CLI::App* whatif = app.add_subcommand("whatif", "paired baseline vs injected runs");
    whatif->add_option("--scenario", scenario, "baseline scenario JSON")
        ->required()
        ->envname("VERTSIM_SCENARIO")
        ->check(CLI::ExistingFile);
    whatif->add_option("--overlay", overlay, "injection overlay JSON")
        ->required()
        ->envname("VERTSIM_OVERLAY")
        ->check(CLI::ExistingFile);
    whatif->add_option("--model", model, "surrogate model JSON")
        ->required()
        ->envname("VERTSIM_MODEL")
        ->check(CLI::ExistingFile);
    add_out(whatif);
    add_seed(whatif);

    CLI::App* validate = app.add_subcommand("validate", "compare surrogate KPIs to references");
    validate->add_option("--config", config, "validate config JSON")
        ->required()
        ->envname("VERTSIM_CONFIG")
        ->check(CLI::ExistingFile);
    validate->add_option("--model", model, "surrogate model JSON")
        ->required()
        ->envname("VERTSIM_MODEL")
        ->check(CLI::ExistingFile);
    validate->add_option("--reference", reference, "external reference packet log CSV")
        ->check(CLI::ExistingFile);
    validate->add_option("--tolerance-ks", tolerance_ks, "KS distance tolerance")
        ->envname("VERTSIM_TOLERANCE_KS");
    validate->add_option("--tolerance-mean", tolerance_mean, "mean error tolerance")
        ->envname("VERTSIM_TOLERANCE_MEAN");
    add_out(validate);
    add_seed(validate);
    add_workers(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sweep->parsed()) return vertsim::cmd_sweep(config, out, seed, workers);
        if (fit->parsed()) return vertsim::cmd_fit(sweep_dir, out);
        if (train->parsed())
            return vertsim::cmd_train(table, out, regressor, degree, ridge_weight);
        if (urban->parsed()) return vertsim::cmd_urban(scenario, out, seed);
        if (run->parsed())
            return vertsim::cmd_run(scenario, model, opt_path(intervals), out, seed);
        if (whatif->parsed()) return vertsim::cmd_whatif(scenario, overlay, model, out, seed);
        if (validate->parsed())
            return vertsim::cmd_validate(config, model, opt_path(reference), out, seed, workers,
                                         tolerance_ks, tolerance_mean);
    } catch (const vertsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
