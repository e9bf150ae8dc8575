#ifndef VERTSIM_COMMANDS_HPP
#define VERTSIM_COMMANDS_HPP

#include "vertsim/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace vertsim {

// Pools each point's packet records across replications into per-KPI samples
// and fits one distribution per (point, KPI). A KPI with fewer than
// kMinFitSamples pooled samples at a point is skipped for that point, as are
// points where every candidate family fails; skipped entries surface later
// as grid-coverage errors at training time.
DistributionTable fit_dataset(const SweepDataset& dataset, const FitConfig& fit);

// Subcommand bodies behind the CLI front end. Each loads its inputs, runs
// one pipeline stage, persists the outputs plus a RunManifest into `out`,
// and returns the process exit code. Overrides act exactly as if the value
// had been edited into the config file; manifests always record the
// effective seed. Errors surface as ConfigError / DataError and are mapped
// to exit codes by the caller.

int cmd_sweep(const std::filesystem::path& config, const std::filesystem::path& out,
              std::optional<std::uint64_t> seed, std::optional<int> workers);

int cmd_fit(const std::filesystem::path& sweep_dir, const std::filesystem::path& out);

int cmd_train(const std::filesystem::path& table, const std::filesystem::path& out,
              const std::string& regressor, int degree, double ridge_weight);

int cmd_urban(const std::filesystem::path& scenario, const std::filesystem::path& out,
              std::optional<std::uint64_t> seed);

int cmd_run(const std::filesystem::path& scenario, const std::filesystem::path& model,
            const std::optional<std::filesystem::path>& intervals,
            const std::filesystem::path& out, std::optional<std::uint64_t> seed);

int cmd_whatif(const std::filesystem::path& scenario, const std::filesystem::path& overlay,
               const std::filesystem::path& model, const std::filesystem::path& out,
               std::optional<std::uint64_t> seed);

// Exit code 4 when the validation report fails; 0 when it passes.
int cmd_validate(const std::filesystem::path& config, const std::filesystem::path& model,
                 const std::optional<std::filesystem::path>& reference,
                 const std::filesystem::path& out, std::optional<std::uint64_t> seed,
                 std::optional<int> workers, std::optional<double> tolerance_ks,
                 std::optional<double> tolerance_mean);

} // namespace vertsim

#endif
