#ifndef VERTSIM_CONFIG_HPP
#define VERTSIM_CONFIG_HPP

#include "vertsim/cellsim.hpp"
#include "vertsim/distfit.hpp"
#include "vertsim/orchestrator.hpp"
#include "vertsim/validate.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace vertsim {

// Candidate families per KPI, tried in order by select_family.
struct FitConfig {
    std::vector<DistFamily> delay_candidates{DistFamily::LogNormal};
    std::vector<DistFamily> drop_candidates{DistFamily::Bernoulli};
    std::vector<DistFamily> throughput_candidates{DistFamily::Gamma};

    const std::vector<DistFamily>& candidates(Kpi kpi) const;
};

struct SweepConfig {
    std::uint64_t seed = 0;
    double duration_s = 0.0;
    int workers = 1;
    CellSimParams sim;
    CellConditions base;
    SweepGrid grid;
    FitConfig fit;
};

struct TrainConfig {
    RegressorKind regressor = RegressorKind::MultilinearInterp;
    int degree = 2;
    double ridge_weight = 1e-8;
};

struct ValidateConfig {
    std::uint64_t seed = 0;
    double duration_s = 0.0;
    std::size_t n_samples = 10000;
    int workers = 1;
    CellSimParams sim;
    ValidationTolerances tolerances;
    CellConditions base;
    std::vector<std::map<std::string, double>> points; // axis-label overrides

    std::vector<CellConditions> conditions() const;
};

// Applies one axis-label override ("devices:<p>", "radius", "rate:<p>",
// "d_los") to a condition vector; the dual of axis_value().
void apply_axis_value(CellConditions& c, const std::string& label, double value);

// Every from_json parser rejects unknown keys, naming the offending key.
// Channel parsing needs the carrier frequency: an omitted ci pl_d0_db is
// filled with the free-space loss at d0.
RadioConfig radio_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json radio_to_json(const RadioConfig& r);
ChannelModelConfig channel_from_json(const nlohmann::json& j, double carrier_frequency_hz,
                                     const std::string& context);
nlohmann::json channel_to_json(const ChannelModelConfig& c);
TrafficProfile profile_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json profile_to_json(const TrafficProfile& p);
CellSimParams sim_params_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json sim_params_to_json(const CellSimParams& p);
CellConditions conditions_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json conditions_to_json(const CellConditions& c);
SweepGrid grid_from_json(const nlohmann::json& j, std::uint64_t default_seed,
                         const std::string& context);
nlohmann::json grid_to_json(const SweepGrid& g);
std::vector<Injection> injections_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json injections_to_json(const std::vector<Injection>& injections);

SweepConfig sweep_config_from_json(const nlohmann::json& j);
// Resolved-config echo: round-trips through sweep_config_from_json, so the
// fit stage can recover candidate families from a sweep directory alone.
nlohmann::json sweep_config_to_json(const SweepConfig& cfg);
Scenario scenario_from_json(const nlohmann::json& j);
ValidateConfig validate_config_from_json(const nlohmann::json& j);

nlohmann::json parse_json_file(const std::filesystem::path& path);
SweepConfig load_sweep_config(const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);
ValidateConfig load_validate_config(const std::filesystem::path& path);
std::vector<Injection> load_injection_overlay(const std::filesystem::path& path);

} // namespace vertsim

#endif
