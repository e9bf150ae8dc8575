#ifndef VERTSIM_VALIDATE_HPP
#define VERTSIM_VALIDATE_HPP

#include "vertsim/orchestrator.hpp"
#include "vertsim/surrogate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vertsim {

struct ValidationTolerances {
    double ks = 0.05;
    double mean = 0.10;
};

struct ValidationEntry {
    std::size_t condition_index = 0;
    Kpi kpi = Kpi::Delay;
    double ks_distance = 0.0;
    double mean_error = 0.0; // signed relative; absolute for the drop KPI
    double reference_mean = 0.0;
    double surrogate_mean = 0.0;
    std::size_t n_reference = 0;
    std::size_t n_surrogate = 0;
    bool pass = false;
    std::string error; // non-empty when this condition could not be evaluated
};

struct ValidationReport {
    std::vector<ValidationEntry> entries;
    ValidationTolerances tolerances;
    bool pass = true; // conjunction of entries; vacuously true when empty
};

// Per-packet KPI samples pooled from a reference source. Drops are 0/1 per
// packet; delay and throughput cover delivered packets only.
struct KpiSamples {
    std::vector<double> delay_ms;
    std::vector<double> throughput_bps;
    std::vector<double> drops;
};

KpiSamples collect_samples(const std::vector<PacketRecord>& records);
KpiSamples collect_samples(const std::vector<CityPacket>& log);

// Compares surrogate draws against pre-collected reference samples for one
// condition. Three entries (delay, drop, throughput); the drop mean error is
// an absolute probability difference since reference drop means sit near 0.
std::vector<ValidationEntry> validate_condition(const CellConditions& condition,
                                                const KpiSamples& reference,
                                                const ModelSet& models, Rng& rng,
                                                std::size_t n_samples,
                                                const ValidationTolerances& tolerances,
                                                std::size_t condition_index = 0);

// Runs the detailed simulator per condition as the reference, then compares.
// Per-condition failures are recorded in the entry without aborting the rest.
ValidationReport cross_validate(const std::vector<CellConditions>& conditions,
                                const ModelSet& models, double duration_s, std::uint64_t seed,
                                const CellSimParams& params, std::size_t n_samples,
                                const ValidationTolerances& tolerances, int workers = 1);

// As cross_validate, but the reference samples are supplied (e.g. parsed from
// an external packet log) instead of simulated.
ValidationReport validate_against(const std::vector<CellConditions>& conditions,
                                  const std::vector<KpiSamples>& references,
                                  const ModelSet& models, std::uint64_t seed,
                                  std::size_t n_samples, const ValidationTolerances& tolerances);

} // namespace vertsim

#endif
