#ifndef VERTSIM_ORCHESTRATOR_HPP
#define VERTSIM_ORCHESTRATOR_HPP

#include "vertsim/surrogate.hpp"
#include "vertsim/urban.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vertsim {

enum class InjectionKind { CellOutage, FloodTraffic, FailureProfile };

std::string injection_name(InjectionKind k);
InjectionKind injection_from_name(const std::string& s);

struct Injection {
    InjectionKind kind = InjectionKind::CellOutage;
    int target_cell = 0;
    double t0_s = 0.0;
    double t1_s = 0.0;
    std::string flood_profile; // FloodTraffic: profile of the added sources
    int flood_sources = 0;
    double delay_factor = 1.0; // FailureProfile: KPI degradation multipliers
    double drop_factor = 1.0;
    double throughput_factor = 1.0;
};

struct KpiThresholds {
    double delay_budget_ms = 50.0;
    double bad_experience_frac = 0.05; // packet-violation rate that flags a window
    double session_s = 60.0;           // user-KPI window
    double day_s = 86400.0;            // vertical-KPI window
};

struct Scenario {
    std::vector<CellSite> sites;
    std::vector<MobileEntity> entities;
    std::vector<TrafficProfile> profiles;
    std::vector<Injection> injections;
    double horizon_s = 0.0;
    std::uint64_t seed = 0;
    int hysteresis = 1;
    KpiThresholds thresholds;

    const CellSite* find_site(int cell_id) const;
    const TrafficProfile* find_profile(const std::string& name) const;
    void validate() const;
};

// Cell conditions for one interval: the site's radio context plus the
// interval's per-profile counts.
CellConditions make_conditions(const CellSite& site, const std::map<std::string, int>& counts,
                               const std::vector<TrafficProfile>& profiles);

// Number of packets the given device population generates in [t0, t1).
// Deterministic for PeriodicSync; consumes the stream exactly like
// generate_timestamps for the random regimes, so counts and timestamps agree.
std::int64_t packet_count(const TrafficProfile& profile, int devices, double t0_s, double t1_s,
                          Rng& rng);

// Sorted packet timestamps in [t0, t1): merged per-device exponential
// inter-arrivals (Poisson), the shared epoch grid k/rate (PeriodicSync), or
// per-device uniformly drawn phases (PeriodicAsync).
std::vector<double> generate_timestamps(const TrafficProfile& profile, int devices, double t0_s,
                                        double t1_s, Rng& rng);

struct CityPacket {
    int cell_id = 0;
    std::int64_t entity_id = 0; // negative: synthetic source (flood/surplus slot)
    std::string profile;
    double timestamp_s = 0.0;
    double delay_ms = 0.0;       // NaN when dropped
    bool dropped = false;
    double throughput_bps = 0.0; // 0 when dropped
};

struct CellKpis {
    int cell_id = 0;
    std::size_t packets = 0;
    std::size_t delivered = 0;
    std::size_t dropped = 0;
    double drop_rate = 0.0;
    double mean_delay_ms = 0.0;
    double p50_delay_ms = 0.0;
    double p95_delay_ms = 0.0;
    double p99_delay_ms = 0.0;
    double jitter_ms = 0.0; // stddev of consecutive same-entity delay deltas
    double mean_throughput_bps = 0.0;
};

struct UserKpis {
    std::int64_t entity_id = 0;
    std::string profile;
    std::size_t packets = 0;
    std::size_t sessions = 0;       // session windows containing packets
    double violation_rate = 0.0;    // sessions whose p95 delay breaks the budget
    double worst_p95_ms = 0.0;
};

struct VerticalReport {
    std::size_t total_packets = 0;
    std::size_t delivered = 0;
    std::size_t dropped = 0;
    double drop_rate = 0.0;
    std::vector<CellKpis> cells;  // sorted by cell_id
    std::vector<UserKpis> users;  // sorted by entity_id; synthetic sources excluded
    std::size_t entity_days = 0;  // (entity, day window) pairs with traffic
    double bad_experience_fraction = 0.0;
    KpiThresholds thresholds;
};

// Aggregates a packet log into the three KPI layers: per-cell network KPIs
// over per-packet samples, per-entity user KPIs over session windows, and the
// vertical bad-experience fraction over day windows. Dropped packets count as
// threshold violations (their delay reads as +inf).
VerticalReport compute_kpis(const std::vector<CityPacket>& log, const KpiThresholds& thresholds,
                            double horizon_s);

struct CityResult {
    VerticalReport report;
    std::vector<CityPacket> log; // sorted by (timestamp, cell, entity, profile)
};

// Drives the surrogate over the condition intervals: one predict() per
// (cell, sub-interval), then per-packet KPI draws. Injections cut a target
// cell's intervals at their span bounds; outage drops every packet, flood
// adds sources before the surrogate query, failure multiplies sampled KPIs.
// Every cell draws from its own seed stream derived from (scenario seed,
// "city", cell_id), so injections never perturb other cells' records.
CityResult run_city(const Scenario& scenario, const ModelSet& models,
                    const std::vector<ConditionInterval>& intervals);

} // namespace vertsim

#endif
