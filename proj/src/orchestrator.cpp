#include "vertsim/orchestrator.hpp"

#include "vertsim/errors.hpp"
#include "vertsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

namespace vertsim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest k >= 0 with k/rate >= t, exact under the FP evaluation of k/rate,
// so epoch membership in [t0, t1) is consistent everywhere it is computed.
std::int64_t first_epoch_at_or_after(double rate, double t) {
    std::int64_t k = static_cast<std::int64_t>(std::ceil(t * rate));
    if (k < 0) k = 0;
    while (static_cast<double>(k) / rate < t) ++k;
    while (k > 0 && static_cast<double>(k - 1) / rate >= t) --k;
    return k;
}

// Single source of truth for arrival generation; packet_count and
// generate_timestamps must consume the stream identically.
template <typename Fn>
void for_each_arrival(const TrafficProfile& profile, int devices, double t0, double t1, Rng& rng,
                      Fn&& fn) {
    if (devices <= 0 || !(t1 > t0)) return;
    const double rate = profile.packet_rate_hz;
    switch (profile.regime) {
    case TrafficRegime::Poisson:
        for (int slot = 0; slot < devices; ++slot) {
            double t = t0;
            for (;;) {
                t += -std::log(uniform_open01(rng)) / rate;
                if (!(t < t1)) break;
                fn(t, slot);
            }
        }
        break;
    case TrafficRegime::PeriodicSync: {
        const std::int64_t k0 = first_epoch_at_or_after(rate, t0);
        const std::int64_t k1 = first_epoch_at_or_after(rate, t1);
        for (std::int64_t k = k0; k < k1; ++k)
            for (int slot = 0; slot < devices; ++slot) fn(static_cast<double>(k) / rate, slot);
        break;
    }
    case TrafficRegime::PeriodicAsync:
        for (int slot = 0; slot < devices; ++slot) {
            double t = t0 + uniform_open01(rng) / rate;
            while (t < t1) {
                fn(t, slot);
                t += 1.0 / rate;
            }
        }
        break;
    }
}

struct SlotArrival {
    double t;
    int slot;
};

std::vector<SlotArrival> slot_arrivals(const TrafficProfile& profile, int devices, double t0,
                                       double t1, Rng& rng) {
    std::vector<SlotArrival> out;
    for_each_arrival(profile, devices, t0, t1, rng,
                     [&](double t, int slot) { out.push_back({t, slot}); });
    std::sort(out.begin(), out.end(), [](const SlotArrival& a, const SlotArrival& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.slot < b.slot;
    });
    return out;
}

struct Presence {
    double t0;
    double t1;
    std::int64_t entity;
};

// Device slot i of an interval maps to the i-th present entity (by id);
// surplus slots are synthetic sources and get negative ids.
std::int64_t resolve_entity(const std::vector<Presence>& spans, double ts, int slot) {
    std::vector<std::int64_t> present;
    for (const auto& s : spans)
        if (s.t0 <= ts && ts < s.t1) present.push_back(s.entity);
    std::sort(present.begin(), present.end());
    if (slot < static_cast<int>(present.size())) return present[slot];
    return -static_cast<std::int64_t>(slot) - 1;
}

} // namespace

std::string injection_name(InjectionKind k) {
    switch (k) {
    case InjectionKind::CellOutage: return "cell_outage";
    case InjectionKind::FloodTraffic: return "flood_traffic";
    case InjectionKind::FailureProfile: return "failure_profile";
    }
    throw std::logic_error("unreachable");
}

InjectionKind injection_from_name(const std::string& s) {
    if (s == "cell_outage") return InjectionKind::CellOutage;
    if (s == "flood_traffic") return InjectionKind::FloodTraffic;
    if (s == "failure_profile") return InjectionKind::FailureProfile;
    throw ConfigError("unknown injection kind: " + s);
}

const CellSite* Scenario::find_site(int cell_id) const {
    for (const auto& s : sites)
        if (s.cell_id == cell_id) return &s;
    return nullptr;
}

const TrafficProfile* Scenario::find_profile(const std::string& name) const {
    for (const auto& p : profiles)
        if (p.name == name) return &p;
    return nullptr;
}

void Scenario::validate() const {
    if (!(horizon_s > 0.0)) throw ConfigError("scenario horizon must be > 0");
    if (hysteresis < 1) throw ConfigError("hysteresis must be >= 1");
    std::set<int> site_ids;
    for (const auto& s : sites) {
        s.validate();
        if (!site_ids.insert(s.cell_id).second)
            throw ConfigError("duplicate cell_id " + std::to_string(s.cell_id));
    }
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        profiles[i].validate();
        for (std::size_t j = i + 1; j < profiles.size(); ++j)
            if (profiles[i].name == profiles[j].name)
                throw ConfigError("duplicate traffic profile: " + profiles[i].name);
    }
    std::set<int> entity_ids;
    for (const auto& e : entities) {
        e.validate();
        if (e.entity_id < 0)
            throw ConfigError("entity ids must be >= 0 (negatives mark synthetic sources)");
        if (!entity_ids.insert(e.entity_id).second)
            throw ConfigError("duplicate entity_id " + std::to_string(e.entity_id));
        if (!find_profile(e.profile))
            throw ConfigError("entity " + std::to_string(e.entity_id) +
                              " references unknown profile " + e.profile);
    }
    for (const auto& inj : injections) {
        if (!find_site(inj.target_cell))
            throw ConfigError("injection targets unknown cell " + std::to_string(inj.target_cell));
        if (!(inj.t0_s >= 0.0 && inj.t0_s < inj.t1_s && inj.t1_s <= horizon_s))
            throw ConfigError("injection span must lie within [0, horizon)");
        if (inj.kind == InjectionKind::FloodTraffic) {
            if (!find_profile(inj.flood_profile))
                throw ConfigError("flood injection references unknown profile " +
                                  inj.flood_profile);
            if (inj.flood_sources < 1) throw ConfigError("flood_sources must be >= 1");
        }
        if (inj.kind == InjectionKind::FailureProfile &&
            (inj.delay_factor < 0.0 || inj.drop_factor < 0.0 || inj.throughput_factor < 0.0))
            throw ConfigError("failure factors must be >= 0");
    }
    if (!(thresholds.delay_budget_ms >= 0.0) || !(thresholds.session_s > 0.0) ||
        !(thresholds.day_s > 0.0) || thresholds.bad_experience_frac < 0.0 ||
        thresholds.bad_experience_frac > 1.0)
        throw ConfigError("invalid kpi thresholds");
}

CellConditions make_conditions(const CellSite& site, const std::map<std::string, int>& counts,
                               const std::vector<TrafficProfile>& profiles) {
    CellConditions c;
    c.device_counts = counts;
    c.profiles = profiles;
    c.cell_radius_m = site.radius_m;
    c.radio = site.radio;
    c.channel = site.channel;
    return c;
}

std::int64_t packet_count(const TrafficProfile& profile, int devices, double t0_s, double t1_s,
                          Rng& rng) {
    if (devices <= 0 || !(t1_s > t0_s)) return 0;
    if (profile.regime == TrafficRegime::PeriodicSync) {
        const double rate = profile.packet_rate_hz;
        return static_cast<std::int64_t>(devices) *
               (first_epoch_at_or_after(rate, t1_s) - first_epoch_at_or_after(rate, t0_s));
    }
    std::int64_t n = 0;
    for_each_arrival(profile, devices, t0_s, t1_s, rng, [&](double, int) { ++n; });
    return n;
}

std::vector<double> generate_timestamps(const TrafficProfile& profile, int devices, double t0_s,
                                        double t1_s, Rng& rng) {
    std::vector<double> out;
    for_each_arrival(profile, devices, t0_s, t1_s, rng, [&](double t, int) { out.push_back(t); });
    std::sort(out.begin(), out.end());
    return out;
}

VerticalReport compute_kpis(const std::vector<CityPacket>& log, const KpiThresholds& thresholds,
                            double horizon_s) {
    if (!(horizon_s > 0.0)) throw std::domain_error("compute_kpis: horizon must be > 0");
    VerticalReport rep;
    rep.thresholds = thresholds;
    rep.total_packets = log.size();
    for (const auto& pkt : log) {
        if (pkt.timestamp_s < 0.0 || pkt.timestamp_s >= horizon_s)
            throw DataError("packet timestamp outside [0, horizon)");
        pkt.dropped ? ++rep.dropped : ++rep.delivered;
    }
    rep.drop_rate = rep.total_packets == 0
                        ? 0.0
                        : static_cast<double>(rep.dropped) / static_cast<double>(rep.total_packets);

    std::map<int, std::vector<const CityPacket*>> by_cell;
    for (const auto& pkt : log) by_cell[pkt.cell_id].push_back(&pkt);
    for (const auto& [cell, pkts] : by_cell) {
        CellKpis ck;
        ck.cell_id = cell;
        ck.packets = pkts.size();
        std::vector<double> delays;
        std::vector<double> tps;
        std::map<std::int64_t, std::vector<double>> entity_delays;
        for (const CityPacket* p : pkts) {
            if (p->dropped) {
                ++ck.dropped;
                continue;
            }
            ++ck.delivered;
            delays.push_back(p->delay_ms);
            tps.push_back(p->throughput_bps);
            if (p->entity_id >= 0) entity_delays[p->entity_id].push_back(p->delay_ms);
        }
        ck.drop_rate = static_cast<double>(ck.dropped) / static_cast<double>(ck.packets);
        if (!delays.empty()) {
            ck.mean_delay_ms = mean(delays);
            ck.p50_delay_ms = percentile(delays, 50.0);
            ck.p95_delay_ms = percentile(delays, 95.0);
            ck.p99_delay_ms = percentile(delays, 99.0);
            ck.mean_throughput_bps = mean(tps);
        }
        std::vector<double> diffs;
        for (const auto& [id, ds] : entity_delays)
            for (std::size_t i = 1; i < ds.size(); ++i) diffs.push_back(ds[i] - ds[i - 1]);
        ck.jitter_ms = diffs.size() >= 2 ? stddev(diffs) : 0.0;
        rep.cells.push_back(std::move(ck));
    }

    std::map<std::int64_t, std::vector<const CityPacket*>> by_entity;
    for (const auto& pkt : log)
        if (pkt.entity_id >= 0) by_entity[pkt.entity_id].push_back(&pkt);
    std::size_t bad_windows = 0;
    for (const auto& [id, pkts] : by_entity) {
        UserKpis u;
        u.entity_id = id;
        u.profile = pkts.front()->profile;
        u.packets = pkts.size();

        std::map<std::int64_t, std::vector<double>> sessions;
        std::map<std::int64_t, std::pair<std::size_t, std::size_t>> days; // violations, packets
        for (const CityPacket* p : pkts) {
            const auto sw = static_cast<std::int64_t>(std::floor(p->timestamp_s / thresholds.session_s));
            sessions[sw].push_back(p->dropped ? kInf : p->delay_ms);
            const auto dw = static_cast<std::int64_t>(std::floor(p->timestamp_s / thresholds.day_s));
            auto& [viol, total] = days[dw];
            ++total;
            if (p->dropped || p->delay_ms > thresholds.delay_budget_ms) ++viol;
        }
        std::size_t violating = 0;
        for (const auto& [w, ds] : sessions) {
            const double p95 = percentile(ds, 95.0);
            u.worst_p95_ms = std::max(u.worst_p95_ms, p95);
            if (p95 > thresholds.delay_budget_ms) ++violating;
        }
        u.sessions = sessions.size();
        u.violation_rate = static_cast<double>(violating) / static_cast<double>(u.sessions);
        rep.users.push_back(std::move(u));

        for (const auto& [w, vc] : days) {
            ++rep.entity_days;
            const double rate = static_cast<double>(vc.first) / static_cast<double>(vc.second);
            if (rate > thresholds.bad_experience_frac) ++bad_windows;
        }
    }
    rep.bad_experience_fraction =
        rep.entity_days == 0
            ? 0.0
            : static_cast<double>(bad_windows) / static_cast<double>(rep.entity_days);
    return rep;
}

CityResult run_city(const Scenario& scenario, const ModelSet& models,
                    const std::vector<ConditionInterval>& intervals) {
    scenario.validate();
    const SurrogateModel& delay_model = models.require(Kpi::Delay);
    const SurrogateModel& drop_model = models.require(Kpi::DropProbability);
    const SurrogateModel& tp_model = models.require(Kpi::Throughput);
    if (drop_model.family != DistFamily::Bernoulli)
        throw ConfigError("drop model must be a Bernoulli family surrogate");

    std::vector<const ConditionInterval*> sorted;
    sorted.reserve(intervals.size());
    for (const auto& iv : intervals) {
        if (!scenario.find_site(iv.cell_id))
            throw DataError("interval references unknown cell_id " + std::to_string(iv.cell_id));
        if (!(iv.t0_s < iv.t1_s) || iv.t0_s < 0.0 || iv.t1_s > scenario.horizon_s)
            throw DataError("interval span outside [0, horizon)");
        sorted.push_back(&iv);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const ConditionInterval* a, const ConditionInterval* b) {
                  if (a->cell_id != b->cell_id) return a->cell_id < b->cell_id;
                  return a->t0_s < b->t0_s;
              });

    // Exact per-entity presence, for attributing device slots to entity ids.
    std::map<std::pair<int, std::string>, std::vector<Presence>> presence;
    for (const auto& e : scenario.entities)
        for (const auto& span : entity_assignment(scenario.sites, e, scenario.horizon_s))
            if (span.cell)
                presence[{*span.cell, e.profile}].push_back(
                    {span.t0_s, span.t1_s, static_cast<std::int64_t>(e.entity_id)});

    CityResult result;
    std::size_t i = 0;
    while (i < sorted.size()) {
        const int cell = sorted[i]->cell_id;
        const CellSite& site = *scenario.find_site(cell);
        Rng rng(derive_seed(scenario.seed, "city", static_cast<std::uint64_t>(cell)));

        for (; i < sorted.size() && sorted[i]->cell_id == cell; ++i) {
            const ConditionInterval& iv = *sorted[i];

            std::vector<double> bounds{iv.t0_s, iv.t1_s};
            for (const auto& inj : scenario.injections) {
                if (inj.target_cell != cell) continue;
                if (inj.t0_s > iv.t0_s && inj.t0_s < iv.t1_s) bounds.push_back(inj.t0_s);
                if (inj.t1_s > iv.t0_s && inj.t1_s < iv.t1_s) bounds.push_back(inj.t1_s);
            }
            std::sort(bounds.begin(), bounds.end());
            bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

            for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
                const double s0 = bounds[b];
                const double s1 = bounds[b + 1];

                bool outage = false;
                double delay_f = 1.0, drop_f = 1.0, tp_f = 1.0;
                std::map<std::string, int> counts = iv.device_counts;
                for (const auto& inj : scenario.injections) {
                    if (inj.target_cell != cell || !(inj.t0_s < s1 && s0 < inj.t1_s)) continue;
                    switch (inj.kind) {
                    case InjectionKind::CellOutage: outage = true; break;
                    case InjectionKind::FloodTraffic:
                        counts[inj.flood_profile] += inj.flood_sources;
                        break;
                    case InjectionKind::FailureProfile:
                        delay_f *= inj.delay_factor;
                        drop_f *= inj.drop_factor;
                        tp_f *= inj.throughput_factor;
                        break;
                    }
                }

                // One surrogate query per (cell, sub-interval), reused for
                // every packet inside it.
                KpiDistribution delay_dist, tp_dist, drop_dist;
                if (!outage) {
                    const CellConditions cond =
                        make_conditions(site, counts, scenario.profiles);
                    delay_dist = predict(delay_model, cond).dist;
                    tp_dist = predict(tp_model, cond).dist;
                    drop_dist = predict(drop_model, cond).dist;
                    drop_dist.params[0] = std::clamp(drop_dist.params[0] * drop_f, 0.0, 1.0);
                }

                for (const auto& [pname, count] : counts) {
                    if (count <= 0) continue;
                    const TrafficProfile* prof = scenario.find_profile(pname);
                    if (!prof) throw DataError("interval references unknown profile " + pname);
                    const auto arrivals = slot_arrivals(*prof, count, s0, s1, rng);
                    const auto pres_it = presence.find({cell, pname});
                    static const std::vector<Presence> kNoPresence;
                    const auto& pres =
                        pres_it == presence.end() ? kNoPresence : pres_it->second;
                    for (const auto& a : arrivals) {
                        CityPacket pkt;
                        pkt.cell_id = cell;
                        pkt.entity_id = resolve_entity(pres, a.t, a.slot);
                        pkt.profile = pname;
                        pkt.timestamp_s = a.t;
                        pkt.delay_ms = kNan;
                        if (outage || sample_kpi(drop_dist, rng) >= 0.5) {
                            pkt.dropped = true;
                        } else {
                            pkt.delay_ms = sample_kpi(delay_dist, rng) * delay_f;
                            pkt.throughput_bps = sample_kpi(tp_dist, rng) * tp_f;
                        }
                        result.log.push_back(std::move(pkt));
                    }
                }
            }
        }
    }

    std::sort(result.log.begin(), result.log.end(), [](const CityPacket& a, const CityPacket& b) {
        if (a.timestamp_s != b.timestamp_s) return a.timestamp_s < b.timestamp_s;
        if (a.cell_id != b.cell_id) return a.cell_id < b.cell_id;
        if (a.entity_id != b.entity_id) return a.entity_id < b.entity_id;
        return a.profile < b.profile;
    });
    result.report = compute_kpis(result.log, scenario.thresholds, scenario.horizon_s);
    return result;
}

} // namespace vertsim
