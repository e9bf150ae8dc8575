#include "vertsim/urban.hpp"

#include "vertsim/errors.hpp"
#include "vertsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace vertsim {

void CellSite::validate() const {
    if (!(radius_m > 0.0)) throw ConfigError("cell " + std::to_string(cell_id) + ": radius must be > 0");
    radio.validate();
    channel.validate();
}

void MobileEntity::validate() const {
    if (profile.empty())
        throw ConfigError("entity " + std::to_string(entity_id) + ": profile name required");
    if (route.empty())
        throw ConfigError("entity " + std::to_string(entity_id) + ": route must be non-empty");
    for (std::size_t i = 1; i < route.size(); ++i)
        if (!(route[i].t_s > route[i - 1].t_s))
            throw ConfigError("entity " + std::to_string(entity_id) +
                              ": waypoint times must be strictly increasing");
}

std::pair<double, double> MobileEntity::position(double t_s) const {
    if (route.empty()) throw DataError("entity has no route");
    if (t_s <= route.front().t_s) return {route.front().x_m, route.front().y_m};
    if (t_s >= route.back().t_s) return {route.back().x_m, route.back().y_m};
    std::size_t i = 1;
    while (route[i].t_s < t_s) ++i;
    const Waypoint& a = route[i - 1];
    const Waypoint& b = route[i];
    const double f = (t_s - a.t_s) / (b.t_s - a.t_s);
    return {a.x_m + f * (b.x_m - a.x_m), a.y_m + f * (b.y_m - a.y_m)};
}

std::optional<int> assign_cell(const std::vector<CellSite>& sites, double x_m, double y_m) {
    std::optional<int> best;
    double best_d2 = 0.0;
    for (const auto& s : sites) {
        const double dx = x_m - s.x_m;
        const double dy = y_m - s.y_m;
        const double d2 = dx * dx + dy * dy;
        if (d2 > s.radius_m * s.radius_m) continue;
        if (!best || d2 < best_d2 || (d2 == best_d2 && s.cell_id < *best)) {
            best = s.cell_id;
            best_d2 = d2;
        }
    }
    return best;
}

namespace {

// Roots of the crossing conditions along a linear piece p(s) = p0 + v*s,
// s in (0, len): site coverage boundaries (|p - c| = r, quadratic) and
// equidistance bisectors between site pairs (linear).
void crossing_candidates(const std::vector<CellSite>& sites, double p0x, double p0y, double vx,
                         double vy, double len, std::vector<double>& out) {
    const double v2 = vx * vx + vy * vy;
    if (v2 == 0.0) return; // static piece: assignment cannot change
    for (const auto& s : sites) {
        const double ex = p0x - s.x_m;
        const double ey = p0y - s.y_m;
        const double b = 2.0 * (vx * ex + vy * ey);
        const double c = ex * ex + ey * ey - s.radius_m * s.radius_m;
        const double disc = b * b - 4.0 * v2 * c;
        if (disc <= 0.0) continue;
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
        const double r1 = q / v2;
        if (r1 > 0.0 && r1 < len) out.push_back(r1);
        if (q != 0.0) {
            const double r2 = c / q;
            if (r2 > 0.0 && r2 < len) out.push_back(r2);
        }
    }
    for (std::size_t i = 0; i < sites.size(); ++i) {
        for (std::size_t j = i + 1; j < sites.size(); ++j) {
            const double mx = sites[j].x_m - sites[i].x_m;
            const double my = sites[j].y_m - sites[i].y_m;
            const double denom = 2.0 * (vx * mx + vy * my);
            if (denom == 0.0) continue;
            const double ci2 = sites[i].x_m * sites[i].x_m + sites[i].y_m * sites[i].y_m;
            const double cj2 = sites[j].x_m * sites[j].x_m + sites[j].y_m * sites[j].y_m;
            const double s0 = -(2.0 * (p0x * mx + p0y * my) + ci2 - cj2) / denom;
            if (s0 > 0.0 && s0 < len) out.push_back(s0);
        }
    }
}

} // namespace

std::vector<AssignmentSpan> entity_assignment(const std::vector<CellSite>& sites,
                                              const MobileEntity& entity, double horizon_s) {
    entity.validate();
    const double t0 = std::max(0.0, entity.active_start_s);
    const double t1 = std::min(horizon_s, entity.active_end_s);
    if (!(t0 < t1)) return {};

    // Piece boundaries at waypoint times keep the motion linear per piece.
    std::vector<double> cuts{t0};
    for (const auto& w : entity.route)
        if (w.t_s > t0 && w.t_s < t1) cuts.push_back(w.t_s);
    cuts.push_back(t1);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<AssignmentSpan> spans;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k];
        const double b = cuts[k + 1];
        const double len = b - a;
        const auto [p0x, p0y] = entity.position(a);
        const auto [p1x, p1y] = entity.position(b);
        const double vx = (p1x - p0x) / len;
        const double vy = (p1y - p0y) / len;

        std::vector<double> marks{0.0, len};
        crossing_candidates(sites, p0x, p0y, vx, vy, len, marks);
        std::sort(marks.begin(), marks.end());
        marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

        // The first and last subspans take the piece bounds exactly so that
        // consecutive pieces stitch without 1-ulp gaps.
        for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
            const double lo = i == 0 ? a : a + marks[i];
            const double hi = i + 2 == marks.size() ? b : a + marks[i + 1];
            if (!(hi > lo)) continue;
            const double mid = marks[i] + 0.5 * (marks[i + 1] - marks[i]);
            const std::optional<int> cell =
                assign_cell(sites, p0x + vx * mid, p0y + vy * mid);
            if (!spans.empty() && spans.back().cell == cell && spans.back().t1_s == lo)
                spans.back().t1_s = hi;
            else
                spans.push_back({lo, hi, cell});
        }
    }
    return spans;
}

double coverage_gap_fraction(const std::vector<CellSite>& sites,
                             const std::vector<MobileEntity>& entities, double horizon_s) {
    double active = 0.0;
    double gap = 0.0;
    for (const auto& e : entities) {
        for (const auto& span : entity_assignment(sites, e, horizon_s)) {
            const double len = span.t1_s - span.t0_s;
            active += len;
            if (!span.cell) gap += len;
        }
    }
    return active > 0.0 ? gap / active : 0.0;
}

namespace {

struct CountEvent {
    double t = 0.0;
    int cell = 0;
    std::string profile;
    int delta = 0;
};

} // namespace

std::vector<ConditionInterval> simulate_activity(const std::vector<CellSite>& sites,
                                                 const std::vector<MobileEntity>& entities,
                                                 double horizon_s, int hysteresis) {
    if (!(horizon_s > 0.0)) throw std::domain_error("simulate_activity: horizon must be > 0");
    if (hysteresis < 1) throw ConfigError("hysteresis must be >= 1");
    std::set<int> ids;
    for (const auto& s : sites) {
        if (!(s.radius_m > 0.0))
            throw ConfigError("cell " + std::to_string(s.cell_id) + ": radius must be > 0");
        if (!ids.insert(s.cell_id).second)
            throw ConfigError("duplicate cell_id " + std::to_string(s.cell_id));
    }

    std::vector<CountEvent> events;
    for (const auto& e : entities) {
        for (const auto& span : entity_assignment(sites, e, horizon_s)) {
            if (!span.cell) continue;
            events.push_back({span.t0_s, *span.cell, e.profile, +1});
            if (span.t1_s < horizon_s) events.push_back({span.t1_s, *span.cell, e.profile, -1});
        }
    }
    std::sort(events.begin(), events.end(),
              [](const CountEvent& a, const CountEvent& b) { return a.t < b.t; });

    std::map<int, std::map<std::string, int>> actual;
    std::map<int, std::map<std::string, int>> reported;
    std::map<int, double> open_at;
    for (const auto& s : sites) open_at[s.cell_id] = 0.0;

    std::vector<ConditionInterval> out;
    auto emit = [&](int cell, double t0, double t1) {
        ConditionInterval iv{cell, t0, t1, {}};
        for (const auto& [profile, count] : reported[cell])
            if (count != 0) iv.device_counts[profile] = count;
        out.push_back(std::move(iv));
    };

    std::size_t i = 0;
    // Changes at t = 0 define the initial conditions, not a cut.
    while (i < events.size() && events[i].t == 0.0) {
        actual[events[i].cell][events[i].profile] += events[i].delta;
        ++i;
    }
    reported = actual;

    while (i < events.size() && events[i].t < horizon_s) {
        const double t = events[i].t;
        std::set<int> touched;
        while (i < events.size() && events[i].t == t) {
            actual[events[i].cell][events[i].profile] += events[i].delta;
            touched.insert(events[i].cell);
            ++i;
        }
        for (int cell : touched) {
            // Reported keys are always a subset of actual keys (counts are
            // never erased), so scanning actual covers every profile.
            bool cut = false;
            const auto& rep_counts = reported[cell];
            for (const auto& [profile, count] : actual[cell]) {
                const auto it = rep_counts.find(profile);
                const int seen = it == rep_counts.end() ? 0 : it->second;
                if (std::abs(count - seen) >= hysteresis) cut = true;
            }
            if (!cut) continue;
            emit(cell, open_at[cell], t);
            reported[cell] = actual[cell];
            open_at[cell] = t;
        }
    }

    for (const auto& s : sites) emit(s.cell_id, open_at[s.cell_id], horizon_s);

    std::sort(out.begin(), out.end(), [](const ConditionInterval& a, const ConditionInterval& b) {
        if (a.cell_id != b.cell_id) return a.cell_id < b.cell_id;
        return a.t0_s < b.t0_s;
    });
    return out;
}

ActivityStats activity_stats(const std::vector<ConditionInterval>& intervals) {
    ActivityStats st;
    st.interval_count = intervals.size();
    if (intervals.empty()) return st;

    double total_len = 0.0;
    double occupancy_time = 0.0;
    std::map<int, std::size_t> per_cell;
    double horizon = 0.0;
    for (const auto& iv : intervals) {
        const double len = iv.t1_s - iv.t0_s;
        st.interval_lengths.push_back(len);
        total_len += len;
        int devices = 0;
        for (const auto& [profile, count] : iv.device_counts) devices += count;
        occupancy_time += static_cast<double>(devices) * len;
        per_cell[iv.cell_id] += 1;
        horizon = std::max(horizon, iv.t1_s);
    }
    st.mean_interval_s = total_len / static_cast<double>(intervals.size());
    st.mean_occupancy = occupancy_time / total_len;
    std::size_t cuts = 0;
    for (const auto& [cell, n] : per_cell) cuts += n - 1;
    st.change_rate_per_s =
        horizon > 0.0 ? static_cast<double>(cuts) / (horizon * static_cast<double>(per_cell.size()))
                      : 0.0;
    return st;
}

ActivityReport validate_activity(const std::vector<ConditionInterval>& intervals,
                                 const ActivityStats& reference, double ks_tolerance,
                                 double mean_tolerance) {
    if (intervals.empty()) throw DataError("validate_activity: no intervals");
    ActivityReport rep;
    rep.stats = activity_stats(intervals);
    if (reference.interval_count == 0) return rep; // descriptive only

    auto rel_err = [](double value, double ref) {
        if (ref == 0.0) return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return std::fabs(value - ref) / std::fabs(ref);
    };
    auto add_mean_metric = [&](const std::string& name, double value, double ref) {
        ActivityMetric m{name, value, ref, rel_err(value, ref), true};
        m.pass = m.error < mean_tolerance;
        rep.metrics.push_back(m);
    };

    if (!reference.interval_lengths.empty()) {
        ActivityMetric m{"interval_length_ks", 0.0, 0.0, 0.0, true};
        m.error = ks_two_sample(rep.stats.interval_lengths, reference.interval_lengths);
        m.value = m.error;
        m.pass = m.error < ks_tolerance;
        rep.metrics.push_back(m);
    }
    add_mean_metric("mean_interval_s", rep.stats.mean_interval_s, reference.mean_interval_s);
    add_mean_metric("mean_occupancy", rep.stats.mean_occupancy, reference.mean_occupancy);
    add_mean_metric("change_rate_per_s", rep.stats.change_rate_per_s, reference.change_rate_per_s);

    for (const auto& m : rep.metrics) rep.pass = rep.pass && m.pass;
    return rep;
}

} // namespace vertsim
