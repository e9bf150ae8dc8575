#ifndef VERTSIM_URBAN_HPP
#define VERTSIM_URBAN_HPP

#include "vertsim/cellsim.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vertsim {

struct CellSite {
    int cell_id = 0;
    double x_m = 0.0;
    double y_m = 0.0;
    double radius_m = 100.0;
    RadioConfig radio;
    ChannelModelConfig channel;

    void validate() const;
};

struct Waypoint {
    double x_m = 0.0;
    double y_m = 0.0;
    double t_s = 0.0;
};

struct MobileEntity {
    int entity_id = 0;
    std::string profile;
    std::vector<Waypoint> route; // times strictly increasing
    double active_start_s = 0.0;
    double active_end_s = std::numeric_limits<double>::infinity();

    void validate() const;
    // Piecewise-linear position; clamped to the end positions outside the
    // waypoint time span.
    std::pair<double, double> position(double t_s) const;
};

// Counts are the reported (hysteresis-frozen) per-profile device counts of
// the cell over [t0, t1). Per cell the intervals partition [0, horizon).
struct ConditionInterval {
    int cell_id = 0;
    double t0_s = 0.0;
    double t1_s = 0.0;
    std::map<std::string, int> device_counts;
};

// Nearest covering site: minimal distance among sites with distance <=
// radius, ties to the lowest cell_id, nullopt when nothing covers.
std::optional<int> assign_cell(const std::vector<CellSite>& sites, double x_m, double y_m);

// The entity's cell assignment over [0, horizon) clipped to its active
// window, with exact crossing times. Spans with cell == nullopt are coverage
// gaps; consecutive spans always differ in assignment.
struct AssignmentSpan {
    double t0_s = 0.0;
    double t1_s = 0.0;
    std::optional<int> cell;
};

std::vector<AssignmentSpan> entity_assignment(const std::vector<CellSite>& sites,
                                              const MobileEntity& entity, double horizon_s);

// Fraction of active entity-time spent outside every cell, over [0, horizon).
double coverage_gap_fraction(const std::vector<CellSite>& sites,
                             const std::vector<MobileEntity>& entities, double horizon_s);

// Moves every entity along its route, tracks per-cell per-profile counts and
// cuts a cell's interval when some profile count drifted >= hysteresis from
// the reported value. A handover changes both cells at the same instant.
// Output is sorted by (cell_id, t0); every site emits at least one interval.
std::vector<ConditionInterval> simulate_activity(const std::vector<CellSite>& sites,
                                                 const std::vector<MobileEntity>& entities,
                                                 double horizon_s, int hysteresis = 1);

struct ActivityStats {
    std::size_t interval_count = 0;
    double mean_interval_s = 0.0;
    double mean_occupancy = 0.0;       // time-weighted device count per cell
    double change_rate_per_s = 0.0;    // interval cuts per cell-second
    double coverage_gap_fraction = 0.0; // needs entity routes; 0 from intervals alone
    std::vector<double> interval_lengths;
};

ActivityStats activity_stats(const std::vector<ConditionInterval>& intervals);

struct ActivityMetric {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double error = 0.0; // KS distance or relative error of means
    bool pass = true;
};

struct ActivityReport {
    ActivityStats stats;
    std::vector<ActivityMetric> metrics;
    bool pass = true;
};

// Compares interval statistics against a reference: interval-length KS plus
// relative errors of mean length, occupancy and change rate. A reference
// with interval_count == 0 yields a descriptive report that passes vacuously.
ActivityReport validate_activity(const std::vector<ConditionInterval>& intervals,
                                 const ActivityStats& reference, double ks_tolerance = 0.05,
                                 double mean_tolerance = 0.10);

} // namespace vertsim

#endif
