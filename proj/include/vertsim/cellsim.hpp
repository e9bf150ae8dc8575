#ifndef VERTSIM_CELLSIM_HPP
#define VERTSIM_CELLSIM_HPP

#include "vertsim/channel.hpp"
#include "vertsim/common.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace vertsim {

enum class TrafficRegime { Poisson, PeriodicSync, PeriodicAsync };

std::string regime_name(TrafficRegime r);
TrafficRegime regime_from_name(const std::string& s);

struct TrafficProfile {
    std::string name;
    double packet_rate_hz = 1.0;
    double packet_size_bytes = 200.0;
    TrafficRegime regime = TrafficRegime::Poisson;

    void validate() const;
};

// Detailed-simulator knobs.
struct CellSimParams {
    double outage_snr_db = -5.0;          // below this at tx start the packet drops
    double delay_budget_s = 1.0;          // queue sojourn limit at service start
    double spectral_efficiency_cap = 7.4; // bit/s/Hz ceiling on the Shannon rate
};

// Condition vector of one cell over one span of constant conditions:
// per-profile device counts plus the radio/channel context they live in.
struct CellConditions {
    std::map<std::string, int> device_counts;
    std::vector<TrafficProfile> profiles;
    double cell_radius_m = 100.0;
    RadioConfig radio;
    ChannelModelConfig channel;

    const TrafficProfile* find_profile(const std::string& name) const;
    int total_devices() const;
    void validate() const;
};

struct PacketRecord {
    std::int64_t packet_id = 0;
    std::int64_t device_id = 0;
    std::string profile;
    double created_at_s = 0.0;
    double delay_ms = 0.0;        // NaN when dropped
    bool dropped = false;
    double throughput_bps = 0.0;  // packet bits / sojourn; 0 when dropped
    double snr_db = 0.0;          // at tx start; NaN if the packet never transmitted
};

// Simulates one cell under fixed conditions. Devices are placed uniformly in
// the disk, each with a per-run LOS state and shadowing draw; every packet
// draws its own small-scale fading at transmission start. Service is
// egalitarian processor sharing across backlogged devices with FIFO queues
// per device. Arrivals are generated over [0, duration); queues drain past
// the horizon so that every generated packet is either delivered or dropped.
std::vector<PacketRecord> run_cell(const CellConditions& conditions, double duration_s,
                                   std::uint64_t seed, const CellSimParams& params = {});

enum class SweepDimension { DeviceCount, CellRadius, PacketRate, LosDecay };

std::string dimension_name(SweepDimension d);
SweepDimension dimension_from_name(const std::string& s);

struct SweepAxis {
    SweepDimension dimension = SweepDimension::DeviceCount;
    std::string profile; // required for DeviceCount / PacketRate
    std::vector<double> values;

    std::string label() const; // e.g. "devices:car", "radius"
};

struct SweepGrid {
    std::vector<SweepAxis> axes;
    int replications = 1;
    std::uint64_t seed_base = 0;

    std::size_t point_count() const;
    std::vector<double> point_values(std::size_t point_index) const;
    std::vector<std::string> axis_labels() const;
    void validate() const;
};

CellConditions apply_point(const CellConditions& base, const SweepGrid& grid,
                           std::size_t point_index);

struct SweepPointResult {
    std::size_t point_index = 0;
    int replication = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;
    std::vector<PacketRecord> records;
    std::string error; // non-empty when this point failed
};

struct SweepDataset {
    SweepGrid grid;
    CellConditions base;
    double duration_s = 0.0;
    CellSimParams params;
    std::vector<SweepPointResult> points; // point-major, replication-minor order
};

// Runs run_cell at every grid point x replication; per-point failures are
// recorded without aborting the sweep. Points may run on parallel workers;
// the result order is always grid order.
SweepDataset run_sweep(const CellConditions& base, const SweepGrid& grid, double duration_s,
                       const CellSimParams& params = {}, int workers = 1);

} // namespace vertsim

#endif
