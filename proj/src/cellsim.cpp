#include "vertsim/cellsim.hpp"

#include "vertsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace vertsim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct Arrival {
    double time;
    int device;
    std::size_t packet; // index into the record vector, set after sorting
};

struct DeviceState {
    const TrafficProfile* profile = nullptr;
    LosState los = LosState::Los;
    double static_loss_db = 0.0; // path loss + shadowing + extra losses, fixed per run
    Rng fading_rng{0};
    std::deque<std::size_t> queue;
    bool serving = false;
    std::size_t head = 0;
    double remaining_bits = 0.0;
    double rate_bps = 0.0;
};

} // namespace

std::string regime_name(TrafficRegime r) {
    switch (r) {
    case TrafficRegime::Poisson: return "poisson";
    case TrafficRegime::PeriodicSync: return "periodic_sync";
    case TrafficRegime::PeriodicAsync: return "periodic_async";
    }
    throw std::logic_error("unreachable");
}

TrafficRegime regime_from_name(const std::string& s) {
    if (s == "poisson") return TrafficRegime::Poisson;
    if (s == "periodic_sync") return TrafficRegime::PeriodicSync;
    if (s == "periodic_async") return TrafficRegime::PeriodicAsync;
    throw ConfigError("unknown traffic regime: " + s);
}

void TrafficProfile::validate() const {
    if (name.empty()) throw ConfigError("traffic profile needs a name");
    if (!(packet_rate_hz > 0.0)) throw ConfigError("profile " + name + ": packet_rate must be > 0");
    if (!(packet_size_bytes > 0.0)) throw ConfigError("profile " + name + ": packet_size must be > 0");
}

const TrafficProfile* CellConditions::find_profile(const std::string& name) const {
    for (const auto& p : profiles)
        if (p.name == name) return &p;
    return nullptr;
}

int CellConditions::total_devices() const {
    int n = 0;
    for (const auto& [name, count] : device_counts) n += count;
    return n;
}

void CellConditions::validate() const {
    if (!(cell_radius_m > 0.0)) throw ConfigError("cell_radius must be > 0");
    radio.validate();
    channel.validate();
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        profiles[i].validate();
        for (std::size_t j = i + 1; j < profiles.size(); ++j)
            if (profiles[i].name == profiles[j].name)
                throw ConfigError("duplicate traffic profile: " + profiles[i].name);
    }
    for (const auto& [name, count] : device_counts) {
        if (count < 0) throw ConfigError("device count for " + name + " must be >= 0");
        if (!find_profile(name)) throw ConfigError("device count references unknown profile: " + name);
    }
}

std::vector<PacketRecord> run_cell(const CellConditions& conditions, double duration_s,
                                   std::uint64_t seed, const CellSimParams& params) {
    conditions.validate();
    if (!(duration_s > 0.0)) throw std::domain_error("run_cell: duration must be > 0");
    if (!(params.delay_budget_s > 0.0)) throw ConfigError("delay_budget must be > 0");
    if (!(params.spectral_efficiency_cap > 0.0)) throw ConfigError("spectral_efficiency_cap must be > 0");

    const RadioConfig& radio = conditions.radio;
    const ChannelModelConfig& channel = conditions.channel;
    const double height_diff = radio.tx_height_m - radio.rx_height_m;

    // Devices are quasi-static within a run: placement, LOS state and
    // shadowing are drawn once; only small-scale fading is per packet.
    // Each device owns a derived RNG stream, so its draws do not depend on
    // what other devices do.
    std::vector<DeviceState> devices;
    std::vector<Arrival> arrivals;
    for (const auto& [name, count] : conditions.device_counts) {
        const TrafficProfile* profile = conditions.find_profile(name);
        for (int i = 0; i < count; ++i) {
            const int id = static_cast<int>(devices.size());
            Rng rng(derive_seed(seed, "device", static_cast<std::uint64_t>(id)));

            DeviceState dev;
            dev.profile = profile;
            const double r = conditions.cell_radius_m * std::sqrt(uniform_open01(rng));
            const double dist = std::hypot(r, height_diff);
            dev.los = sample_los(dist, channel.d_los_m, rng) ? LosState::Los : LosState::Nlos;
            const double shadow = sample_shadowing_db(channel.shadowing_sigma_db(dev.los), rng);
            dev.static_loss_db = channel.path_loss_db(dev.los, dist, shadow) +
                                 extra_losses_db(channel.extra, radio.carrier_frequency_hz, dist);

            const double rate = profile->packet_rate_hz;
            switch (profile->regime) {
            case TrafficRegime::Poisson:
                for (double t = -std::log(uniform_open01(rng)) / rate; t < duration_s;
                     t += -std::log(uniform_open01(rng)) / rate)
                    arrivals.push_back({t, id, 0});
                break;
            case TrafficRegime::PeriodicSync:
                for (std::int64_t k = 0;; ++k) {
                    const double t = static_cast<double>(k) / rate;
                    if (t >= duration_s) break;
                    arrivals.push_back({t, id, 0});
                }
                break;
            case TrafficRegime::PeriodicAsync: {
                const double phase = uniform_open01(rng) / rate;
                for (std::int64_t k = 0;; ++k) {
                    const double t = phase + static_cast<double>(k) / rate;
                    if (t >= duration_s) break;
                    arrivals.push_back({t, id, 0});
                }
                break;
            }
            }
            dev.fading_rng = rng;
            devices.push_back(std::move(dev));
        }
    }

    // Per-device arrival times are strictly increasing, so sorting by
    // (time, device) keeps every device's FIFO order intact.
    std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.device < b.device;
    });

    std::vector<PacketRecord> records(arrivals.size());
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        arrivals[i].packet = i;
        PacketRecord& rec = records[i];
        rec.packet_id = static_cast<std::int64_t>(i);
        rec.device_id = arrivals[i].device;
        rec.profile = devices[arrivals[i].device].profile->name;
        rec.created_at_s = arrivals[i].time;
        rec.delay_ms = kNan;
        rec.dropped = false;
        rec.throughput_bps = 0.0;
        rec.snr_db = kNan;
    }

    // Pops packets off the device queue until one survives the sojourn and
    // outage checks and enters service, or the queue empties. Drops consume
    // no time; budget-dropped packets never transmit, so they draw no fading.
    auto start_service = [&](DeviceState& dev, double now) -> bool {
        while (!dev.queue.empty()) {
            const std::size_t idx = dev.queue.front();
            PacketRecord& rec = records[idx];
            if (now - rec.created_at_s > params.delay_budget_s) {
                dev.queue.pop_front();
                rec.dropped = true;
                continue;
            }
            const double fading = sample_fading_db(dev.los, channel.rice_k_db, dev.fading_rng);
            const double snr = link_snr_db(radio, dev.static_loss_db, fading);
            rec.snr_db = snr;
            if (snr < params.outage_snr_db) {
                dev.queue.pop_front();
                rec.dropped = true;
                continue;
            }
            const double se = std::min(std::log2(1.0 + std::pow(10.0, snr / 10.0)),
                                       params.spectral_efficiency_cap);
            dev.queue.pop_front();
            dev.serving = true;
            dev.head = idx;
            dev.rate_bps = radio.bandwidth_hz * se;
            dev.remaining_bits = dev.profile->packet_size_bytes * 8.0;
            return true;
        }
        dev.serving = false;
        return false;
    };

    // Egalitarian processor sharing: with k backlogged devices, each head
    // packet drains at its own link rate divided by k. Arrivals stop at the
    // horizon but queues drain past it, so every packet is resolved.
    std::vector<int> active;
    double now = 0.0;
    std::size_t next_arrival = 0;
    const double inf = std::numeric_limits<double>::infinity();

    auto advance_to = [&](double t) {
        const double dt = t - now;
        if (dt > 0.0 && !active.empty()) {
            const double share = dt / static_cast<double>(active.size());
            for (int id : active) {
                DeviceState& dev = devices[id];
                dev.remaining_bits = std::max(0.0, dev.remaining_bits - dev.rate_bps * share);
            }
        }
        now = t;
    };

    while (true) {
        double min_unit = inf;
        int completing = -1;
        for (int id : active) {
            const double unit = devices[id].remaining_bits / devices[id].rate_bps;
            if (unit < min_unit) {
                min_unit = unit;
                completing = id;
            }
        }
        const double t_complete =
            active.empty() ? inf : now + min_unit * static_cast<double>(active.size());
        const double t_arrival = next_arrival < arrivals.size() ? arrivals[next_arrival].time : inf;
        if (t_arrival == inf && active.empty()) break;

        if (t_arrival <= t_complete) {
            advance_to(t_arrival);
            const Arrival& a = arrivals[next_arrival++];
            DeviceState& dev = devices[a.device];
            dev.queue.push_back(a.packet);
            if (!dev.serving && start_service(dev, now)) active.push_back(a.device);
        } else {
            advance_to(t_complete);
            DeviceState& dev = devices[completing];
            dev.remaining_bits = 0.0;
            PacketRecord& rec = records[dev.head];
            const double delay_s = now - rec.created_at_s;
            rec.delay_ms = delay_s * 1e3;
            rec.throughput_bps = dev.profile->packet_size_bytes * 8.0 / delay_s;
            if (!start_service(dev, now))
                active.erase(std::find(active.begin(), active.end(), completing));
        }
    }

    return records;
}

std::string dimension_name(SweepDimension d) {
    switch (d) {
    case SweepDimension::DeviceCount: return "devices";
    case SweepDimension::CellRadius: return "radius";
    case SweepDimension::PacketRate: return "rate";
    case SweepDimension::LosDecay: return "d_los";
    }
    throw std::logic_error("unreachable");
}

SweepDimension dimension_from_name(const std::string& s) {
    if (s == "devices") return SweepDimension::DeviceCount;
    if (s == "radius") return SweepDimension::CellRadius;
    if (s == "rate") return SweepDimension::PacketRate;
    if (s == "d_los") return SweepDimension::LosDecay;
    throw ConfigError("unknown sweep dimension: " + s);
}

std::string SweepAxis::label() const {
    const std::string base = dimension_name(dimension);
    if (dimension == SweepDimension::DeviceCount || dimension == SweepDimension::PacketRate)
        return base + ":" + profile;
    return base;
}

std::size_t SweepGrid::point_count() const {
    std::size_t n = 1;
    for (const auto& ax : axes) n *= ax.values.size();
    return n;
}

std::vector<double> SweepGrid::point_values(std::size_t point_index) const {
    std::vector<double> vals(axes.size());
    std::size_t rem = point_index;
    for (std::size_t i = axes.size(); i-- > 0;) {
        const std::size_t n = axes[i].values.size();
        vals[i] = axes[i].values[rem % n];
        rem /= n;
    }
    if (rem != 0) throw std::domain_error("sweep point index out of range");
    return vals;
}

std::vector<std::string> SweepGrid::axis_labels() const {
    std::vector<std::string> out;
    out.reserve(axes.size());
    for (const auto& ax : axes) out.push_back(ax.label());
    return out;
}

void SweepGrid::validate() const {
    if (replications < 1) throw ConfigError("sweep replications must be >= 1");
    for (const auto& ax : axes) {
        if (ax.values.empty()) throw ConfigError("sweep axis " + ax.label() + " has no values");
        if ((ax.dimension == SweepDimension::DeviceCount ||
             ax.dimension == SweepDimension::PacketRate) &&
            ax.profile.empty())
            throw ConfigError("sweep axis " + dimension_name(ax.dimension) +
                              " requires a profile name");
    }
    for (std::size_t i = 0; i < axes.size(); ++i)
        for (std::size_t j = i + 1; j < axes.size(); ++j)
            if (axes[i].label() == axes[j].label())
                throw ConfigError("duplicate sweep axis: " + axes[i].label());
}

CellConditions apply_point(const CellConditions& base, const SweepGrid& grid,
                           std::size_t point_index) {
    CellConditions c = base;
    const std::vector<double> vals = grid.point_values(point_index);
    for (std::size_t i = 0; i < grid.axes.size(); ++i) {
        const SweepAxis& ax = grid.axes[i];
        const double v = vals[i];
        switch (ax.dimension) {
        case SweepDimension::DeviceCount: {
            if (v < 0.0 || v != std::floor(v))
                throw ConfigError("axis " + ax.label() + ": counts must be non-negative integers");
            if (!c.find_profile(ax.profile))
                throw ConfigError("axis " + ax.label() + ": unknown profile");
            c.device_counts[ax.profile] = static_cast<int>(v);
            break;
        }
        case SweepDimension::CellRadius:
            c.cell_radius_m = v;
            break;
        case SweepDimension::PacketRate: {
            bool found = false;
            for (auto& p : c.profiles) {
                if (p.name == ax.profile) {
                    p.packet_rate_hz = v;
                    found = true;
                }
            }
            if (!found) throw ConfigError("axis " + ax.label() + ": unknown profile");
            break;
        }
        case SweepDimension::LosDecay:
            c.channel.d_los_m = v;
            break;
        }
    }
    c.validate();
    return c;
}

SweepDataset run_sweep(const CellConditions& base, const SweepGrid& grid, double duration_s,
                       const CellSimParams& params, int workers) {
    grid.validate();
    base.validate();
    if (!(duration_s > 0.0)) throw std::domain_error("run_sweep: duration must be > 0");

    SweepDataset ds;
    ds.grid = grid;
    ds.base = base;
    ds.duration_s = duration_s;
    ds.params = params;

    const std::size_t reps = static_cast<std::size_t>(grid.replications);
    const std::size_t tasks = grid.point_count() * reps;
    ds.points.resize(tasks);

    parallel_for(tasks, workers, [&](std::size_t task) {
        const std::size_t point = task / reps;
        const int rep = static_cast<int>(task % reps);
        SweepPointResult& out = ds.points[task];
        out.point_index = point;
        out.replication = rep;
        out.seed = grid.seed_base ^ static_cast<std::uint64_t>(point) ^
                   static_cast<std::uint64_t>(rep);
        out.values = grid.point_values(point);
        try {
            out.records = run_cell(apply_point(base, grid, point), duration_s, out.seed, params);
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });
    return ds;
}

} // namespace vertsim
