#include "vertsim/config.hpp"

#include "vertsim/channel.hpp"
#include "vertsim/errors.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace vertsim {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) throw ConfigError("unknown key '" + it.key() + "' in " + context);
    }
}

double num_or(const json& j, const char* key, double def, const std::string& context) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number())
        throw ConfigError(context + "." + key + " must be a number");
    return j.at(key).get<double>();
}

double num_req(const json& j, const char* key, const std::string& context) {
    if (!j.contains(key)) throw ConfigError(context + " requires key '" + key + "'");
    return num_or(j, key, 0.0, context);
}

int int_or(const json& j, const char* key, int def, const std::string& context) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number_integer())
        throw ConfigError(context + "." + key + " must be an integer");
    return j.at(key).get<int>();
}

int int_req(const json& j, const char* key, const std::string& context) {
    if (!j.contains(key)) throw ConfigError(context + " requires key '" + key + "'");
    return int_or(j, key, 0, context);
}

std::uint64_t uint64_or(const json& j, const char* key, std::uint64_t def,
                        const std::string& context) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer())
        throw ConfigError(context + "." + key + " must be a non-negative integer");
    return j.at(key).get<std::uint64_t>();
}

std::string str_req(const json& j, const char* key, const std::string& context) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw ConfigError(context + " requires string key '" + key + "'");
    return j.at(key).get<std::string>();
}

std::string str_or(const json& j, const char* key, const std::string& def,
                   const std::string& context) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_string()) throw ConfigError(context + "." + key + " must be a string");
    return j.at(key).get<std::string>();
}

CiModelParams ci_from_json(const json& j, double frequency_hz, const std::string& context) {
    check_keys(j, {"d0_m", "pl_d0_db", "n", "sigma_db"}, context);
    CiModelParams p;
    p.d0_m = num_or(j, "d0_m", 1.0, context);
    p.n = num_or(j, "n", p.n, context);
    p.sigma_db = num_or(j, "sigma_db", 0.0, context);
    p.pl_d0_db = j.contains("pl_d0_db") ? num_or(j, "pl_d0_db", 0.0, context)
                                        : fspl_db(frequency_hz, p.d0_m);
    return p;
}

json ci_to_json(const CiModelParams& p) {
    return json{{"d0_m", p.d0_m}, {"pl_d0_db", p.pl_d0_db}, {"n", p.n}, {"sigma_db", p.sigma_db}};
}

AbModelParams ab_from_json(const json& j, const std::string& context) {
    check_keys(j, {"alpha_db", "beta", "sigma_db"}, context);
    AbModelParams p;
    p.alpha_db = num_or(j, "alpha_db", p.alpha_db, context);
    p.beta = num_or(j, "beta", p.beta, context);
    p.sigma_db = num_or(j, "sigma_db", p.sigma_db, context);
    return p;
}

json ab_to_json(const AbModelParams& p) {
    return json{{"alpha_db", p.alpha_db}, {"beta", p.beta}, {"sigma_db", p.sigma_db}};
}

} // namespace

const std::vector<DistFamily>& FitConfig::candidates(Kpi kpi) const {
    switch (kpi) {
    case Kpi::Delay: return delay_candidates;
    case Kpi::DropProbability: return drop_candidates;
    case Kpi::Throughput: return throughput_candidates;
    }
    throw std::logic_error("unreachable");
}

std::vector<CellConditions> ValidateConfig::conditions() const {
    std::vector<CellConditions> out;
    out.reserve(points.size());
    for (const auto& overrides : points) {
        CellConditions c = base;
        for (const auto& [label, value] : overrides) apply_axis_value(c, label, value);
        c.validate();
        out.push_back(std::move(c));
    }
    return out;
}

void apply_axis_value(CellConditions& c, const std::string& label, double value) {
    const auto colon = label.find(':');
    const std::string dim = label.substr(0, colon);
    const std::string profile = colon == std::string::npos ? "" : label.substr(colon + 1);
    if (dim == "devices") {
        if (profile.empty()) throw ConfigError("axis label devices needs a profile");
        if (value < 0.0 || value != static_cast<double>(static_cast<int>(value)))
            throw ConfigError("device count for " + profile + " must be a non-negative integer");
        if (!c.find_profile(profile))
            throw ConfigError("axis label devices references unknown profile: " + profile);
        c.device_counts[profile] = static_cast<int>(value);
        return;
    }
    if (dim == "radius") {
        c.cell_radius_m = value;
        return;
    }
    if (dim == "rate") {
        for (auto& p : c.profiles) {
            if (p.name == profile) {
                p.packet_rate_hz = value;
                return;
            }
        }
        throw ConfigError("axis label rate references unknown profile: " + profile);
    }
    if (dim == "d_los") {
        c.channel.d_los_m = value;
        return;
    }
    throw ConfigError("unknown axis label: " + label);
}

RadioConfig radio_from_json(const json& j, const std::string& context) {
    check_keys(j,
               {"carrier_frequency_hz", "tx_power_dbm", "tx_antenna_gain_dbi",
                "rx_antenna_gain_dbi", "tx_height_m", "rx_height_m", "noise_figure_db",
                "bandwidth_hz"},
               context);
    RadioConfig r;
    r.carrier_frequency_hz = num_or(j, "carrier_frequency_hz", r.carrier_frequency_hz, context);
    r.tx_power_dbm = num_or(j, "tx_power_dbm", r.tx_power_dbm, context);
    r.tx_antenna_gain_dbi = num_or(j, "tx_antenna_gain_dbi", r.tx_antenna_gain_dbi, context);
    r.rx_antenna_gain_dbi = num_or(j, "rx_antenna_gain_dbi", r.rx_antenna_gain_dbi, context);
    r.tx_height_m = num_or(j, "tx_height_m", r.tx_height_m, context);
    r.rx_height_m = num_or(j, "rx_height_m", r.rx_height_m, context);
    r.noise_figure_db = num_or(j, "noise_figure_db", r.noise_figure_db, context);
    r.bandwidth_hz = num_or(j, "bandwidth_hz", r.bandwidth_hz, context);
    return r;
}

json radio_to_json(const RadioConfig& r) {
    return json{{"carrier_frequency_hz", r.carrier_frequency_hz},
                {"tx_power_dbm", r.tx_power_dbm},
                {"tx_antenna_gain_dbi", r.tx_antenna_gain_dbi},
                {"rx_antenna_gain_dbi", r.rx_antenna_gain_dbi},
                {"tx_height_m", r.tx_height_m},
                {"rx_height_m", r.rx_height_m},
                {"noise_figure_db", r.noise_figure_db},
                {"bandwidth_hz", r.bandwidth_hz}};
}

ChannelModelConfig channel_from_json(const json& j, double carrier_frequency_hz,
                                     const std::string& context) {
    check_keys(j,
               {"model", "ci_los", "ci_nlos", "ab_los", "ab_nlos", "extra", "d_los_m",
                "rice_k_db"},
               context);
    ChannelModelConfig c;
    const std::string model = str_or(j, "model", "ci", context);
    if (model == "ci")
        c.model = PathLossModel::Ci;
    else if (model == "ab")
        c.model = PathLossModel::Ab;
    else
        throw ConfigError(context + ".model must be \"ci\" or \"ab\"");
    if (j.contains("ci_los"))
        c.ci_los = ci_from_json(j.at("ci_los"), carrier_frequency_hz, context + ".ci_los");
    else
        c.ci_los.pl_d0_db = fspl_db(carrier_frequency_hz, c.ci_los.d0_m);
    if (j.contains("ci_nlos"))
        c.ci_nlos = ci_from_json(j.at("ci_nlos"), carrier_frequency_hz, context + ".ci_nlos");
    else
        c.ci_nlos.pl_d0_db = fspl_db(carrier_frequency_hz, c.ci_nlos.d0_m);
    if (j.contains("ab_los")) c.ab_los = ab_from_json(j.at("ab_los"), context + ".ab_los");
    if (j.contains("ab_nlos")) c.ab_nlos = ab_from_json(j.at("ab_nlos"), context + ".ab_nlos");
    if (j.contains("extra")) {
        const json& e = j.at("extra");
        check_keys(e, {"rain_rate_mm_h", "atmospheric_db_km", "penetration_db"},
                   context + ".extra");
        c.extra.rain_rate_mm_h = num_or(e, "rain_rate_mm_h", 0.0, context);
        c.extra.atmospheric_db_km = num_or(e, "atmospheric_db_km", 0.0, context);
        c.extra.penetration_db = num_or(e, "penetration_db", 0.0, context);
    }
    c.d_los_m = num_or(j, "d_los_m", c.d_los_m, context);
    c.rice_k_db = num_or(j, "rice_k_db", c.rice_k_db, context);
    return c;
}

json channel_to_json(const ChannelModelConfig& c) {
    return json{{"model", c.model == PathLossModel::Ci ? "ci" : "ab"},
                {"ci_los", ci_to_json(c.ci_los)},
                {"ci_nlos", ci_to_json(c.ci_nlos)},
                {"ab_los", ab_to_json(c.ab_los)},
                {"ab_nlos", ab_to_json(c.ab_nlos)},
                {"extra",
                 json{{"rain_rate_mm_h", c.extra.rain_rate_mm_h},
                      {"atmospheric_db_km", c.extra.atmospheric_db_km},
                      {"penetration_db", c.extra.penetration_db}}},
                {"d_los_m", c.d_los_m},
                {"rice_k_db", c.rice_k_db}};
}

TrafficProfile profile_from_json(const json& j, const std::string& context) {
    check_keys(j, {"name", "packet_rate_hz", "packet_size_bytes", "regime"}, context);
    TrafficProfile p;
    p.name = str_req(j, "name", context);
    p.packet_rate_hz = num_or(j, "packet_rate_hz", p.packet_rate_hz, context);
    p.packet_size_bytes = num_or(j, "packet_size_bytes", p.packet_size_bytes, context);
    p.regime = regime_from_name(str_or(j, "regime", "poisson", context));
    return p;
}

json profile_to_json(const TrafficProfile& p) {
    return json{{"name", p.name},
                {"packet_rate_hz", p.packet_rate_hz},
                {"packet_size_bytes", p.packet_size_bytes},
                {"regime", regime_name(p.regime)}};
}

CellSimParams sim_params_from_json(const json& j, const std::string& context) {
    check_keys(j, {"outage_snr_db", "delay_budget_s", "spectral_efficiency_cap"}, context);
    CellSimParams p;
    p.outage_snr_db = num_or(j, "outage_snr_db", p.outage_snr_db, context);
    p.delay_budget_s = num_or(j, "delay_budget_s", p.delay_budget_s, context);
    p.spectral_efficiency_cap = num_or(j, "spectral_efficiency_cap", p.spectral_efficiency_cap,
                                       context);
    return p;
}

json sim_params_to_json(const CellSimParams& p) {
    return json{{"outage_snr_db", p.outage_snr_db},
                {"delay_budget_s", p.delay_budget_s},
                {"spectral_efficiency_cap", p.spectral_efficiency_cap}};
}

CellConditions conditions_from_json(const json& j, const std::string& context) {
    check_keys(j, {"cell_radius_m", "device_counts", "profiles", "radio", "channel"}, context);
    CellConditions c;
    c.cell_radius_m = num_or(j, "cell_radius_m", c.cell_radius_m, context);
    if (j.contains("radio")) c.radio = radio_from_json(j.at("radio"), context + ".radio");
    if (j.contains("channel"))
        c.channel =
            channel_from_json(j.at("channel"), c.radio.carrier_frequency_hz, context + ".channel");
    else
        c.channel.ci_los.pl_d0_db = c.channel.ci_nlos.pl_d0_db =
            fspl_db(c.radio.carrier_frequency_hz, 1.0);
    if (j.contains("profiles")) {
        if (!j.at("profiles").is_array())
            throw ConfigError(context + ".profiles must be an array");
        for (const auto& pj : j.at("profiles"))
            c.profiles.push_back(profile_from_json(pj, context + ".profiles[]"));
    }
    if (j.contains("device_counts")) {
        const json& d = j.at("device_counts");
        if (!d.is_object()) throw ConfigError(context + ".device_counts must be an object");
        for (auto it = d.begin(); it != d.end(); ++it) {
            if (!it.value().is_number_integer())
                throw ConfigError(context + ".device_counts." + it.key() +
                                  " must be an integer");
            c.device_counts[it.key()] = it.value().get<int>();
        }
    }
    return c;
}

json conditions_to_json(const CellConditions& c) {
    json counts = json::object();
    for (const auto& [name, count] : c.device_counts) counts[name] = count;
    json profiles = json::array();
    for (const auto& p : c.profiles) profiles.push_back(profile_to_json(p));
    return json{{"cell_radius_m", c.cell_radius_m},
                {"device_counts", counts},
                {"profiles", profiles},
                {"radio", radio_to_json(c.radio)},
                {"channel", channel_to_json(c.channel)}};
}

SweepGrid grid_from_json(const json& j, std::uint64_t default_seed, const std::string& context) {
    check_keys(j, {"replications", "seed_base", "axes"}, context);
    SweepGrid g;
    g.replications = int_or(j, "replications", 1, context);
    g.seed_base = uint64_or(j, "seed_base", default_seed, context);
    if (!j.contains("axes") || !j.at("axes").is_array())
        throw ConfigError(context + " requires an 'axes' array");
    for (const auto& aj : j.at("axes")) {
        check_keys(aj, {"dimension", "profile", "values"}, context + ".axes[]");
        SweepAxis ax;
        ax.dimension = dimension_from_name(str_req(aj, "dimension", context + ".axes[]"));
        ax.profile = str_or(aj, "profile", "", context + ".axes[]");
        if (!aj.contains("values") || !aj.at("values").is_array())
            throw ConfigError(context + ".axes[] requires a 'values' array");
        for (const auto& v : aj.at("values")) {
            if (!v.is_number()) throw ConfigError(context + ".axes[].values must be numbers");
            ax.values.push_back(v.get<double>());
        }
        g.axes.push_back(std::move(ax));
    }
    return g;
}

json grid_to_json(const SweepGrid& g) {
    json axes = json::array();
    for (const auto& ax : g.axes) {
        json a{{"dimension", dimension_name(ax.dimension)}, {"values", ax.values}};
        if (!ax.profile.empty()) a["profile"] = ax.profile;
        axes.push_back(std::move(a));
    }
    return json{{"replications", g.replications}, {"seed_base", g.seed_base}, {"axes", axes}};
}

std::vector<Injection> injections_from_json(const json& j, const std::string& context) {
    if (!j.is_array()) throw ConfigError(context + " must be an array");
    std::vector<Injection> out;
    for (const auto& ij : j) {
        check_keys(ij,
                   {"kind", "target_cell", "t0_s", "t1_s", "flood_profile", "flood_sources",
                    "delay_factor", "drop_factor", "throughput_factor"},
                   context + "[]");
        Injection inj;
        inj.kind = injection_from_name(str_req(ij, "kind", context + "[]"));
        inj.target_cell = int_req(ij, "target_cell", context + "[]");
        inj.t0_s = num_req(ij, "t0_s", context + "[]");
        inj.t1_s = num_req(ij, "t1_s", context + "[]");
        inj.flood_profile = str_or(ij, "flood_profile", "", context + "[]");
        inj.flood_sources = int_or(ij, "flood_sources", 0, context + "[]");
        inj.delay_factor = num_or(ij, "delay_factor", 1.0, context + "[]");
        inj.drop_factor = num_or(ij, "drop_factor", 1.0, context + "[]");
        inj.throughput_factor = num_or(ij, "throughput_factor", 1.0, context + "[]");
        out.push_back(std::move(inj));
    }
    return out;
}

json injections_to_json(const std::vector<Injection>& injections) {
    json out = json::array();
    for (const auto& inj : injections) {
        json ij{{"kind", injection_name(inj.kind)},
                {"target_cell", inj.target_cell},
                {"t0_s", inj.t0_s},
                {"t1_s", inj.t1_s}};
        if (inj.kind == InjectionKind::FloodTraffic) {
            ij["flood_profile"] = inj.flood_profile;
            ij["flood_sources"] = inj.flood_sources;
        }
        if (inj.kind == InjectionKind::FailureProfile) {
            ij["delay_factor"] = inj.delay_factor;
            ij["drop_factor"] = inj.drop_factor;
            ij["throughput_factor"] = inj.throughput_factor;
        }
        out.push_back(std::move(ij));
    }
    return out;
}

namespace {

std::vector<DistFamily> families_from_json(const json& j, const std::string& context) {
    if (!j.is_array()) throw ConfigError(context + " must be an array of family names");
    std::vector<DistFamily> out;
    for (const auto& f : j) {
        if (!f.is_string()) throw ConfigError(context + " must contain family names");
        out.push_back(family_from_name(f.get<std::string>()));
    }
    if (out.empty()) throw ConfigError(context + " must not be empty");
    return out;
}

} // namespace

SweepConfig sweep_config_from_json(const json& j) {
    check_keys(j, {"seed", "duration_s", "workers", "sim", "base", "grid", "fit"}, "sweep config");
    SweepConfig cfg;
    cfg.seed = uint64_or(j, "seed", 0, "sweep config");
    cfg.duration_s = num_req(j, "duration_s", "sweep config");
    cfg.workers = int_or(j, "workers", 1, "sweep config");
    if (j.contains("sim")) cfg.sim = sim_params_from_json(j.at("sim"), "sweep config.sim");
    if (!j.contains("base")) throw ConfigError("sweep config requires 'base' conditions");
    cfg.base = conditions_from_json(j.at("base"), "sweep config.base");
    if (!j.contains("grid")) throw ConfigError("sweep config requires 'grid'");
    cfg.grid = grid_from_json(j.at("grid"), cfg.seed, "sweep config.grid");
    if (j.contains("fit")) {
        const json& f = j.at("fit");
        check_keys(f, {"delay", "drop", "throughput"}, "sweep config.fit");
        if (f.contains("delay"))
            cfg.fit.delay_candidates = families_from_json(f.at("delay"), "fit.delay");
        if (f.contains("drop"))
            cfg.fit.drop_candidates = families_from_json(f.at("drop"), "fit.drop");
        if (f.contains("throughput"))
            cfg.fit.throughput_candidates = families_from_json(f.at("throughput"), "fit.throughput");
    }
    cfg.base.validate();
    cfg.grid.validate();
    if (!(cfg.duration_s > 0.0)) throw ConfigError("duration_s must be > 0");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    return cfg;
}

json sweep_config_to_json(const SweepConfig& cfg) {
    auto names = [](const std::vector<DistFamily>& fams) {
        json arr = json::array();
        for (DistFamily f : fams) arr.push_back(family_name(f));
        return arr;
    };
    return json{{"seed", cfg.seed},
                {"duration_s", cfg.duration_s},
                {"workers", cfg.workers},
                {"sim", sim_params_to_json(cfg.sim)},
                {"base", conditions_to_json(cfg.base)},
                {"grid", grid_to_json(cfg.grid)},
                {"fit",
                 json{{"delay", names(cfg.fit.delay_candidates)},
                      {"drop", names(cfg.fit.drop_candidates)},
                      {"throughput", names(cfg.fit.throughput_candidates)}}}};
}

Scenario scenario_from_json(const json& j) {
    check_keys(j,
               {"seed", "horizon_s", "hysteresis", "thresholds", "profiles", "sites", "entities",
                "injections"},
               "scenario");
    Scenario sc;
    sc.seed = uint64_or(j, "seed", 0, "scenario");
    sc.horizon_s = num_req(j, "horizon_s", "scenario");
    sc.hysteresis = int_or(j, "hysteresis", 1, "scenario");
    if (j.contains("thresholds")) {
        const json& t = j.at("thresholds");
        check_keys(t, {"delay_budget_ms", "bad_experience_frac", "session_s", "day_s"},
                   "scenario.thresholds");
        sc.thresholds.delay_budget_ms =
            num_or(t, "delay_budget_ms", sc.thresholds.delay_budget_ms, "thresholds");
        sc.thresholds.bad_experience_frac =
            num_or(t, "bad_experience_frac", sc.thresholds.bad_experience_frac, "thresholds");
        sc.thresholds.session_s = num_or(t, "session_s", sc.thresholds.session_s, "thresholds");
        sc.thresholds.day_s = num_or(t, "day_s", sc.thresholds.day_s, "thresholds");
    }
    if (j.contains("profiles")) {
        if (!j.at("profiles").is_array()) throw ConfigError("scenario.profiles must be an array");
        for (const auto& pj : j.at("profiles"))
            sc.profiles.push_back(profile_from_json(pj, "scenario.profiles[]"));
    }
    if (j.contains("sites")) {
        if (!j.at("sites").is_array()) throw ConfigError("scenario.sites must be an array");
        for (const auto& sj : j.at("sites")) {
            check_keys(sj, {"cell_id", "x_m", "y_m", "radius_m", "radio", "channel"},
                       "scenario.sites[]");
            CellSite s;
            s.cell_id = int_req(sj, "cell_id", "scenario.sites[]");
            s.x_m = num_or(sj, "x_m", 0.0, "scenario.sites[]");
            s.y_m = num_or(sj, "y_m", 0.0, "scenario.sites[]");
            s.radius_m = num_req(sj, "radius_m", "scenario.sites[]");
            if (sj.contains("radio"))
                s.radio = radio_from_json(sj.at("radio"), "scenario.sites[].radio");
            if (sj.contains("channel"))
                s.channel = channel_from_json(sj.at("channel"), s.radio.carrier_frequency_hz,
                                              "scenario.sites[].channel");
            else
                s.channel.ci_los.pl_d0_db = s.channel.ci_nlos.pl_d0_db =
                    fspl_db(s.radio.carrier_frequency_hz, 1.0);
            sc.sites.push_back(std::move(s));
        }
    }
    if (j.contains("entities")) {
        if (!j.at("entities").is_array())
            throw ConfigError("scenario.entities must be an array");
        for (const auto& ej : j.at("entities")) {
            check_keys(ej,
                       {"entity_id", "profile", "route", "active_start_s", "active_end_s"},
                       "scenario.entities[]");
            MobileEntity e;
            e.entity_id = int_req(ej, "entity_id", "scenario.entities[]");
            e.profile = str_req(ej, "profile", "scenario.entities[]");
            if (!ej.contains("route") || !ej.at("route").is_array())
                throw ConfigError("scenario.entities[] requires a 'route' array");
            for (const auto& wj : ej.at("route")) {
                if (!wj.is_array() || wj.size() != 3 || !wj[0].is_number() ||
                    !wj[1].is_number() || !wj[2].is_number())
                    throw ConfigError("route waypoints must be [x_m, y_m, t_s] triples");
                e.route.push_back({wj[0].get<double>(), wj[1].get<double>(), wj[2].get<double>()});
            }
            e.active_start_s = num_or(ej, "active_start_s", 0.0, "scenario.entities[]");
            e.active_end_s = num_or(ej, "active_end_s", e.active_end_s, "scenario.entities[]");
            sc.entities.push_back(std::move(e));
        }
    }
    if (j.contains("injections"))
        sc.injections = injections_from_json(j.at("injections"), "scenario.injections");
    sc.validate();
    return sc;
}

ValidateConfig validate_config_from_json(const json& j) {
    check_keys(j,
               {"seed", "duration_s", "n_samples", "workers", "sim", "tolerances", "base",
                "points"},
               "validate config");
    ValidateConfig cfg;
    cfg.seed = uint64_or(j, "seed", 0, "validate config");
    cfg.duration_s = num_req(j, "duration_s", "validate config");
    cfg.n_samples = static_cast<std::size_t>(int_or(j, "n_samples", 10000, "validate config"));
    cfg.workers = int_or(j, "workers", 1, "validate config");
    if (j.contains("sim")) cfg.sim = sim_params_from_json(j.at("sim"), "validate config.sim");
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        check_keys(t, {"ks", "mean"}, "validate config.tolerances");
        cfg.tolerances.ks = num_or(t, "ks", cfg.tolerances.ks, "tolerances");
        cfg.tolerances.mean = num_or(t, "mean", cfg.tolerances.mean, "tolerances");
    }
    if (!j.contains("base")) throw ConfigError("validate config requires 'base' conditions");
    cfg.base = conditions_from_json(j.at("base"), "validate config.base");
    if (!j.contains("points") || !j.at("points").is_array())
        throw ConfigError("validate config requires a 'points' array");
    for (const auto& pj : j.at("points")) {
        if (!pj.is_object())
            throw ConfigError("validate config points must be {axis label: value} objects");
        std::map<std::string, double> overrides;
        for (auto it = pj.begin(); it != pj.end(); ++it) {
            if (!it.value().is_number())
                throw ConfigError("point override " + it.key() + " must be a number");
            overrides[it.key()] = it.value().get<double>();
        }
        cfg.points.push_back(std::move(overrides));
    }
    if (!(cfg.duration_s > 0.0)) throw ConfigError("duration_s must be > 0");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    if (cfg.n_samples == 0) throw ConfigError("n_samples must be >= 1");
    cfg.base.validate();
    return cfg;
}

json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
    return sweep_config_from_json(parse_json_file(path));
}

Scenario load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(parse_json_file(path));
}

ValidateConfig load_validate_config(const std::filesystem::path& path) {
    return validate_config_from_json(parse_json_file(path));
}

std::vector<Injection> load_injection_overlay(const std::filesystem::path& path) {
    const json j = parse_json_file(path);
    check_keys(j, {"injections"}, "injection overlay");
    if (!j.contains("injections"))
        throw ConfigError("injection overlay requires an 'injections' array");
    return injections_from_json(j.at("injections"), "overlay.injections");
}

} // namespace vertsim
