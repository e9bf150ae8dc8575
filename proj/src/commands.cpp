#include "vertsim/commands.hpp"

#include "vertsim/errors.hpp"
#include "vertsim/io.hpp"
#include "vertsim/version.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <set>

namespace vertsim {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Collects the manifest while a command runs; finish() stamps the wall time
// and writes it last, so a manifest on disk implies the run completed.
struct ManifestBuilder {
    RunManifest m;
    fs::path dir;
    Clock::time_point start = Clock::now();

    ManifestBuilder(std::string command, const fs::path& out) : dir(out) {
        m.command = std::move(command);
        m.version = kVersion;
        fs::create_directories(dir);
    }
    void input(const fs::path& path) {
        m.inputs.emplace_back(path.string(), digest_file(path));
    }
    void output(const std::string& name) {
        m.outputs.emplace_back(name, digest_file(dir / name));
    }
    void finish() {
        m.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        write_manifest(m, dir);
    }
};

json load_with_overrides(const fs::path& config, std::optional<std::uint64_t> seed,
                         std::optional<int> workers) {
    json j = parse_json_file(config);
    if (!j.is_object()) throw ConfigError("config root must be an object: " + config.string());
    if (seed) j["seed"] = *seed;
    if (workers) j["workers"] = *workers;
    return j;
}

std::vector<ConditionInterval> intervals_for(const Scenario& sc) {
    return simulate_activity(sc.sites, sc.entities, sc.horizon_s, sc.hysteresis);
}

bool same_packet(const CityPacket& a, const CityPacket& b) {
    const bool delay_equal =
        (std::isnan(a.delay_ms) && std::isnan(b.delay_ms)) || a.delay_ms == b.delay_ms;
    return a.cell_id == b.cell_id && a.entity_id == b.entity_id && a.profile == b.profile &&
           a.timestamp_s == b.timestamp_s && delay_equal && a.dropped == b.dropped &&
           a.throughput_bps == b.throughput_bps;
}

std::vector<const CityPacket*> cell_slice(const std::vector<CityPacket>& log, int cell_id) {
    std::vector<const CityPacket*> out;
    for (const auto& p : log)
        if (p.cell_id == cell_id) out.push_back(&p);
    return out;
}

bool cell_log_identical(const std::vector<CityPacket>& a, const std::vector<CityPacket>& b,
                        int cell_id) {
    const auto sa = cell_slice(a, cell_id);
    const auto sb = cell_slice(b, cell_id);
    if (sa.size() != sb.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (!same_packet(*sa[i], *sb[i])) return false;
    return true;
}

const CellKpis* find_cell(const VerticalReport& r, int cell_id) {
    for (const auto& c : r.cells)
        if (c.cell_id == cell_id) return &c;
    return nullptr;
}

json json_finite(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

} // namespace

DistributionTable fit_dataset(const SweepDataset& dataset, const FitConfig& fit) {
    DistributionTable table;
    table.axis_labels = dataset.grid.axis_labels();
    std::size_t i = 0;
    while (i < dataset.points.size()) {
        const auto& first = dataset.points[i];
        std::vector<double> delays;
        std::vector<double> drops;
        std::vector<double> throughputs;
        std::size_t j = i;
        for (; j < dataset.points.size() && dataset.points[j].point_index == first.point_index;
             ++j) {
            const auto& p = dataset.points[j];
            if (!p.error.empty()) continue;
            for (const auto& r : p.records) {
                drops.push_back(r.dropped ? 1.0 : 0.0);
                if (!r.dropped) {
                    delays.push_back(r.delay_ms);
                    throughputs.push_back(r.throughput_bps);
                }
            }
        }
        auto add = [&](Kpi kpi, const std::vector<double>& samples) {
            if (samples.size() < kMinFitSamples) return;
            try {
                DistTableRow row;
                row.point_index = first.point_index;
                row.values = first.values;
                row.dist = select_family(samples, fit.candidates(kpi), kpi);
                table.rows.push_back(std::move(row));
            } catch (const DataError&) {
                // every candidate family rejected this point's samples
            }
        };
        add(Kpi::Delay, delays);
        add(Kpi::DropProbability, drops);
        add(Kpi::Throughput, throughputs);
        i = j;
    }
    if (table.rows.empty()) throw DataError("no fittable points in the sweep dataset");
    return table;
}

int cmd_sweep(const fs::path& config, const fs::path& out, std::optional<std::uint64_t> seed,
              std::optional<int> workers) {
    ManifestBuilder mb("sweep", out);
    mb.input(config);
    const SweepConfig cfg = sweep_config_from_json(load_with_overrides(config, seed, workers));
    mb.m.seed = cfg.seed;

    const SweepDataset dataset = run_sweep(cfg.base, cfg.grid, cfg.duration_s, cfg.sim,
                                           cfg.workers);
    write_sweep_dataset(dataset, out);
    write_text_file_atomic(out / "sweep_config.json", sweep_config_to_json(cfg).dump(2) + "\n");

    mb.output("sweep_config.json");
    mb.output("sweep_index.json");
    std::size_t packets = 0;
    std::size_t failed = 0;
    for (const auto& p : dataset.points) {
        if (!p.error.empty()) {
            ++failed;
            std::cerr << "sweep point " << p.point_index << " rep " << p.replication
                      << " failed: " << p.error << "\n";
            continue;
        }
        packets += p.records.size();
        mb.output(sweep_point_file(p.point_index, p.replication));
    }
    mb.finish();
    std::cout << "sweep: " << cfg.grid.point_count() << " points x " << cfg.grid.replications
              << " reps, " << packets << " packets";
    if (failed) std::cout << ", " << failed << " failed";
    std::cout << " -> " << out.string() << "\n";
    return 0;
}

int cmd_fit(const fs::path& sweep_dir, const fs::path& out) {
    ManifestBuilder mb("fit", out);
    mb.input(sweep_dir / "sweep_index.json");
    const SweepDataset dataset = read_sweep_dataset(sweep_dir);
    FitConfig fit;
    const fs::path echo = sweep_dir / "sweep_config.json";
    if (fs::exists(echo)) {
        fit = sweep_config_from_json(parse_json_file(echo)).fit;
        mb.input(echo);
    }
    const DistributionTable table = fit_dataset(dataset, fit);
    write_distribution_table(table, out / "distribution_table.csv");
    mb.output("distribution_table.csv");
    mb.finish();
    std::cout << "fit: " << table.rows.size() << " rows over "
              << dataset.grid.point_count() << " points -> " << out.string() << "\n";
    return 0;
}

int cmd_train(const fs::path& table_path, const fs::path& out, const std::string& regressor,
              int degree, double ridge_weight) {
    ManifestBuilder mb("train", out);
    mb.input(table_path);
    RegressorKind kind;
    try {
        kind = regressor_from_name(regressor);
    } catch (const std::exception&) {
        throw ConfigError("unknown regressor: " + regressor);
    }
    const DistributionTable table = read_distribution_table(table_path);
    ModelSet set;
    for (Kpi kpi : {Kpi::Delay, Kpi::DropProbability, Kpi::Throughput}) {
        const bool present = std::any_of(table.rows.begin(), table.rows.end(),
                                         [&](const DistTableRow& r) { return r.dist.kpi == kpi; });
        if (present) set.models.push_back(train(table, kpi, kind, degree, ridge_weight));
    }
    if (set.models.empty()) throw DataError("distribution table has no rows");
    write_model_set(set, out / "model.json");
    mb.output("model.json");
    mb.finish();
    std::cout << "train: " << set.models.size() << " models (" << regressor << ") -> "
              << out.string() << "\n";
    return 0;
}

int cmd_urban(const fs::path& scenario, const fs::path& out, std::optional<std::uint64_t> seed) {
    ManifestBuilder mb("urban", out);
    mb.input(scenario);
    const Scenario sc = scenario_from_json(load_with_overrides(scenario, seed, std::nullopt));
    mb.m.seed = sc.seed;
    const auto intervals = intervals_for(sc);
    write_intervals(intervals, out / "intervals.csv");
    ActivityStats st = activity_stats(intervals);
    st.coverage_gap_fraction = coverage_gap_fraction(sc.sites, sc.entities, sc.horizon_s);
    json stats = activity_stats_to_json(st);
    stats["format"] = "vertsim-activity/1";
    write_text_file_atomic(out / "activity.json", stats.dump(2) + "\n");
    mb.output("intervals.csv");
    mb.output("activity.json");
    mb.finish();
    std::cout << "urban: " << intervals.size() << " intervals over " << sc.sites.size()
              << " cells -> " << out.string() << "\n";
    return 0;
}

int cmd_run(const fs::path& scenario, const fs::path& model,
            const std::optional<fs::path>& intervals, const fs::path& out,
            std::optional<std::uint64_t> seed) {
    ManifestBuilder mb("run", out);
    mb.input(scenario);
    mb.input(model);
    const Scenario sc = scenario_from_json(load_with_overrides(scenario, seed, std::nullopt));
    mb.m.seed = sc.seed;
    const ModelSet models = read_model_set(model);
    std::vector<ConditionInterval> ivs;
    if (intervals) {
        mb.input(*intervals);
        ivs = read_intervals(*intervals);
    } else {
        ivs = intervals_for(sc);
    }
    const CityResult result = run_city(sc, models, ivs);
    write_packet_log(result.log, out / "packet_log.csv");
    write_vertical_report(result.report, out / "report.json");
    write_cell_summary_csv(result.report.cells, out / "cells.csv");
    mb.output("packet_log.csv");
    mb.output("report.json");
    mb.output("cells.csv");
    mb.finish();
    std::cout << "run: " << result.report.total_packets << " packets, drop rate "
              << format_double(result.report.drop_rate) << " -> " << out.string() << "\n";
    return 0;
}

int cmd_whatif(const fs::path& scenario, const fs::path& overlay, const fs::path& model,
               const fs::path& out, std::optional<std::uint64_t> seed) {
    ManifestBuilder mb("whatif", out);
    mb.input(scenario);
    mb.input(overlay);
    mb.input(model);
    const Scenario baseline_sc =
        scenario_from_json(load_with_overrides(scenario, seed, std::nullopt));
    mb.m.seed = baseline_sc.seed;
    const std::vector<Injection> extra = load_injection_overlay(overlay);
    const ModelSet models = read_model_set(model);

    Scenario injected_sc = baseline_sc;
    injected_sc.injections.insert(injected_sc.injections.end(), extra.begin(), extra.end());
    injected_sc.validate();

    const auto ivs = intervals_for(baseline_sc);
    const CityResult baseline = run_city(baseline_sc, models, ivs);
    const CityResult injected = run_city(injected_sc, models, ivs);

    write_packet_log(baseline.log, out / "baseline_packet_log.csv");
    write_vertical_report(baseline.report, out / "baseline_report.json");
    write_packet_log(injected.log, out / "injected_packet_log.csv");
    write_vertical_report(injected.report, out / "injected_report.json");

    std::set<int> cell_ids;
    for (const auto& c : baseline.report.cells) cell_ids.insert(c.cell_id);
    for (const auto& c : injected.report.cells) cell_ids.insert(c.cell_id);
    json cells = json::array();
    for (int id : cell_ids) {
        const CellKpis* b = find_cell(baseline.report, id);
        const CellKpis* i = find_cell(injected.report, id);
        const CellKpis zero;
        const CellKpis& bk = b ? *b : zero;
        const CellKpis& ik = i ? *i : zero;
        cells.push_back(
            json{{"cell_id", id},
                 {"baseline_drop_rate", json_finite(bk.drop_rate)},
                 {"injected_drop_rate", json_finite(ik.drop_rate)},
                 {"delta_drop_rate", json_finite(ik.drop_rate - bk.drop_rate)},
                 {"delta_mean_delay_ms", json_finite(ik.mean_delay_ms - bk.mean_delay_ms)},
                 {"delta_mean_throughput_bps",
                  json_finite(ik.mean_throughput_bps - bk.mean_throughput_bps)},
                 {"log_identical", cell_log_identical(baseline.log, injected.log, id)}});
    }

    auto global = [](const VerticalReport& r) {
        return json{{"total_packets", r.total_packets},
                    {"drop_rate", json_finite(r.drop_rate)},
                    {"bad_experience_fraction", json_finite(r.bad_experience_fraction)}};
    };
    const json summary{
        {"format", "vertsim-whatif/1"},
        {"overlay_injections", injections_to_json(extra)},
        {"global",
         json{{"baseline", global(baseline.report)},
              {"injected", global(injected.report)},
              {"delta",
               json{{"drop_rate",
                     json_finite(injected.report.drop_rate - baseline.report.drop_rate)},
                    {"bad_experience_fraction",
                     json_finite(injected.report.bad_experience_fraction -
                                 baseline.report.bad_experience_fraction)}}}}},
        {"cells", cells}};
    write_text_file_atomic(out / "whatif_summary.json", summary.dump(2) + "\n");

    mb.output("baseline_packet_log.csv");
    mb.output("baseline_report.json");
    mb.output("injected_packet_log.csv");
    mb.output("injected_report.json");
    mb.output("whatif_summary.json");
    mb.finish();
    std::cout << "whatif: drop rate " << format_double(baseline.report.drop_rate) << " -> "
              << format_double(injected.report.drop_rate) << " under " << extra.size()
              << " injections -> " << out.string() << "\n";
    return 0;
}

int cmd_validate(const fs::path& config, const fs::path& model,
                 const std::optional<fs::path>& reference, const fs::path& out,
                 std::optional<std::uint64_t> seed, std::optional<int> workers,
                 std::optional<double> tolerance_ks, std::optional<double> tolerance_mean) {
    ManifestBuilder mb("validate", out);
    mb.input(config);
    mb.input(model);
    json j = load_with_overrides(config, seed, workers);
    if (tolerance_ks) j["tolerances"]["ks"] = *tolerance_ks;
    if (tolerance_mean) j["tolerances"]["mean"] = *tolerance_mean;
    const ValidateConfig cfg = validate_config_from_json(j);
    mb.m.seed = cfg.seed;
    const ModelSet models = read_model_set(model);
    const auto conditions = cfg.conditions();

    ValidationReport report;
    if (reference) {
        if (conditions.size() != 1)
            throw ConfigError("an external reference log pairs with exactly one condition, got " +
                              std::to_string(conditions.size()));
        mb.input(*reference);
        const KpiSamples samples = collect_samples(read_packet_log(*reference));
        report = validate_against(conditions, {samples}, models, cfg.seed, cfg.n_samples,
                                  cfg.tolerances);
    } else {
        report = cross_validate(conditions, models, cfg.duration_s, cfg.seed, cfg.sim,
                                cfg.n_samples, cfg.tolerances, cfg.workers);
    }
    write_validation_report(report, out / "validation.json");
    write_validation_csv(report, out / "validation.csv");
    mb.output("validation.json");
    mb.output("validation.csv");
    mb.finish();
    std::size_t passed = 0;
    for (const auto& e : report.entries)
        if (e.pass) ++passed;
    std::cout << "validate: " << passed << "/" << report.entries.size() << " entries pass, "
              << (report.pass ? "PASS" : "FAIL") << " -> " << out.string() << "\n";
    return report.pass ? 0 : 4;
}

} // namespace vertsim
