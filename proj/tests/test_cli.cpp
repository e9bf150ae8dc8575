#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vertsim/commands.hpp"
#include "vertsim/errors.hpp"
#include "vertsim/io.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <unistd.h>
#include <vector>

using namespace vertsim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("vertsim_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path operator/(const std::string& name) const { return path / name; }
};

fs::path write_config(const TempDir& dir, const std::string& name, const std::string& body) {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << body;
    return p;
}

const char* kSweepConfig = R"({
  "seed": 5,
  "duration_s": 6,
  "workers": 2,
  "base": {
    "cell_radius_m": 80,
    "device_counts": { "car": 2 },
    "profiles": [
      { "name": "car", "packet_rate_hz": 16, "packet_size_bytes": 1250000, "regime": "poisson" }
    ],
    "channel": {
      "model": "ci",
      "ci_los": { "d0_m": 1, "n": 2.1, "sigma_db": 3 },
      "ci_nlos": { "d0_m": 1, "n": 3.4, "sigma_db": 6 },
      "d_los_m": 50,
      "rice_k_db": 9
    }
  },
  "grid": {
    "replications": 2,
    "axes": [
      { "dimension": "devices", "profile": "car", "values": [1, 2] },
      { "dimension": "radius", "values": [50, 80] }
    ]
  },
  "fit": {
    "delay": ["lognormal"],
    "drop": ["bernoulli"],
    "throughput": ["gamma"]
  }
})";

const char* kScenario = R"({
  "seed": 3,
  "horizon_s": 40,
  "profiles": [
    { "name": "car", "packet_rate_hz": 2, "packet_size_bytes": 400, "regime": "poisson" }
  ],
  "sites": [
    { "cell_id": 0, "x_m": 0, "y_m": 0, "radius_m": 120 },
    { "cell_id": 1, "x_m": 220, "y_m": 0, "radius_m": 120 }
  ],
  "entities": [
    { "entity_id": 0, "profile": "car", "route": [[10, 0, 0], [10, 0, 1]] },
    { "entity_id": 1, "profile": "car", "route": [[0, 0, 0], [220, 0, 40]] }
  ]
})";

const char* kOverlay = R"({
  "injections": [
    { "kind": "cell_outage", "target_cell": 0, "t0_s": 10, "t1_s": 20 }
  ]
})";

const char* kValidateTwoPoints = R"({
  "seed": 11,
  "duration_s": 4,
  "n_samples": 1000,
  "workers": 2,
  "base": {
    "cell_radius_m": 80,
    "device_counts": { "car": 2 },
    "profiles": [
      { "name": "car", "packet_rate_hz": 10, "packet_size_bytes": 800, "regime": "poisson" }
    ]
  },
  "points": [
    { "devices:car": 1, "radius": 50 },
    { "devices:car": 2, "radius": 80 }
  ]
})";

} // namespace

TEST_CASE("pipeline: sweep, fit, train, urban, run, whatif") {
    TempDir work("pipeline");
    const fs::path sweep_cfg = write_config(work, "sweep.json", kSweepConfig);
    const fs::path scenario = write_config(work, "scenario.json", kScenario);
    const fs::path overlay = write_config(work, "overlay.json", kOverlay);

    const fs::path sweep_out = work / "sweep";
    REQUIRE(cmd_sweep(sweep_cfg, sweep_out, std::nullopt, std::nullopt) == 0);
    CHECK(fs::exists(sweep_out / "sweep_index.json"));
    CHECK(fs::exists(sweep_out / "sweep_config.json"));
    CHECK(fs::exists(sweep_out / "manifest.json"));
    SweepDataset ds = read_sweep_dataset(sweep_out);
    CHECK(ds.points.size() == 8); // 4 points x 2 replications
    for (const auto& p : ds.points) {
        CHECK(p.error.empty());
        CHECK(!p.records.empty());
    }
    CHECK(ds.grid.axis_labels() == std::vector<std::string>{"devices:car", "radius"});

    const fs::path fit_out = work / "fit";
    REQUIRE(cmd_fit(sweep_out, fit_out) == 0);
    DistributionTable table = read_distribution_table(fit_out / "distribution_table.csv");
    CHECK(table.rows.size() == 12); // 4 points x 3 KPIs
    CHECK(table.axis_labels == std::vector<std::string>{"devices:car", "radius"});
    for (const auto& row : table.rows)
        if (row.dist.kpi == Kpi::DropProbability) CHECK(row.dist.family == DistFamily::Bernoulli);

    const fs::path train_out = work / "train";
    REQUIRE(cmd_train(fit_out / "distribution_table.csv", train_out, "multilinear", 2, 1e-8) == 0);
    ModelSet models = read_model_set(train_out / "model.json");
    REQUIRE(models.models.size() == 3);
    CHECK(models.find(Kpi::Delay) != nullptr);
    CHECK(models.find(Kpi::DropProbability) != nullptr);
    CHECK(models.find(Kpi::Throughput) != nullptr);

    const fs::path urban_out = work / "urban";
    REQUIRE(cmd_urban(scenario, urban_out, std::nullopt) == 0);
    auto intervals = read_intervals(urban_out / "intervals.csv");
    CHECK(!intervals.empty());
    const json activity = parse_json_file(urban_out / "activity.json");
    CHECK(activity.at("format") == "vertsim-activity/1");
    CHECK(activity.at("interval_count").get<std::size_t>() == intervals.size());

    // run with explicit intervals and with internally derived ones
    const fs::path run_a = work / "run_a";
    const fs::path run_b = work / "run_b";
    REQUIRE(cmd_run(scenario, train_out / "model.json",
                    std::optional<fs::path>(urban_out / "intervals.csv"), run_a,
                    std::nullopt) == 0);
    REQUIRE(cmd_run(scenario, train_out / "model.json", std::nullopt, run_b, std::nullopt) == 0);
    CHECK(digest_file(run_a / "packet_log.csv") == digest_file(run_b / "packet_log.csv"));
    CHECK(digest_file(run_a / "report.json") == digest_file(run_b / "report.json"));

    auto log = read_packet_log(run_a / "packet_log.csv");
    CHECK(!log.empty());
    const json report = parse_json_file(run_a / "report.json");
    CHECK(report.at("format") == "vertsim-report/1");
    CHECK(report.at("total_packets").get<std::size_t>() == log.size());
    CHECK(fs::exists(run_a / "cells.csv"));

    const fs::path whatif_out = work / "whatif";
    REQUIRE(cmd_whatif(scenario, overlay, train_out / "model.json", whatif_out, std::nullopt) ==
            0);
    const json summary = parse_json_file(whatif_out / "whatif_summary.json");
    CHECK(summary.at("format") == "vertsim-whatif/1");
    // outage adds drops globally but leaves the untargeted cell untouched
    const double delta_drop = summary.at("global").at("delta").at("drop_rate").get<double>();
    CHECK(delta_drop > 0.0);
    bool saw_cell1 = false;
    for (const auto& cell : summary.at("cells")) {
        if (cell.at("cell_id").get<int>() == 1) {
            saw_cell1 = true;
            CHECK(cell.at("log_identical").get<bool>());
        }
        if (cell.at("cell_id").get<int>() == 0) CHECK(!cell.at("log_identical").get<bool>());
    }
    CHECK(saw_cell1);
    CHECK(fs::exists(whatif_out / "baseline_packet_log.csv"));
    CHECK(fs::exists(whatif_out / "injected_packet_log.csv"));
}

TEST_CASE("reruns produce byte-identical artifacts") {
    TempDir work("rerun");
    const fs::path cfg = write_config(work, "sweep.json", kSweepConfig);
    const fs::path a = work / "a";
    const fs::path b = work / "b";
    REQUIRE(cmd_sweep(cfg, a, std::nullopt, std::nullopt) == 0);
    REQUIRE(cmd_sweep(cfg, b, std::nullopt, std::nullopt) == 0);
    CHECK(digest_file(a / "sweep_index.json") == digest_file(b / "sweep_index.json"));
    CHECK(digest_file(a / "sweep_config.json") == digest_file(b / "sweep_config.json"));
    CHECK(digest_file(a / sweep_point_file(0, 0)) == digest_file(b / sweep_point_file(0, 0)));
    CHECK(digest_file(a / sweep_point_file(3, 1)) == digest_file(b / sweep_point_file(3, 1)));

    // manifests agree on every digest they record
    const json ma = parse_json_file(a / "manifest.json");
    const json mb = parse_json_file(b / "manifest.json");
    CHECK(ma.at("outputs") == mb.at("outputs"));
    CHECK(ma.at("seed") == mb.at("seed"));
}

TEST_CASE("seed override acts like editing the config") {
    TempDir work("seed");
    const fs::path cfg = write_config(work, "sweep.json", kSweepConfig);
    const fs::path out = work / "out";
    REQUIRE(cmd_sweep(cfg, out, 123, std::nullopt) == 0);
    const json manifest = parse_json_file(out / "manifest.json");
    CHECK(manifest.at("seed").get<std::uint64_t>() == 123);
    CHECK(manifest.at("command") == "sweep");
    CHECK(manifest.at("format") == "vertsim-manifest/1");
    // the grid seed base defaults to the effective config seed
    SweepDataset ds = read_sweep_dataset(out);
    CHECK(ds.grid.seed_base == 123);
    // the echoed config carries the override
    CHECK(parse_json_file(out / "sweep_config.json").at("seed").get<std::uint64_t>() == 123);
}

TEST_CASE("unknown config keys are rejected by name") {
    TempDir work("badkey");
    json j = json::parse(kSweepConfig);
    j["velocity"] = 3;
    const fs::path cfg = write_config(work, "sweep.json", j.dump());
    try {
        load_sweep_config(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("velocity") != std::string::npos);
    }

    json sc = json::parse(kScenario);
    sc["sites"][0]["height"] = 30;
    const fs::path scenario = write_config(work, "scenario.json", sc.dump());
    try {
        load_scenario(scenario);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("height") != std::string::npos);
    }
}

TEST_CASE("malformed json reports a config error") {
    TempDir work("badjson");
    const fs::path cfg = write_config(work, "sweep.json", "{ not json");
    CHECK_THROWS_AS(load_sweep_config(cfg), ConfigError);
    CHECK_THROWS_AS(parse_json_file(work / "missing.json"), ConfigError);
}

TEST_CASE("sweep config round-trips through its json echo") {
    TempDir work("echo");
    const fs::path cfg = write_config(work, "sweep.json", kSweepConfig);
    const SweepConfig a = load_sweep_config(cfg);
    const SweepConfig b = sweep_config_from_json(sweep_config_to_json(a));
    CHECK(a.seed == b.seed);
    CHECK(a.duration_s == b.duration_s);
    CHECK(a.workers == b.workers);
    CHECK(a.grid.replications == b.grid.replications);
    CHECK(a.grid.seed_base == b.grid.seed_base);
    CHECK(a.grid.axis_labels() == b.grid.axis_labels());
    for (std::size_t i = 0; i < a.grid.axes.size(); ++i)
        CHECK(a.grid.axes[i].values == b.grid.axes[i].values);
    CHECK(a.base.cell_radius_m == b.base.cell_radius_m);
    CHECK(a.base.device_counts == b.base.device_counts);
    CHECK(a.base.channel.ci_los.pl_d0_db == b.base.channel.ci_los.pl_d0_db);
    CHECK(a.fit.delay_candidates == b.fit.delay_candidates);
    CHECK(a.fit.drop_candidates == b.fit.drop_candidates);
    CHECK(a.fit.throughput_candidates == b.fit.throughput_candidates);
}

TEST_CASE("validation report round-trips through json") {
    ValidationReport rep;
    rep.tolerances = {0.04, 0.2};
    ValidationEntry ok;
    ok.condition_index = 0;
    ok.kpi = Kpi::Delay;
    ok.ks_distance = 0.01;
    ok.mean_error = -0.05;
    ok.reference_mean = 12.5;
    ok.surrogate_mean = 11.9;
    ok.n_reference = 1000;
    ok.n_surrogate = 2000;
    ok.pass = true;
    ValidationEntry inf_err;
    inf_err.condition_index = 1;
    inf_err.kpi = Kpi::Throughput;
    inf_err.mean_error = std::numeric_limits<double>::infinity();
    inf_err.pass = false;
    ValidationEntry failed;
    failed.condition_index = 2;
    failed.error = "run_cell: duration must be > 0";
    rep.entries = {ok, inf_err, failed};
    rep.pass = false;

    const ValidationReport back = validation_report_from_json(validation_report_to_json(rep));
    CHECK(back.pass == rep.pass);
    CHECK(back.tolerances.ks == rep.tolerances.ks);
    CHECK(back.tolerances.mean == rep.tolerances.mean);
    REQUIRE(back.entries.size() == 3);
    CHECK(back.entries[0].kpi == Kpi::Delay);
    CHECK(back.entries[0].mean_error == -0.05);
    CHECK(back.entries[0].n_surrogate == 2000);
    CHECK(back.entries[0].pass);
    CHECK(std::isinf(back.entries[1].mean_error));
    CHECK(back.entries[2].error == "run_cell: duration must be > 0");
}

TEST_CASE("artifact files round-trip") {
    TempDir work("roundtrip");
    SUBCASE("intervals") {
        std::vector<ConditionInterval> intervals{
            {0, 0.0, 12.5, {{"car", 2}, {"cam", 1}}},
            {0, 12.5, 40.0, {{"car", 1}}},
            {1, 0.0, 40.0, {}},
        };
        write_intervals(intervals, work / "intervals.csv");
        auto back = read_intervals(work / "intervals.csv");
        REQUIRE(back.size() == 3);
        for (std::size_t i = 0; i < back.size(); ++i) {
            CHECK(back[i].cell_id == intervals[i].cell_id);
            CHECK(back[i].t0_s == intervals[i].t0_s);
            CHECK(back[i].t1_s == intervals[i].t1_s);
            CHECK(back[i].device_counts == intervals[i].device_counts);
        }
    }
    SUBCASE("packet log with drops") {
        std::vector<CityPacket> log(2);
        log[0].cell_id = 0;
        log[0].entity_id = 4;
        log[0].profile = "car";
        log[0].timestamp_s = 0.125;
        log[0].delay_ms = 17.25;
        log[0].throughput_bps = 1.5e6;
        log[1].cell_id = 1;
        log[1].entity_id = -2;
        log[1].profile = "cam";
        log[1].timestamp_s = 3.5;
        log[1].delay_ms = std::numeric_limits<double>::quiet_NaN();
        log[1].dropped = true;
        write_packet_log(log, work / "log.csv");
        auto back = read_packet_log(work / "log.csv");
        REQUIRE(back.size() == 2);
        CHECK(back[0].delay_ms == 17.25);
        CHECK(back[0].throughput_bps == 1.5e6);
        CHECK(back[1].entity_id == -2);
        CHECK(back[1].dropped);
        CHECK(std::isnan(back[1].delay_ms));
    }
    SUBCASE("packet record csv") {
        PacketRecord r;
        r.packet_id = 7;
        r.device_id = 3;
        r.profile = "car";
        r.created_at_s = 1.0 / 3.0;
        r.delay_ms = std::numeric_limits<double>::quiet_NaN();
        r.dropped = true;
        r.throughput_bps = 0.0;
        r.snr_db = -12.75;
        const PacketRecord back = packet_record_from_csv(packet_record_csv(r));
        CHECK(back.packet_id == 7);
        CHECK(back.created_at_s == r.created_at_s); // lossless double format
        CHECK(std::isnan(back.delay_ms));
        CHECK(back.dropped);
        CHECK(back.snr_db == -12.75);
    }
    SUBCASE("model set with both regressor kinds") {
        DistributionTable t;
        t.axis_labels = {"radius"};
        for (std::size_t i = 0; i < 5; ++i) {
            DistTableRow row;
            row.point_index = i;
            row.values = {50.0 + 10.0 * static_cast<double>(i)};
            row.dist.kpi = Kpi::Delay;
            row.dist.family = DistFamily::LogNormal;
            row.dist.params = {1.0 + 0.1 * static_cast<double>(i), 0.4};
            row.dist.sample_count = 100;
            t.rows.push_back(row);
            row.dist.kpi = Kpi::Throughput;
            row.dist.family = DistFamily::Exponential;
            row.dist.params = {1e-6};
            t.rows.push_back(row);
        }
        ModelSet set;
        set.models.push_back(train(t, Kpi::Delay, RegressorKind::MultilinearInterp));
        set.models.push_back(train(t, Kpi::Throughput, RegressorKind::PolynomialRidge, 1, 1e-8));
        write_model_set(set, work / "model.json");
        const ModelSet back = read_model_set(work / "model.json");
        REQUIRE(back.models.size() == 2);
        CHECK(back.models[0].regressor == RegressorKind::MultilinearInterp);
        CHECK(back.models[0].knot_params == set.models[0].knot_params);
        CHECK(back.models[0].grid_axes == set.models[0].grid_axes);
        CHECK(back.models[1].regressor == RegressorKind::PolynomialRidge);
        CHECK(back.models[1].coefs == set.models[1].coefs);
        CHECK(back.models[1].degree == 1);
        CHECK(back.models[1].ridge_weight == 1e-8);
    }
    SUBCASE("distribution table") {
        DistributionTable t;
        t.axis_labels = {"devices:car", "radius"};
        DistTableRow row;
        row.point_index = 2;
        row.values = {4.0, 62.5};
        row.dist.kpi = Kpi::DropProbability;
        row.dist.family = DistFamily::Bernoulli;
        row.dist.params = {0.125};
        row.dist.ks_statistic = 0.0;
        row.dist.sample_count = 640;
        t.rows.push_back(row);
        write_distribution_table(t, work / "table.csv");
        const DistributionTable back = read_distribution_table(work / "table.csv");
        REQUIRE(back.rows.size() == 1);
        CHECK(back.axis_labels == t.axis_labels);
        CHECK(back.rows[0].point_index == 2);
        CHECK(back.rows[0].values == std::vector<double>{4.0, 62.5});
        CHECK(back.rows[0].dist.params == std::vector<double>{0.125});
        CHECK(back.rows[0].dist.sample_count == 640);
    }
}

TEST_CASE("train rejects unknown regressors") {
    TempDir work("regressor");
    DistributionTable t;
    t.axis_labels = {"radius"};
    DistTableRow row;
    row.values = {100.0};
    row.dist.kpi = Kpi::Delay;
    row.dist.family = DistFamily::LogNormal;
    row.dist.params = {1.0, 0.5};
    t.rows.push_back(row);
    write_distribution_table(t, work / "table.csv");
    CHECK_THROWS_AS(cmd_train(work / "table.csv", work / "out", "spline", 2, 1e-8), ConfigError);
}

TEST_CASE("validate exit codes track the report verdict") {
    TempDir work("validate");
    const fs::path sweep_cfg = write_config(work, "sweep.json", kSweepConfig);
    const fs::path val_cfg = write_config(work, "validate.json", kValidateTwoPoints);
    const fs::path sweep_out = work / "sweep";
    const fs::path fit_out = work / "fit";
    const fs::path train_out = work / "train";
    REQUIRE(cmd_sweep(sweep_cfg, sweep_out, std::nullopt, std::nullopt) == 0);
    REQUIRE(cmd_fit(sweep_out, fit_out) == 0);
    REQUIRE(cmd_train(fit_out / "distribution_table.csv", train_out, "multilinear", 2, 1e-8) ==
            0);
    const fs::path model = train_out / "model.json";

    // impossible KS tolerance: continuous KPIs cannot reach 0 distance
    const int strict = cmd_validate(val_cfg, model, std::nullopt, work / "strict", std::nullopt,
                                    std::nullopt, 1e-15, 1e-15);
    CHECK(strict == 4);
    ValidationReport strict_rep =
        validation_report_from_json(parse_json_file(work / "strict" / "validation.json"));
    CHECK(!strict_rep.pass);
    CHECK(fs::exists(work / "strict" / "validation.csv"));

    // vacuous tolerances: KS <= 1 < 2 and any finite mean error passes
    const int loose = cmd_validate(val_cfg, model, std::nullopt, work / "loose", std::nullopt,
                                   std::nullopt, 2.0, 1e12);
    CHECK(loose == 0);
    ValidationReport loose_rep =
        validation_report_from_json(parse_json_file(work / "loose" / "validation.json"));
    CHECK(loose_rep.pass);
    CHECK(loose_rep.entries.size() == 6); // 2 conditions x 3 KPIs

    // an external reference log pairs with exactly one condition
    const fs::path scenario = write_config(work, "scenario.json", kScenario);
    const fs::path run_out = work / "run";
    REQUIRE(cmd_run(scenario, model, std::nullopt, run_out, std::nullopt) == 0);
    CHECK_THROWS_AS(cmd_validate(val_cfg, model,
                                 std::optional<fs::path>(run_out / "packet_log.csv"),
                                 work / "ref", std::nullopt, std::nullopt, std::nullopt,
                                 std::nullopt),
                    ConfigError);
}
