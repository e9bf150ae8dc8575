#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vertsim/channel.hpp"
#include "vertsim/errors.hpp"
#include "vertsim/validate.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

using namespace vertsim;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

SurrogateModel const_model(Kpi kpi, DistFamily family, std::vector<double> params) {
    DistributionTable t;
    t.axis_labels = {"radius"};
    DistTableRow row;
    row.point_index = 0;
    row.values = {100.0};
    row.dist.kpi = kpi;
    row.dist.family = family;
    row.dist.params = std::move(params);
    row.dist.sample_count = 100;
    t.rows.push_back(row);
    return train(t, kpi, RegressorKind::MultilinearInterp);
}

ModelSet model_set(double delay_mu, double delay_sigma, double drop_p, double tp_rate) {
    ModelSet set;
    set.models.push_back(const_model(Kpi::Delay, DistFamily::LogNormal, {delay_mu, delay_sigma}));
    set.models.push_back(const_model(Kpi::DropProbability, DistFamily::Bernoulli, {drop_p}));
    set.models.push_back(const_model(Kpi::Throughput, DistFamily::Exponential, {tp_rate}));
    return set;
}

// Reference drawn straight from the target distributions.
KpiSamples draw_reference(const ModelSet& models, std::size_t n, std::uint64_t seed) {
    KpiSamples s;
    Rng rng(seed);
    const CellConditions at_default{};
    const KpiDistribution delay = predict(models.require(Kpi::Delay), at_default).dist;
    const KpiDistribution drop = predict(models.require(Kpi::DropProbability), at_default).dist;
    const KpiDistribution tp = predict(models.require(Kpi::Throughput), at_default).dist;
    for (std::size_t i = 0; i < n; ++i) {
        s.drops.push_back(sample_kpi(drop, rng));
        if (s.drops.back() == 0.0) {
            s.delay_ms.push_back(sample_kpi(delay, rng));
            s.throughput_bps.push_back(sample_kpi(tp, rng));
        }
    }
    return s;
}

// Deterministic-link cell for the cross-validation reference runs.
CellConditions reference_cell(double rate_hz) {
    CellConditions c;
    c.cell_radius_m = 1e-3;
    c.radio.tx_height_m = 10.0;
    c.radio.rx_height_m = 10.0;
    c.channel.ci_los = {1.0, fspl_db(28e9, 1.0), 2.0, 0.0};
    c.channel.ci_nlos = {1.0, fspl_db(28e9, 1.0), 3.2, 0.0};
    c.channel.d_los_m = 1e12;
    c.channel.rice_k_db = std::numeric_limits<double>::infinity();
    TrafficProfile p;
    p.name = "car";
    p.packet_rate_hz = rate_hz;
    p.packet_size_bytes = 92500.0;
    c.profiles.push_back(p);
    c.device_counts["car"] = 1;
    return c;
}

const ValidationEntry* find_entry(const ValidationReport& rep, std::size_t cond, Kpi kpi) {
    for (const auto& e : rep.entries)
        if (e.condition_index == cond && e.kpi == kpi && e.error.empty()) return &e;
    return nullptr;
}

} // namespace

TEST_CASE("collect_samples splits drops from delivered KPIs") {
    std::vector<PacketRecord> records(4);
    records[0].delay_ms = 5.0;
    records[0].throughput_bps = 1e6;
    records[1].dropped = true;
    records[1].delay_ms = kNan;
    records[2].delay_ms = 7.0;
    records[2].throughput_bps = 2e6;
    records[3].dropped = true;
    KpiSamples s = collect_samples(records);
    CHECK(s.drops == std::vector<double>{0.0, 1.0, 0.0, 1.0});
    CHECK(s.delay_ms == std::vector<double>{5.0, 7.0});
    CHECK(s.throughput_bps == std::vector<double>{1e6, 2e6});

    std::vector<CityPacket> log(2);
    log[0].delay_ms = 3.0;
    log[0].throughput_bps = 5e5;
    log[1].dropped = true;
    KpiSamples c = collect_samples(log);
    CHECK(c.drops == std::vector<double>{0.0, 1.0});
    CHECK(c.delay_ms == std::vector<double>{3.0});
}

TEST_CASE("surrogate draws match their own distribution") {
    ModelSet models = model_set(std::log(10.0), 0.3, 0.1, 1e-5);
    KpiSamples reference = draw_reference(models, 20000, 77);
    CellConditions cond;
    Rng rng(123);
    auto entries = validate_condition(cond, reference, models, rng, 20000, {});
    REQUIRE(entries.size() == 3);
    for (const auto& e : entries) {
        CAPTURE(kpi_name(e.kpi));
        CHECK(e.error.empty());
        CHECK(e.pass);
        CHECK(e.ks_distance < 0.03);
    }
}

TEST_CASE("a shifted surrogate fails validation") {
    ModelSet truth = model_set(std::log(10.0), 0.3, 0.1, 1e-5);
    KpiSamples reference = draw_reference(truth, 20000, 77);
    ModelSet shifted = model_set(std::log(20.0), 0.3, 0.1, 1e-5);
    CellConditions cond;
    Rng rng(123);
    auto entries = validate_condition(cond, reference, shifted, rng, 20000, {});
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].kpi == Kpi::Delay);
    CHECK(!entries[0].pass);
    CHECK(entries[0].mean_error > 0.5); // about +100% relative
    CHECK(entries[1].pass);             // drop model untouched
}

TEST_CASE("drop mean error is an absolute probability difference") {
    // All-delivered reference: relative error would be infinite, the
    // absolute difference keeps small drop models comparable.
    ModelSet truth = model_set(std::log(10.0), 0.3, 0.0, 1e-5);
    KpiSamples reference = draw_reference(truth, 5000, 9);
    CellConditions cond;

    ModelSet close = model_set(std::log(10.0), 0.3, 0.04, 1e-5);
    Rng rng1(123);
    auto near = validate_condition(cond, reference, close, rng1, 5000, {});
    CHECK(near[1].kpi == Kpi::DropProbability);
    CHECK(near[1].pass);
    CHECK(std::fabs(near[1].mean_error) < 0.06);

    ModelSet far = model_set(std::log(10.0), 0.3, 0.5, 1e-5);
    Rng rng2(123);
    auto off = validate_condition(cond, reference, far, rng2, 5000, {});
    CHECK(!off[1].pass);
    CHECK(off[1].mean_error > 0.3);
}

TEST_CASE("missing reference samples are reported as entry errors") {
    ModelSet models = model_set(std::log(10.0), 0.3, 0.1, 1e-5);
    KpiSamples empty;
    empty.drops = {0.0, 0.0}; // drops exist, delay/throughput do not
    CellConditions cond;
    Rng rng(1);
    auto entries = validate_condition(cond, empty, models, rng, 100, {});
    REQUIRE(entries.size() == 3);
    CHECK(!entries[0].error.empty());
    CHECK(!entries[0].pass);
    CHECK(entries[1].error.empty());
    CHECK(!entries[2].error.empty());
}

TEST_CASE("validate_condition rejects zero samples") {
    ModelSet models = model_set(std::log(10.0), 0.3, 0.1, 1e-5);
    CellConditions cond;
    Rng rng(1);
    CHECK_THROWS_AS(validate_condition(cond, KpiSamples{}, models, rng, 0, {}), ConfigError);
}

TEST_CASE("cross_validate evaluates conditions and captures failures") {
    std::vector<CellConditions> conditions{reference_cell(200.0), reference_cell(100.0)};
    conditions[1].cell_radius_m = -1.0; // run_cell will refuse this one
    ModelSet models = model_set(std::log(1.0), 0.1, 0.0, 1e-5);
    ValidationReport rep = cross_validate(conditions, models, 5.0, 42, {}, 2000, {});

    CHECK(!rep.pass);
    int evaluated = 0, failed = 0;
    for (const auto& e : rep.entries) {
        if (e.condition_index == 0) {
            CHECK(e.error.empty());
            CHECK(e.n_reference > 0);
            ++evaluated;
        } else {
            CHECK(!e.error.empty());
            CHECK(!e.pass);
            ++failed;
        }
    }
    CHECK(evaluated == 3);
    CHECK(failed == 1);
}

TEST_CASE("cross_validate is vacuous on an empty condition list") {
    ModelSet models = model_set(std::log(10.0), 0.3, 0.1, 1e-5);
    ValidationReport rep = cross_validate({}, models, 1.0, 1, {}, 100, {});
    CHECK(rep.entries.empty());
    CHECK(rep.pass);
}

TEST_CASE("cross_validate does not depend on the worker count") {
    std::vector<CellConditions> conditions{reference_cell(150.0), reference_cell(250.0)};
    ModelSet models = model_set(std::log(1.1), 0.2, 0.0, 1e-5);
    ValidationReport serial = cross_validate(conditions, models, 4.0, 9, {}, 1000, {}, 1);
    ValidationReport threaded = cross_validate(conditions, models, 4.0, 9, {}, 1000, {}, 4);
    REQUIRE(serial.entries.size() == threaded.entries.size());
    for (std::size_t i = 0; i < serial.entries.size(); ++i) {
        CHECK(serial.entries[i].ks_distance == threaded.entries[i].ks_distance);
        CHECK(serial.entries[i].mean_error == threaded.entries[i].mean_error);
        CHECK(serial.entries[i].pass == threaded.entries[i].pass);
    }
}

TEST_CASE("validate_against uses the supplied reference") {
    ModelSet models = model_set(std::log(10.0), 0.3, 0.05, 1e-5);
    std::vector<KpiSamples> refs{draw_reference(models, 10000, 5)};
    std::vector<CellConditions> conditions{CellConditions{}};
    ValidationReport rep = validate_against(conditions, refs, models, 11, 10000, {});
    CHECK(rep.pass);
    REQUIRE(rep.entries.size() == 3);
    CHECK(find_entry(rep, 0, Kpi::Delay) != nullptr);
    CHECK(find_entry(rep, 0, Kpi::DropProbability) != nullptr);
    CHECK(find_entry(rep, 0, Kpi::Throughput) != nullptr);

    SUBCASE("conditions and references must pair up") {
        refs.push_back(KpiSamples{});
        CHECK_THROWS_AS(validate_against(conditions, refs, models, 11, 100, {}), ConfigError);
    }
}

TEST_CASE("report pass is the conjunction of entry passes") {
    ModelSet truth = model_set(std::log(10.0), 0.3, 0.1, 1e-5);
    std::vector<KpiSamples> refs{draw_reference(truth, 10000, 5)};
    std::vector<CellConditions> conditions{CellConditions{}};

    ValidationReport good = validate_against(conditions, refs, truth, 11, 10000, {});
    CHECK(good.pass);

    ModelSet bad = model_set(std::log(10.0), 0.3, 0.1, 3e-5); // throughput off by 3x
    ValidationReport mixed = validate_against(conditions, refs, bad, 11, 10000, {});
    CHECK(!mixed.pass);
    int passes = 0;
    for (const auto& e : mixed.entries) passes += e.pass ? 1 : 0;
    CHECK(passes == 2);
}
