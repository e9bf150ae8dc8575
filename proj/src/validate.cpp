#include "vertsim/validate.hpp"

#include "vertsim/errors.hpp"
#include "vertsim/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace vertsim {

KpiSamples collect_samples(const std::vector<PacketRecord>& records) {
    KpiSamples s;
    for (const auto& r : records) {
        s.drops.push_back(r.dropped ? 1.0 : 0.0);
        if (!r.dropped) {
            s.delay_ms.push_back(r.delay_ms);
            s.throughput_bps.push_back(r.throughput_bps);
        }
    }
    return s;
}

KpiSamples collect_samples(const std::vector<CityPacket>& log) {
    KpiSamples s;
    for (const auto& p : log) {
        s.drops.push_back(p.dropped ? 1.0 : 0.0);
        if (!p.dropped) {
            s.delay_ms.push_back(p.delay_ms);
            s.throughput_bps.push_back(p.throughput_bps);
        }
    }
    return s;
}

namespace {

ValidationEntry compare(Kpi kpi, const std::vector<double>& reference,
                        const std::vector<double>& drawn, const ValidationTolerances& tol,
                        std::size_t condition_index) {
    ValidationEntry e;
    e.condition_index = condition_index;
    e.kpi = kpi;
    e.n_reference = reference.size();
    e.n_surrogate = drawn.size();
    if (reference.empty()) {
        e.error = "no reference samples for " + kpi_name(kpi);
        return e;
    }
    e.ks_distance = ks_two_sample(reference, drawn);
    e.reference_mean = mean(reference);
    e.surrogate_mean = mean(drawn);
    if (kpi == Kpi::DropProbability)
        e.mean_error = e.surrogate_mean - e.reference_mean;
    else if (e.reference_mean == 0.0)
        e.mean_error = e.surrogate_mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    else
        e.mean_error = (e.surrogate_mean - e.reference_mean) / e.reference_mean;
    e.pass = e.ks_distance < tol.ks && std::fabs(e.mean_error) < tol.mean;
    return e;
}

} // namespace

std::vector<ValidationEntry> validate_condition(const CellConditions& condition,
                                                const KpiSamples& reference,
                                                const ModelSet& models, Rng& rng,
                                                std::size_t n_samples,
                                                const ValidationTolerances& tolerances,
                                                std::size_t condition_index) {
    if (n_samples == 0) throw ConfigError("n_samples must be >= 1");
    const SurrogateModel& delay_model = models.require(Kpi::Delay);
    const SurrogateModel& drop_model = models.require(Kpi::DropProbability);
    const SurrogateModel& tp_model = models.require(Kpi::Throughput);

    auto draw = [&](const SurrogateModel& m) {
        const KpiDistribution dist = predict(m, condition).dist;
        std::vector<double> out(n_samples);
        for (auto& v : out) v = sample_kpi(dist, rng);
        return out;
    };

    std::vector<ValidationEntry> entries;
    entries.push_back(compare(Kpi::Delay, reference.delay_ms, draw(delay_model), tolerances,
                              condition_index));
    entries.push_back(compare(Kpi::DropProbability, reference.drops, draw(drop_model), tolerances,
                              condition_index));
    entries.push_back(compare(Kpi::Throughput, reference.throughput_bps, draw(tp_model),
                              tolerances, condition_index));
    return entries;
}

ValidationReport cross_validate(const std::vector<CellConditions>& conditions,
                                const ModelSet& models, double duration_s, std::uint64_t seed,
                                const CellSimParams& params, std::size_t n_samples,
                                const ValidationTolerances& tolerances, int workers) {
    ValidationReport rep;
    rep.tolerances = tolerances;
    std::vector<std::vector<ValidationEntry>> per_condition(conditions.size());

    parallel_for(conditions.size(), workers, [&](std::size_t i) {
        try {
            const auto records =
                run_cell(conditions[i], duration_s, derive_seed(seed, "validate", i), params);
            const KpiSamples reference = collect_samples(records);
            Rng rng(derive_seed(seed, "surrogate", i));
            per_condition[i] = validate_condition(conditions[i], reference, models, rng,
                                                  n_samples, tolerances, i);
        } catch (const std::exception& ex) {
            ValidationEntry e;
            e.condition_index = i;
            e.error = ex.what();
            per_condition[i] = {e};
        }
    });

    for (auto& entries : per_condition)
        for (auto& e : entries) rep.entries.push_back(std::move(e));
    for (const auto& e : rep.entries) rep.pass = rep.pass && e.pass;
    return rep;
}

ValidationReport validate_against(const std::vector<CellConditions>& conditions,
                                  const std::vector<KpiSamples>& references,
                                  const ModelSet& models, std::uint64_t seed,
                                  std::size_t n_samples, const ValidationTolerances& tolerances) {
    if (conditions.size() != references.size())
        throw ConfigError("conditions and reference sample sets must pair up");
    ValidationReport rep;
    rep.tolerances = tolerances;
    for (std::size_t i = 0; i < conditions.size(); ++i) {
        try {
            Rng rng(derive_seed(seed, "surrogate", i));
            for (auto& e : validate_condition(conditions[i], references[i], models, rng,
                                              n_samples, tolerances, i))
                rep.entries.push_back(std::move(e));
        } catch (const std::exception& ex) {
            ValidationEntry e;
            e.condition_index = i;
            e.error = ex.what();
            rep.entries.push_back(std::move(e));
        }
    }
    for (const auto& e : rep.entries) rep.pass = rep.pass && e.pass;
    return rep;
}

} // namespace vertsim
