#include "vertsim/surrogate.hpp"

#include "vertsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vertsim {

namespace {

// Gaussian elimination with partial pivoting; a is destroyed.
std::vector<double> solve_linear_system(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-300)
            throw DataError("polynomial design is rank-deficient");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t row = n; row-- > 0;) {
        double s = b[row];
        for (std::size_t c = row + 1; c < n; ++c) s -= a[row][c] * x[c];
        x[row] = s / a[row][row];
    }
    return x;
}

void enforce_family_constraints(DistFamily family, std::vector<double>& p) {
    constexpr double kFloor = 1e-12;
    switch (family) {
    case DistFamily::LogNormal:
        p[1] = std::max(p[1], kFloor);
        break;
    case DistFamily::Gamma:
        p[0] = std::max(p[0], kFloor);
        p[1] = std::max(p[1], kFloor);
        break;
    case DistFamily::Exponential:
        p[0] = std::max(p[0], kFloor);
        break;
    case DistFamily::Bernoulli:
        p[0] = std::clamp(p[0], 0.0, 1.0);
        break;
    }
}

double standardize(double x, const AxisDomain& d) {
    if (d.hi == d.lo) return 0.0;
    return (x - d.lo) / (d.hi - d.lo);
}

} // namespace

std::string regressor_name(RegressorKind r) {
    switch (r) {
    case RegressorKind::MultilinearInterp: return "multilinear";
    case RegressorKind::PolynomialRidge: return "poly_ridge";
    }
    throw std::logic_error("unreachable");
}

RegressorKind regressor_from_name(const std::string& s) {
    if (s == "multilinear") return RegressorKind::MultilinearInterp;
    if (s == "poly_ridge") return RegressorKind::PolynomialRidge;
    throw ConfigError("unknown regressor: " + s);
}

std::vector<bool> positive_param_mask(DistFamily family) {
    switch (family) {
    case DistFamily::LogNormal: return {false, true};
    case DistFamily::Gamma: return {true, true};
    case DistFamily::Exponential: return {true};
    case DistFamily::Bernoulli: return {false};
    }
    throw std::logic_error("unreachable");
}

std::vector<double> polynomial_terms(const std::vector<double>& z, int degree) {
    std::vector<double> t;
    t.push_back(1.0);
    if (degree >= 1)
        for (double zi : z) t.push_back(zi);
    if (degree >= 2)
        for (std::size_t i = 0; i < z.size(); ++i)
            for (std::size_t j = i; j < z.size(); ++j) t.push_back(z[i] * z[j]);
    return t;
}

void SurrogateModel::validate() const {
    const std::size_t n_params = param_count(family);
    if (regressor == RegressorKind::MultilinearInterp) {
        if (grid_axes.size() != domain.size()) throw DataError("surrogate model: axis mismatch");
        std::size_t total = 1;
        for (const auto& ax : grid_axes) {
            if (ax.empty()) throw DataError("surrogate model: empty grid axis");
            if (!std::is_sorted(ax.begin(), ax.end()))
                throw DataError("surrogate model: unsorted grid axis");
            total *= ax.size();
        }
        if (knot_params.size() != total) throw DataError("surrogate model: knot count mismatch");
        for (const auto& p : knot_params)
            if (p.size() != n_params) throw DataError("surrogate model: knot param arity");
    } else {
        if (degree < 0 || degree > 2) throw DataError("surrogate model: degree must be 0..2");
        if (coefs.size() != n_params) throw DataError("surrogate model: one regressor per parameter");
        const std::size_t n_terms =
            polynomial_terms(std::vector<double>(domain.size(), 0.0), degree).size();
        for (const auto& c : coefs)
            if (c.size() != n_terms) throw DataError("surrogate model: coefficient arity");
    }
    if (training_error.size() != n_params)
        throw DataError("surrogate model: training_error arity");
}

SurrogateModel train(const DistributionTable& table, Kpi kpi, RegressorKind regressor, int degree,
                     double ridge_weight) {
    if (degree < 0 || degree > 2) throw ConfigError("polynomial degree must be 0..2");
    if (ridge_weight < 0.0) throw ConfigError("ridge weight must be >= 0");

    std::vector<const DistTableRow*> rows;
    for (const auto& r : table.rows)
        if (r.dist.kpi == kpi) rows.push_back(&r);
    if (rows.empty()) throw DataError("distribution table has no rows for kpi " + kpi_name(kpi));

    const DistFamily family = rows.front()->dist.family;
    const std::size_t n_params = param_count(family);
    const std::size_t n_axes = table.axis_labels.size();
    for (const auto* r : rows) {
        if (r->dist.family != family)
            throw DataError("distribution table mixes families for kpi " + kpi_name(kpi) +
                            "; refit with a fixed family");
        if (r->values.size() != n_axes) throw DataError("table row arity mismatch");
        if (r->dist.params.size() != n_params) throw DataError("table row param arity mismatch");
    }

    SurrogateModel m;
    m.kpi = kpi;
    m.family = family;
    m.regressor = regressor;
    m.degree = degree;
    m.ridge_weight = ridge_weight;
    m.domain.resize(n_axes);
    for (std::size_t i = 0; i < n_axes; ++i) {
        AxisDomain& d = m.domain[i];
        d.label = table.axis_labels[i];
        d.lo = d.hi = rows.front()->values[i];
        for (const auto* r : rows) {
            d.lo = std::min(d.lo, r->values[i]);
            d.hi = std::max(d.hi, r->values[i]);
        }
    }

    if (regressor == RegressorKind::MultilinearInterp) {
        m.grid_axes.resize(n_axes);
        for (std::size_t i = 0; i < n_axes; ++i) {
            std::vector<double> vals;
            for (const auto* r : rows) vals.push_back(r->values[i]);
            std::sort(vals.begin(), vals.end());
            vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
            m.grid_axes[i] = std::move(vals);
        }
        std::size_t total = 1;
        for (const auto& ax : m.grid_axes) total *= ax.size();
        if (rows.size() != total)
            throw DataError("distribution table does not cover a full grid (" +
                            std::to_string(rows.size()) + " rows, " + std::to_string(total) +
                            " grid points)");
        m.knot_params.assign(total, {});
        for (const auto* r : rows) {
            std::size_t flat = 0;
            for (std::size_t i = 0; i < n_axes; ++i) {
                const auto& ax = m.grid_axes[i];
                const auto it = std::lower_bound(ax.begin(), ax.end(), r->values[i]);
                flat = flat * ax.size() + static_cast<std::size_t>(it - ax.begin());
            }
            if (!m.knot_params[flat].empty())
                throw DataError("distribution table has duplicate grid points");
            m.knot_params[flat] = r->dist.params;
        }
        m.training_error.assign(n_params, 0.0);
        m.validate();
        return m;
    }

    // PolynomialRidge on standardized axes; positivity-constrained parameters
    // are regressed in log space so the exponentiated prediction stays > 0.
    const std::vector<bool> log_mask = positive_param_mask(family);
    std::vector<std::vector<double>> design;
    design.reserve(rows.size());
    for (const auto* r : rows) {
        std::vector<double> z(n_axes);
        for (std::size_t i = 0; i < n_axes; ++i) z[i] = standardize(r->values[i], m.domain[i]);
        design.push_back(polynomial_terms(z, degree));
    }
    const std::size_t n_terms = design.front().size();
    if (rows.size() < n_terms + 1)
        throw DataError("polynomial ridge needs at least " + std::to_string(n_terms + 1) +
                        " table rows, got " + std::to_string(rows.size()));

    m.coefs.resize(n_params);
    m.training_error.assign(n_params, 0.0);
    for (std::size_t p = 0; p < n_params; ++p) {
        std::vector<double> y(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            double v = rows[r]->dist.params[p];
            y[r] = log_mask[p] ? std::log(std::max(v, 1e-12)) : v;
        }
        std::vector<std::vector<double>> ata(n_terms, std::vector<double>(n_terms, 0.0));
        std::vector<double> aty(n_terms, 0.0);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t i = 0; i < n_terms; ++i) {
                aty[i] += design[r][i] * y[r];
                for (std::size_t j = 0; j < n_terms; ++j) ata[i][j] += design[r][i] * design[r][j];
            }
        }
        for (std::size_t i = 0; i < n_terms; ++i) ata[i][i] += ridge_weight;
        m.coefs[p] = solve_linear_system(std::move(ata), std::move(aty));

        double sse = 0.0;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            double fit = 0.0;
            for (std::size_t i = 0; i < n_terms; ++i) fit += m.coefs[p][i] * design[r][i];
            if (log_mask[p]) fit = std::exp(fit);
            const double err = fit - rows[r]->dist.params[p];
            sse += err * err;
        }
        m.training_error[p] = std::sqrt(sse / static_cast<double>(rows.size()));
    }
    m.validate();
    return m;
}

Prediction predict_at(const SurrogateModel& model, const std::vector<double>& point) {
    model.validate();
    if (point.size() != model.domain.size())
        throw DataError("prediction point arity does not match the model");

    Prediction out;
    std::vector<double> x(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
        x[i] = std::clamp(point[i], model.domain[i].lo, model.domain[i].hi);
        if (x[i] != point[i]) out.extrapolated = true;
    }

    const std::size_t n_params = param_count(model.family);
    std::vector<double> params(n_params, 0.0);

    if (model.regressor == RegressorKind::MultilinearInterp) {
        const std::size_t n_axes = model.grid_axes.size();
        std::vector<std::size_t> base(n_axes, 0);
        std::vector<double> w(n_axes, 0.0); // weight of the upper knot
        for (std::size_t i = 0; i < n_axes; ++i) {
            const auto& ax = model.grid_axes[i];
            if (ax.size() == 1 || x[i] <= ax.front()) {
                base[i] = 0;
                w[i] = 0.0;
            } else if (x[i] >= ax.back()) {
                base[i] = ax.size() - 2;
                w[i] = 1.0;
            } else {
                const auto it = std::upper_bound(ax.begin(), ax.end(), x[i]);
                base[i] = static_cast<std::size_t>(it - ax.begin()) - 1;
                w[i] = (x[i] - ax[base[i]]) / (ax[base[i] + 1] - ax[base[i]]);
            }
        }
        const std::size_t corners = std::size_t{1} << n_axes;
        for (std::size_t mask = 0; mask < corners; ++mask) {
            double weight = 1.0;
            std::size_t flat = 0;
            for (std::size_t i = 0; i < n_axes; ++i) {
                const bool upper = (mask >> i) & 1u;
                weight *= upper ? w[i] : 1.0 - w[i];
                std::size_t idx = base[i] + (upper ? 1 : 0);
                if (model.grid_axes[i].size() == 1) idx = 0;
                flat = flat * model.grid_axes[i].size() + idx;
            }
            if (weight == 0.0) continue;
            for (std::size_t p = 0; p < n_params; ++p)
                params[p] += weight * model.knot_params[flat][p];
        }
    } else {
        const std::vector<bool> log_mask = positive_param_mask(model.family);
        std::vector<double> z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = standardize(x[i], model.domain[i]);
        const std::vector<double> terms = polynomial_terms(z, model.degree);
        for (std::size_t p = 0; p < n_params; ++p) {
            double v = 0.0;
            for (std::size_t i = 0; i < terms.size(); ++i) v += model.coefs[p][i] * terms[i];
            params[p] = log_mask[p] ? std::exp(v) : v;
        }
    }

    enforce_family_constraints(model.family, params);
    out.dist.kpi = model.kpi;
    out.dist.family = model.family;
    out.dist.params = std::move(params);
    out.dist.ks_statistic = 0.0;
    out.dist.sample_count = 0;
    return out;
}

Prediction predict(const SurrogateModel& model, const CellConditions& conditions) {
    std::vector<std::string> labels;
    labels.reserve(model.domain.size());
    for (const auto& d : model.domain) labels.push_back(d.label);
    return predict_at(model, condition_vector(conditions, labels));
}

double axis_value(const CellConditions& c, const std::string& label) {
    const auto colon = label.find(':');
    const std::string dim = label.substr(0, colon);
    const std::string profile = colon == std::string::npos ? "" : label.substr(colon + 1);
    if (dim == "devices") {
        if (profile.empty()) throw ConfigError("axis label devices needs a profile");
        const auto it = c.device_counts.find(profile);
        return it == c.device_counts.end() ? 0.0 : static_cast<double>(it->second);
    }
    if (dim == "radius") return c.cell_radius_m;
    if (dim == "rate") {
        const TrafficProfile* p = c.find_profile(profile);
        if (!p) throw ConfigError("axis label rate references unknown profile: " + profile);
        return p->packet_rate_hz;
    }
    if (dim == "d_los") return c.channel.d_los_m;
    throw ConfigError("unknown axis label: " + label);
}

std::vector<double> condition_vector(const CellConditions& c,
                                     const std::vector<std::string>& labels) {
    std::vector<double> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(axis_value(c, l));
    return out;
}

const SurrogateModel* ModelSet::find(Kpi kpi) const {
    for (const auto& m : models)
        if (m.kpi == kpi) return &m;
    return nullptr;
}

const SurrogateModel& ModelSet::require(Kpi kpi) const {
    const SurrogateModel* m = find(kpi);
    if (!m) throw ConfigError("model set is missing kpi " + kpi_name(kpi));
    return *m;
}

} // namespace vertsim
