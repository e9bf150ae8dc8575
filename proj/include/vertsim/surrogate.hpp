#ifndef VERTSIM_SURROGATE_HPP
#define VERTSIM_SURROGATE_HPP

#include "vertsim/cellsim.hpp"
#include "vertsim/distfit.hpp"

#include <string>
#include <vector>

namespace vertsim {

// One fitted distribution per (condition point, kpi), as produced by the fit
// stage. `values` is the condition vector in `axis_labels` order.
struct DistTableRow {
    std::size_t point_index = 0;
    std::vector<double> values;
    KpiDistribution dist;
};

struct DistributionTable {
    std::vector<std::string> axis_labels;
    std::vector<DistTableRow> rows;
};

enum class RegressorKind { MultilinearInterp, PolynomialRidge };

std::string regressor_name(RegressorKind r);
RegressorKind regressor_from_name(const std::string& s);

struct AxisDomain {
    std::string label;
    double lo = 0.0;
    double hi = 0.0;
};

// Regression from a condition vector to the distribution parameters of one
// KPI. MultilinearInterp keeps the full grid as knots; PolynomialRidge keeps
// one coefficient vector per parameter over standardized axes. Parameters
// that must stay positive are regressed in log space (ridge only; the
// interpolant preserves positivity on its own).
struct SurrogateModel {
    Kpi kpi = Kpi::Delay;
    DistFamily family = DistFamily::LogNormal;
    RegressorKind regressor = RegressorKind::MultilinearInterp;
    std::vector<AxisDomain> domain;
    std::vector<double> training_error; // per-parameter RMSE over the table

    std::vector<std::vector<double>> grid_axes;   // sorted unique knots per axis
    std::vector<std::vector<double>> knot_params; // [flat grid index][param]

    int degree = 2;
    double ridge_weight = 1e-8;
    std::vector<std::vector<double>> coefs; // [param][term]

    void validate() const;
};

struct Prediction {
    KpiDistribution dist;
    bool extrapolated = false; // query was clamped to the training domain
};

// Which parameters of a family are positivity-constrained.
std::vector<bool> positive_param_mask(DistFamily family);

// The polynomial term expansion of a standardized point, degree <= 2:
// [1, z_i..., z_i*z_j (i <= j)...].
std::vector<double> polynomial_terms(const std::vector<double>& z, int degree);

SurrogateModel train(const DistributionTable& table, Kpi kpi, RegressorKind regressor,
                     int degree = 2, double ridge_weight = 1e-8);

// Evaluates the regressors at a raw condition vector (axis order of the
// model). Coordinates outside the training domain are clamped and flagged.
Prediction predict_at(const SurrogateModel& model, const std::vector<double>& point);

// Extracts the model's condition vector from CellConditions and predicts.
Prediction predict(const SurrogateModel& model, const CellConditions& conditions);

// Condition-vector extraction by axis label ("devices:<profile>", "radius",
// "rate:<profile>", "d_los"). A device count absent from the map reads as 0.
double axis_value(const CellConditions& c, const std::string& label);
std::vector<double> condition_vector(const CellConditions& c,
                                     const std::vector<std::string>& labels);

// One model per KPI, as persisted in a model file.
struct ModelSet {
    std::vector<SurrogateModel> models;

    const SurrogateModel* find(Kpi kpi) const;
    const SurrogateModel& require(Kpi kpi) const; // ConfigError when missing
};

} // namespace vertsim

#endif
