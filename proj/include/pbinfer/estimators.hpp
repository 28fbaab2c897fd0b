#ifndef PBINFER_ESTIMATORS_HPP
#define PBINFER_ESTIMATORS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pbinfer/moments.hpp"

namespace pbinfer {

enum class Method { lab, naive, ppi, ppi_a, cc, ppipp, pspa, sur, pop };

const char* method_name(Method m);
Method method_from_name(const std::string& s);

/// sur and pop are defined for the linear family only.
bool method_supported(Method m, Family f);

enum class WeightKind { identity_w, cc_w, ppipp_w, pspa_w, sur_w, pop_w, zero_w, custom };

struct WeightSpec {
    WeightKind kind = WeightKind::custom;
    Mat w;
};

struct PBFit {
    Method method = Method::lab;
    Vec theta;
    std::optional<WeightSpec> weight;
    std::size_t n = 0;       // rows backing the fit
    Mat if_rows;             // n x dim influence-function contributions
    Mat cov;                 // n * asymptotic covariance, plug-in
    Vec se, ci_lower, ci_upper;

    bool has_inference() const { return !cov.empty(); }
};

struct FitOptions {
    double ci_level = 0.95;
    double ridge = 0.0;
    bool point_only = false; // skip influence rows / covariance / intervals
};

// Weight matrices of the augmentation term beta_lab - W (gamma_lab - gamma_all).

/// W^CC = A C12 C22^{-1} B^{-1}, the variance-minimizing weight.
WeightSpec cc_weight(const MomentSet& m, double ridge = 0.0);

/// lambda * I with lambda = tr(sym(A C12 A)) / tr(A C22 A), clipped to [0, 1].
WeightSpec ppipp_weight(const MomentSet& m);

/// diag(v) with v_j = sym(A C12 A)_jj / (A C22 A)_jj, each clipped to [0, 1].
WeightSpec pspa_weight(const MomentSet& m);

/// Scalar ratio of labeled residual cross-products (linear family only).
WeightSpec sur_weight(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core);

/// (n_unlab / n) * Corr(residual_y, residual_yhat) on labeled rows (linear only).
WeightSpec pop_weight(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core);

PBFit estimate_lab(const Dataset& ds, const EstimatingFunction& ef, const FitOptions& opts = {});
PBFit estimate_naive(const Dataset& ds, const EstimatingFunction& ef, const FitOptions& opts = {});
PBFit estimate_ppi(const Dataset& ds, const EstimatingFunction& ef, const FitOptions& opts = {});
PBFit estimate_ppi_a(const Dataset& ds, const EstimatingFunction& ef, const FitOptions& opts = {});
PBFit estimate_cc(const Dataset& ds, const EstimatingFunction& ef, const FitOptions& opts = {});
PBFit estimate_ppipp(const Dataset& ds, const EstimatingFunction& ef, const FitOptions& opts = {});
PBFit estimate_pspa(const Dataset& ds, const EstimatingFunction& ef, const FitOptions& opts = {});
PBFit estimate_sur(const Dataset& ds, const EstimatingFunction& ef, const FitOptions& opts = {});
PBFit estimate_pop(const Dataset& ds, const EstimatingFunction& ef, const FitOptions& opts = {});

/// beta_lab - w (gamma_lab - gamma_all) for an arbitrary weight; the shared
/// code path behind ppi_a / cc / ppipp / pspa / sur.
PBFit estimate_weighted(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core,
                        const MomentSet& m, WeightSpec weight, Method label,
                        const FitOptions& opts = {});

/// Fits several methods sharing one set of core solves and moments.
std::vector<PBFit> fit_methods(const Dataset& ds, const EstimatingFunction& ef,
                               const std::vector<Method>& methods, const FitOptions& opts = {});

/// Control-variate mean n^{-1} sum [y_i - lambda (z_i - mu_z)] with the
/// variance-minimizing sample lambda. Returns (estimate, lambda).
std::pair<double, double> control_variate_mean(const Vec& y, const Vec& z, double mu_z);

} // namespace pbinfer

#endif
