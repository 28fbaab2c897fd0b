#ifndef PBINFER_INFERENCE_HPP
#define PBINFER_INFERENCE_HPP

#include "pbinfer/estimators.hpp"

namespace pbinfer {

/// Standard normal quantile (Acklam's rational approximation, |err| < 2e-9).
double normal_quantile(double p);

/// n^{-1} sum IF_i IF_i^T, symmetrized.
Mat if_covariance(const PBFit& fit);

/// Fills cov / se / ci from fit.if_rows at the given confidence level.
void attach_inference(PBFit& fit, double level);

/// aVar(lab) - aVar(ppi_a). Mean/linear families use the residual-moment
/// form with A only; logistic uses the general expression with B.
Mat delta_avar_ppia(const MomentSet& m);

/// aVar(lab) - aVar(cc) = (1/pi - 1) A C12 C22^{-1} C12^T A^T, PSD by
/// construction.
Mat delta_avar_cc(const MomentSet& m, double ridge = 0.0);

/// Plug-in n * aVar of beta_lab - w (gamma_lab - gamma_all):
///   (1/pi) A C11 A^T - (1/pi - 1) [ sym2(A C12 B^T w^T) - w B C22 B^T w^T ]
Mat avar_of_weight(const MomentSet& m, const Mat& w);

struct HomoskedasticSummary {
    double sigma_y = 0.0;
    double sigma_yhat = 0.0;
    double rho = 0.0;
    double threshold = 0.0; // 0.5 * sigma_yhat / sigma_y
};

/// Residual scale and partial correlation from labeled rows (mean or linear
/// family; residuals taken at beta_lab and gamma_lab).
HomoskedasticSummary homoskedastic_summary(const Dataset& ds, const EstimatingFunction& ef,
                                           const CoreFits& core);

struct AvarReport {
    Method method = Method::ppi_a;
    Mat avar;
    Mat delta_vs_lab;
    std::vector<char> efficient_vs_lab; // diagonal of delta > 0, per coordinate
};

/// Efficiency diagnostic for ppi_a or cc against the labeled-only baseline.
AvarReport avar_report(Method which, const MomentSet& m);

} // namespace pbinfer

#endif
