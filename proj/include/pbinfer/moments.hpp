#ifndef PBINFER_MOMENTS_HPP
#define PBINFER_MOMENTS_HPP

#include "pbinfer/dataset.hpp"
#include "pbinfer/estimating.hpp"

namespace pbinfer {

// The four standard Z-estimates a prediction-based fit is assembled from.
struct CoreFits {
    ZEstimate beta_lab;    // phi(Y, X; .) over labeled rows
    ZEstimate gamma_lab;   // phi(Yhat, X; .) over labeled rows
    ZEstimate gamma_all;   // phi(Yhat, X; .) over all rows
    bool has_unlab = false;
    ZEstimate gamma_unlab; // phi(Yhat, X; .) over unlabeled rows, when present
};

CoreFits solve_core(const Dataset& ds, const EstimatingFunction& ef, bool with_unlab = true);

// Plug-in moments of the influence-function algebra. A and B are the
// inverted mean Jacobians (kept signed, so both are negative definite for
// the supported families); jac_y/jac_yhat are the uninverted versions.
// Cross moments evaluate phi(Yhat, X; .) at gamma_all.
struct MomentSet {
    Family family = Family::mean;
    std::size_t dim = 1;
    double pi_hat = 0.0;
    Mat A, B;
    Mat jac_y, jac_yhat;
    Mat C11, C12, C22;
    // Residual moments for the mean/linear families; these coincide with
    // C12/C22 because phi = x * residual there.
    Mat sigma_yyhat, sigma_yhatyhat;
};

MomentSet estimate_moments(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core,
                           double ridge = 0.0);

} // namespace pbinfer

#endif
