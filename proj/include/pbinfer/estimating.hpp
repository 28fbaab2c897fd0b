#ifndef PBINFER_ESTIMATING_HPP
#define PBINFER_ESTIMATING_HPP

#include <span>

#include "pbinfer/dataset.hpp"
#include "pbinfer/numerics.hpp"

namespace pbinfer {

// Estimating function phi(y, x; theta) and its Jacobian:
//   mean:     y - theta                    (dim 1, x unused)
//   linear:   x (y - x' theta)
//   logistic: x (y - expit(x' theta))
struct EstimatingFunction {
    Family family = Family::mean;
    std::size_t dim = 1;
};

inline EstimatingFunction make_ef(Family f, std::size_t x_dim) {
    return {f, f == Family::mean ? 1 : x_dim};
}

double expit(double t);

Vec phi(const EstimatingFunction& ef, double y, std::span<const double> x, std::span<const double> theta);
Mat jacobian(const EstimatingFunction& ef, double y, std::span<const double> x, std::span<const double> theta);

/// Adds phi(y, x; theta) into out (no allocation; hot-loop form).
void add_phi(const EstimatingFunction& ef, double y, const double* x, const double* theta, double* out);

/// Adds the analytic Jacobian at (y, x, theta) into out.
void add_jacobian(const EstimatingFunction& ef, double y, const double* x, const double* theta, Mat& out);

enum class Outcome { y, yhat };
enum class Rows { labeled, unlabeled, all };

struct ZEstimate {
    Vec theta;
    bool converged = false;
    int iterations = 0;
};

/// Root of the summed estimating equation over explicit (outcome, x) rows.
/// Mean family returns the sample mean, linear solves the normal equations,
/// logistic runs Newton from zero with step-halving on ||sum phi||_inf.
ZEstimate solve_z(const EstimatingFunction& ef, const Vec& outcome, const Mat& x);

/// Same, over a Dataset subset. Outcome::y requires Rows::labeled.
ZEstimate solve_z(const EstimatingFunction& ef, const Dataset& ds, Outcome oc, Rows rows);

/// ||m^{-1} sum phi(theta)||_inf over the given subset; test/diagnostic hook.
double mean_equation_norm(const EstimatingFunction& ef, const Dataset& ds, Outcome oc, Rows rows,
                          const Vec& theta);

} // namespace pbinfer

#endif
