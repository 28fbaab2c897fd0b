#include "pbinfer/moments.hpp"

namespace pbinfer {

CoreFits solve_core(const Dataset& ds, const EstimatingFunction& ef, bool with_unlab) {
    CoreFits core;
    core.beta_lab = solve_z(ef, ds, Outcome::y, Rows::labeled);
    core.gamma_lab = solve_z(ef, ds, Outcome::yhat, Rows::labeled);
    core.gamma_all = solve_z(ef, ds, Outcome::yhat, Rows::all);
    if (with_unlab && ds.n_unlab() >= ef.dim) {
        core.gamma_unlab = solve_z(ef, ds, Outcome::yhat, Rows::unlabeled);
        core.has_unlab = true;
    }
    return core;
}

namespace {

// Inverts a negative-definite mean Jacobian: -spd_inverse(-j), with the
// ridge-retry policy and an optional caller ridge on top.
Mat invert_neg_def(const Mat& j, double ridge) {
    Mat neg = -1.0 * j;
    if (ridge > 0.0)
        for (std::size_t i = 0; i < neg.rows; ++i) neg(i, i) += ridge;
    return -1.0 * spd_inverse_ridge_retry(neg);
}

} // namespace

MomentSet estimate_moments(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core,
                           double ridge) {
    const std::size_t d = ef.dim;
    const double n_lab = static_cast<double>(ds.n_lab());
    const double n = static_cast<double>(ds.n);

    MomentSet m;
    m.family = ef.family;
    m.dim = d;
    m.pi_hat = ds.pi_hat();

    Mat jac_y(d, d), jac_yhat(d, d), c11(d, d), c12(d, d), c22(d, d);
    Vec phi_y(d), phi_yh(d);
    const double* beta = core.beta_lab.theta.data();
    const double* gamma = core.gamma_all.theta.data();

    for (std::uint32_t i : ds.labeled_idx) {
        const double* xi = ds.x.row(i);
        std::fill(phi_y.begin(), phi_y.end(), 0.0);
        std::fill(phi_yh.begin(), phi_yh.end(), 0.0);
        add_phi(ef, ds.y_at(i), xi, beta, phi_y.data());
        add_phi(ef, ds.yhat[i], xi, gamma, phi_yh.data());
        add_jacobian(ef, ds.y_at(i), xi, beta, jac_y);
        add_outer(c11, 1.0, phi_y.data(), phi_y.data());
        add_outer(c12, 1.0, phi_y.data(), phi_yh.data());
    }
    for (std::size_t i = 0; i < ds.n; ++i) {
        const double* xi = ds.x.row(i);
        std::fill(phi_yh.begin(), phi_yh.end(), 0.0);
        add_phi(ef, ds.yhat[i], xi, gamma, phi_yh.data());
        add_jacobian(ef, ds.yhat[i], xi, gamma, jac_yhat);
        add_outer(c22, 1.0, phi_yh.data(), phi_yh.data());
    }

    m.jac_y = (1.0 / n_lab) * jac_y;
    m.jac_yhat = (1.0 / n) * jac_yhat;
    m.C11 = (1.0 / n_lab) * c11;
    m.C12 = (1.0 / n_lab) * c12;
    m.C22 = (1.0 / n) * c22;
    m.A = invert_neg_def(m.jac_y, ridge);
    m.B = invert_neg_def(m.jac_yhat, ridge);
    if (ef.family != Family::logistic) {
        m.sigma_yyhat = m.C12;
        m.sigma_yhatyhat = m.C22;
    }
    return m;
}

} // namespace pbinfer
