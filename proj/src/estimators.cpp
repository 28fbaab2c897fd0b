#include "pbinfer/estimators.hpp"

#include <cmath>
#include <cstring>

#include "pbinfer/inference.hpp"

namespace pbinfer {

const char* method_name(Method m) {
    switch (m) {
        case Method::lab: return "lab";
        case Method::naive: return "naive";
        case Method::ppi: return "ppi";
        case Method::ppi_a: return "ppi_a";
        case Method::cc: return "cc";
        case Method::ppipp: return "ppipp";
        case Method::pspa: return "pspa";
        case Method::sur: return "sur";
        case Method::pop: return "pop";
    }
    return "?";
}

Method method_from_name(const std::string& s) {
    for (Method m : {Method::lab, Method::naive, Method::ppi, Method::ppi_a, Method::cc,
                     Method::ppipp, Method::pspa, Method::sur, Method::pop})
        if (s == method_name(m)) return m;
    throw InvalidArgument("unknown method: " + s);
}

bool method_supported(Method m, Family f) {
    if (m == Method::sur || m == Method::pop) return f == Family::linear;
    return true;
}

WeightSpec cc_weight(const MomentSet& m, double ridge) {
    // A numerically exact fit of yhat by x leaves no augmentation signal:
    // the projection coefficient is 0/0, and inverting roundoff-scale C22
    // would amplify noise. The weight is zero there.
    if (trace(m.C22) <= 1e-12 * trace(m.C11)) return {WeightKind::cc_w, Mat(m.dim, m.dim)};
    Mat c22 = m.C22;
    if (ridge > 0.0)
        for (std::size_t i = 0; i < c22.rows; ++i) c22(i, i) += ridge;
    Mat c22_inv = spd_inverse_ridge_retry(c22);
    // W = A C12 C22^{-1} B^{-1}; jac_yhat is B^{-1}.
    Mat w = matmul(matmul(matmul(m.A, m.C12), c22_inv), m.jac_yhat);
    return {WeightKind::cc_w, std::move(w)};
}

WeightSpec ppipp_weight(const MomentSet& m) {
    double num = trace(matmul(matmul(m.A, m.C12), m.A));
    double den = trace(matmul(matmul(m.A, m.C22), m.A));
    double lambda = 0.0;
    if (den >= 1e-14) lambda = std::clamp(num / den, 0.0, 1.0);
    return {WeightKind::ppipp_w, lambda * identity(m.dim)};
}

WeightSpec pspa_weight(const MomentSet& m) {
    Mat num = sym(matmul(matmul(m.A, m.C12), m.A));
    Mat den = matmul(matmul(m.A, m.C22), m.A);
    Mat w(m.dim, m.dim);
    for (std::size_t j = 0; j < m.dim; ++j) {
        double d = den(j, j);
        if (std::abs(d) < 1e-14) continue; // zero denominator -> entry 0
        w(j, j) = std::clamp(num(j, j) / d, 0.0, 1.0);
    }
    return {WeightKind::pspa_w, std::move(w)};
}

namespace {

// Labeled-row residuals against beta_lab and gamma_lab (linear family).
struct ResidualPair {
    double s_yy = 0.0, s_hh = 0.0, s_yh = 0.0; // raw cross products
};

ResidualPair labeled_residual_moments(const Dataset& ds, const CoreFits& core) {
    ResidualPair r;
    const std::size_t d = ds.dim();
    for (std::uint32_t i : ds.labeled_idx) {
        const double* xi = ds.x.row(i);
        double fy = 0.0, fh = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            fy += xi[j] * core.beta_lab.theta[j];
            fh += xi[j] * core.gamma_lab.theta[j];
        }
        double ry = ds.y_at(i) - fy;
        double rh = ds.yhat[i] - fh;
        r.s_yy += ry * ry;
        r.s_hh += rh * rh;
        r.s_yh += ry * rh;
    }
    return r;
}

} // namespace

WeightSpec sur_weight(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core) {
    if (ef.family != Family::linear)
        throw FamilyUnsupported("sur_weight: linear family only");
    ResidualPair r = labeled_residual_moments(ds, core);
    double w = (r.s_hh < 1e-14) ? 0.0 : r.s_yh / r.s_hh;
    return {WeightKind::sur_w, w * identity(ef.dim)};
}

WeightSpec pop_weight(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core) {
    if (ef.family != Family::linear)
        throw FamilyUnsupported("pop_weight: linear family only");
    ResidualPair r = labeled_residual_moments(ds, core);
    double denom = std::sqrt(r.s_yy * r.s_hh);
    double corr = (denom < 1e-14) ? 0.0 : r.s_yh / denom;
    double w = (static_cast<double>(ds.n_unlab()) / static_cast<double>(ds.n)) * corr;
    return {WeightKind::pop_w, w * identity(ef.dim)};
}

namespace {

Vec augmented_theta(const Vec& base, const Mat& w, const Vec& g_lab, const Vec& g_ref) {
    Vec diff(g_lab.size());
    for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = g_lab[j] - g_ref[j];
    Vec adj = matvec(w, diff);
    Vec out = base;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] -= adj[j];
    return out;
}

void finalize(PBFit& fit, const FitOptions& opts) {
    if (!is_finite(fit.theta)) throw NonFiniteValue("estimate: non-finite point estimate");
    if (!opts.point_only) attach_inference(fit, opts.ci_level);
}

// IF rows of the one-sample weighted family:
//   labeled:   A phi_Y / pi - (1/pi - 1) wB phi_Yhat(gamma_all)
//   unlabeled: wB phi_Yhat(gamma_all)
// With w = I this is the ppi_a expansion; with w = W^CC the wB factor
// reduces to A C12 C22^{-1}, the projection weight of the optimal
// augmentation.
Mat weighted_if_rows(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core,
                     const MomentSet& m, const Mat& w) {
    const std::size_t d = ef.dim;
    const double pi = ds.pi_hat();
    Mat wb = matmul(w, m.B);
    Mat rows(ds.n, d);
    Vec phi_buf(d), tmp(d);
    const double* beta = core.beta_lab.theta.data();
    const double* gamma = core.gamma_all.theta.data();
    for (std::size_t i = 0; i < ds.n; ++i) {
        const double* xi = ds.x.row(i);
        double* out = rows.row(i);
        std::fill(phi_buf.begin(), phi_buf.end(), 0.0);
        add_phi(ef, ds.yhat[i], xi, gamma, phi_buf.data());
        double scale = ds.labeled[i] ? -(1.0 / pi - 1.0) : 1.0;
        for (std::size_t r = 0; r < d; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += wb(r, c) * phi_buf[c];
            out[r] = scale * s;
        }
        if (ds.labeled[i]) {
            std::fill(phi_buf.begin(), phi_buf.end(), 0.0);
            add_phi(ef, ds.y_at(i), xi, beta, phi_buf.data());
            for (std::size_t r = 0; r < d; ++r) {
                double s = 0.0;
                for (std::size_t c = 0; c < d; ++c) s += m.A(r, c) * phi_buf[c];
                out[r] += s / pi;
            }
        }
    }
    return rows;
}

// IF rows of the two-sample estimators (ppi, pop), which mix disjoint
// labeled/unlabeled averages:
//   labeled:   [A phi_Y(beta_lab) - w B phi_Yhat(gamma_lab)] / pi
//   unlabeled: -w B phi_Yhat(gamma_unlab) / (1 - pi)
Mat two_sample_if_rows(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core,
                       const MomentSet& m, const Mat& w) {
    const std::size_t d = ef.dim;
    const double pi = ds.pi_hat();
    Mat wb = matmul(w, m.B);
    Mat rows(ds.n, d);
    Vec phi_buf(d);
    const double* beta = core.beta_lab.theta.data();
    const double* g_lab = core.gamma_lab.theta.data();
    const double* g_unlab = core.gamma_unlab.theta.data();
    for (std::size_t i = 0; i < ds.n; ++i) {
        const double* xi = ds.x.row(i);
        double* out = rows.row(i);
        if (ds.labeled[i]) {
            std::fill(phi_buf.begin(), phi_buf.end(), 0.0);
            add_phi(ef, ds.y_at(i), xi, beta, phi_buf.data());
            for (std::size_t r = 0; r < d; ++r) {
                double s = 0.0;
                for (std::size_t c = 0; c < d; ++c) s += m.A(r, c) * phi_buf[c];
                out[r] = s;
            }
            std::fill(phi_buf.begin(), phi_buf.end(), 0.0);
            add_phi(ef, ds.yhat[i], xi, g_lab, phi_buf.data());
            for (std::size_t r = 0; r < d; ++r) {
                double s = 0.0;
                for (std::size_t c = 0; c < d; ++c) s += wb(r, c) * phi_buf[c];
                out[r] = (out[r] - s) / pi;
            }
        } else {
            std::fill(phi_buf.begin(), phi_buf.end(), 0.0);
            add_phi(ef, ds.yhat[i], xi, g_unlab, phi_buf.data());
            for (std::size_t r = 0; r < d; ++r) {
                double s = 0.0;
                for (std::size_t c = 0; c < d; ++c) s += wb(r, c) * phi_buf[c];
                out[r] = -s / (1.0 - pi);
            }
        }
    }
    return rows;
}

void require_unlab(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core,
                   const char* who) {
    if (ds.n_unlab() < ef.dim || !core.has_unlab)
        throw InsufficientUnlabeled(std::string(who) + ": needs at least dim unlabeled rows");
}

PBFit make_two_sample(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core,
                      const MomentSet& m, Method label, const WeightSpec* weight,
                      const FitOptions& opts) {
    require_unlab(ds, ef, core, method_name(label));
    Mat w = weight ? weight->w : identity(ef.dim);
    PBFit fit;
    fit.method = label;
    fit.n = ds.n;
    fit.theta = augmented_theta(core.beta_lab.theta, w, core.gamma_lab.theta, core.gamma_unlab.theta);
    if (weight) fit.weight = *weight;
    if (!opts.point_only) fit.if_rows = two_sample_if_rows(ds, ef, core, m, w);
    finalize(fit, opts);
    return fit;
}

} // namespace

PBFit estimate_weighted(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core,
                        const MomentSet& m, WeightSpec weight, Method label,
                        const FitOptions& opts) {
    if (weight.w.rows != ef.dim || weight.w.cols != ef.dim)
        throw DimensionMismatch("estimate_weighted: weight dimension mismatch");
    PBFit fit;
    fit.method = label;
    fit.n = ds.n;
    fit.theta = augmented_theta(core.beta_lab.theta, weight.w, core.gamma_lab.theta,
                                core.gamma_all.theta);
    if (!opts.point_only) fit.if_rows = weighted_if_rows(ds, ef, core, m, weight.w);
    fit.weight = std::move(weight);
    finalize(fit, opts);
    return fit;
}

namespace {

PBFit fit_one(const Dataset& ds, const EstimatingFunction& ef, const CoreFits& core,
              const MomentSet& m, Method method, const FitOptions& opts) {
    if (!method_supported(method, ef.family))
        throw FamilyUnsupported(std::string(method_name(method)) + ": unsupported for family " +
                                family_name(ef.family));
    switch (method) {
        case Method::lab: {
            PBFit fit;
            fit.method = Method::lab;
            fit.n = ds.n;
            fit.theta = core.beta_lab.theta;
            if (!opts.point_only) {
                // IF = A phi_Y R / pi; zero on unlabeled rows.
                Mat rows(ds.n, ef.dim);
                Vec phi_buf(ef.dim);
                const double pi = ds.pi_hat();
                for (std::uint32_t i : ds.labeled_idx) {
                    std::fill(phi_buf.begin(), phi_buf.end(), 0.0);
                    add_phi(ef, ds.y_at(i), ds.x.row(i), core.beta_lab.theta.data(), phi_buf.data());
                    double* out = rows.row(i);
                    for (std::size_t r = 0; r < ef.dim; ++r) {
                        double s = 0.0;
                        for (std::size_t c = 0; c < ef.dim; ++c) s += m.A(r, c) * phi_buf[c];
                        out[r] = s / pi;
                    }
                }
                fit.if_rows = std::move(rows);
            }
            finalize(fit, opts);
            return fit;
        }
        case Method::naive: {
            PBFit fit;
            fit.method = Method::naive;
            fit.n = ds.n;
            fit.theta = core.gamma_all.theta;
            if (!opts.point_only) {
                Mat rows(ds.n, ef.dim);
                Vec phi_buf(ef.dim);
                for (std::size_t i = 0; i < ds.n; ++i) {
                    std::fill(phi_buf.begin(), phi_buf.end(), 0.0);
                    add_phi(ef, ds.yhat[i], ds.x.row(i), core.gamma_all.theta.data(), phi_buf.data());
                    double* out = rows.row(i);
                    for (std::size_t r = 0; r < ef.dim; ++r) {
                        double s = 0.0;
                        for (std::size_t c = 0; c < ef.dim; ++c) s += m.B(r, c) * phi_buf[c];
                        out[r] = s;
                    }
                }
                fit.if_rows = std::move(rows);
            }
            finalize(fit, opts);
            return fit;
        }
        case Method::ppi:
            return make_two_sample(ds, ef, core, m, Method::ppi, nullptr, opts);
        case Method::pop: {
            WeightSpec w = pop_weight(ds, ef, core);
            return make_two_sample(ds, ef, core, m, Method::pop, &w, opts);
        }
        case Method::ppi_a:
            return estimate_weighted(ds, ef, core, m, {WeightKind::identity_w, identity(ef.dim)},
                                     Method::ppi_a, opts);
        case Method::cc:
            return estimate_weighted(ds, ef, core, m, cc_weight(m, opts.ridge), Method::cc, opts);
        case Method::ppipp:
            return estimate_weighted(ds, ef, core, m, ppipp_weight(m), Method::ppipp, opts);
        case Method::pspa:
            return estimate_weighted(ds, ef, core, m, pspa_weight(m), Method::pspa, opts);
        case Method::sur:
            return estimate_weighted(ds, ef, core, m, sur_weight(ds, ef, core), Method::sur, opts);
    }
    throw InvalidArgument("fit_one: unknown method");
}

bool needs_unlab(const std::vector<Method>& methods) {
    for (Method m : methods)
        if (m == Method::ppi || m == Method::pop) return true;
    return false;
}

} // namespace

std::vector<PBFit> fit_methods(const Dataset& ds, const EstimatingFunction& ef,
                               const std::vector<Method>& methods, const FitOptions& opts) {
    CoreFits core = solve_core(ds, ef, needs_unlab(methods));
    MomentSet m = estimate_moments(ds, ef, core, opts.ridge);
    std::vector<PBFit> fits;
    fits.reserve(methods.size());
    for (Method method : methods) fits.push_back(fit_one(ds, ef, core, m, method, opts));
    return fits;
}

#define PBINFER_DEFINE_SINGLE(name, method_id)                                                  \
    PBFit name(const Dataset& ds, const EstimatingFunction& ef, const FitOptions& opts) {       \
        return fit_methods(ds, ef, {method_id}, opts).front();                                  \
    }

PBINFER_DEFINE_SINGLE(estimate_lab, Method::lab)
PBINFER_DEFINE_SINGLE(estimate_naive, Method::naive)
PBINFER_DEFINE_SINGLE(estimate_ppi, Method::ppi)
PBINFER_DEFINE_SINGLE(estimate_ppi_a, Method::ppi_a)
PBINFER_DEFINE_SINGLE(estimate_cc, Method::cc)
PBINFER_DEFINE_SINGLE(estimate_ppipp, Method::ppipp)
PBINFER_DEFINE_SINGLE(estimate_pspa, Method::pspa)
PBINFER_DEFINE_SINGLE(estimate_sur, Method::sur)
PBINFER_DEFINE_SINGLE(estimate_pop, Method::pop)

#undef PBINFER_DEFINE_SINGLE

std::pair<double, double> control_variate_mean(const Vec& y, const Vec& z, double mu_z) {
    if (y.size() != z.size()) throw DimensionMismatch("control_variate_mean: length mismatch");
    if (y.size() < 2) throw InvalidArgument("control_variate_mean: need at least 2 pairs");
    const double n = static_cast<double>(y.size());
    double my = 0.0, mz = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        my += y[i];
        mz += z[i];
    }
    my /= n;
    mz /= n;
    double szz = 0.0, syz = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        szz += (z[i] - mz) * (z[i] - mz);
        syz += (y[i] - my) * (z[i] - mz);
    }
    if (szz <= 0.0) throw ZeroVariance("control_variate_mean: control variate is constant");
    double lambda = syz / szz;
    return {my - lambda * (mz - mu_z), lambda};
}

} // namespace pbinfer
