#include "pbinfer/inference.hpp"

#include <cmath>

namespace pbinfer {

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal_quantile: p must be in (0,1)");
    // Acklam's rational approximation.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > phigh) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

Mat if_covariance(const PBFit& fit) {
    if (fit.if_rows.empty()) throw EmptyInfluence("if_covariance: fit has no influence rows");
    const std::size_t d = fit.if_rows.cols;
    Mat cov(d, d);
    for (std::size_t i = 0; i < fit.if_rows.rows; ++i)
        add_outer(cov, 1.0, fit.if_rows.row(i), fit.if_rows.row(i));
    cov = (1.0 / static_cast<double>(fit.if_rows.rows)) * cov;
    return sym(cov);
}

void attach_inference(PBFit& fit, double level) {
    fit.cov = if_covariance(fit);
    if (!is_finite(fit.cov)) throw NonFiniteValue("attach_inference: non-finite covariance");
    const std::size_t d = fit.theta.size();
    const double n = static_cast<double>(fit.n);
    const double z = normal_quantile(0.5 * (1.0 + level));
    fit.se.resize(d);
    fit.ci_lower.resize(d);
    fit.ci_upper.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        fit.se[j] = std::sqrt(std::max(0.0, fit.cov(j, j)) / n);
        fit.ci_lower[j] = fit.theta[j] - z * fit.se[j];
        fit.ci_upper[j] = fit.theta[j] + z * fit.se[j];
    }
}

Mat delta_avar_ppia(const MomentSet& m) {
    const double f = 1.0 / m.pi_hat - 1.0;
    if (m.family == Family::logistic) {
        Mat t = 2.0 * matmul(matmul(m.A, m.C12), m.B) - matmul(matmul(m.B, m.C22), m.B);
        return f * sym(t);
    }
    Mat t = 2.0 * matmul(matmul(m.A, m.C12), m.A) - matmul(matmul(m.A, m.C22), m.A);
    return f * sym(t);
}

Mat delta_avar_cc(const MomentSet& m, double ridge) {
    if (trace(m.C22) <= 1e-12 * trace(m.C11)) return Mat(m.dim, m.dim); // no augmentation signal
    Mat c22 = m.C22;
    if (ridge > 0.0)
        for (std::size_t i = 0; i < c22.rows; ++i) c22(i, i) += ridge;
    Mat c22_inv = spd_inverse_ridge_retry(c22);
    Mat ac12 = matmul(m.A, m.C12);
    Mat out = matmul(matmul(ac12, c22_inv), transpose(ac12));
    return (1.0 / m.pi_hat - 1.0) * sym(out);
}

Mat avar_of_weight(const MomentSet& m, const Mat& w) {
    if (w.rows != m.dim || w.cols != m.dim)
        throw DimensionMismatch("avar_of_weight: weight dimension mismatch");
    const double f = 1.0 / m.pi_hat - 1.0;
    Mat base = (1.0 / m.pi_hat) * matmul(matmul(m.A, m.C11), m.A);
    Mat wb = matmul(w, m.B);
    Mat cross = matmul(matmul(m.A, m.C12), transpose(wb));
    Mat quad = matmul(matmul(wb, m.C22), transpose(wb));
    return base - f * (2.0 * sym(cross) - quad);
}

HomoskedasticSummary homoskedastic_summary(const Dataset& ds, const EstimatingFunction& ef,
                                           const CoreFits& core) {
    if (ef.family == Family::logistic)
        throw FamilyUnsupported("homoskedastic_summary: mean or linear family only");
    const std::size_t d = ef.dim;
    double s_yy = 0.0, s_hh = 0.0, s_yh = 0.0;
    for (std::uint32_t i : ds.labeled_idx) {
        const double* xi = ds.x.row(i);
        double fy = 0.0, fh = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            fy += xi[j] * core.beta_lab.theta[j];
            fh += xi[j] * core.gamma_lab.theta[j];
        }
        double ry = ds.y_at(i) - fy;
        double rh = ds.yhat[i] - fh;
        s_yy += ry * ry;
        s_hh += rh * rh;
        s_yh += ry * rh;
    }
    const double n_lab = static_cast<double>(ds.n_lab());
    HomoskedasticSummary out;
    out.sigma_y = std::sqrt(s_yy / n_lab);
    out.sigma_yhat = std::sqrt(s_hh / n_lab);
    if (out.sigma_y <= 0.0 || out.sigma_yhat <= 0.0)
        throw ZeroVariance("homoskedastic_summary: degenerate residuals");
    out.rho = std::clamp(s_yh / std::sqrt(s_yy * s_hh), -1.0, 1.0);
    out.threshold = 0.5 * out.sigma_yhat / out.sigma_y;
    return out;
}

AvarReport avar_report(Method which, const MomentSet& m) {
    if (which != Method::ppi_a && which != Method::cc)
        throw InvalidArgument("avar_report: only ppi_a and cc are reported against lab");
    AvarReport rep;
    rep.method = which;
    rep.delta_vs_lab = (which == Method::ppi_a) ? delta_avar_ppia(m) : delta_avar_cc(m);
    Mat lab = (1.0 / m.pi_hat) * matmul(matmul(m.A, m.C11), m.A);
    rep.avar = lab - rep.delta_vs_lab;
    rep.efficient_vs_lab.resize(m.dim);
    for (std::size_t j = 0; j < m.dim; ++j)
        rep.efficient_vs_lab[j] = rep.delta_vs_lab(j, j) > 0.0 ? 1 : 0;
    return rep;
}

} // namespace pbinfer
