#include "pbinfer/estimating.hpp"

#include <cmath>
#include <string>

namespace pbinfer {

double expit(double t) {
    if (t >= 0.0) {
        double e = std::exp(-t);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(t);
    return e / (1.0 + e);
}

void add_phi(const EstimatingFunction& ef, double y, const double* x, const double* theta, double* out) {
    switch (ef.family) {
        case Family::mean:
            out[0] += y - theta[0];
            return;
        case Family::linear: {
            double r = y;
            for (std::size_t j = 0; j < ef.dim; ++j) r -= x[j] * theta[j];
            for (std::size_t j = 0; j < ef.dim; ++j) out[j] += x[j] * r;
            return;
        }
        case Family::logistic: {
            double lin = 0.0;
            for (std::size_t j = 0; j < ef.dim; ++j) lin += x[j] * theta[j];
            double r = y - expit(lin);
            for (std::size_t j = 0; j < ef.dim; ++j) out[j] += x[j] * r;
            return;
        }
    }
}

void add_jacobian(const EstimatingFunction& ef, double y, const double* x, const double* theta, Mat& out) {
    (void)y;
    switch (ef.family) {
        case Family::mean:
            out(0, 0) += -1.0;
            return;
        case Family::linear:
            add_outer(out, -1.0, x, x);
            return;
        case Family::logistic: {
            double lin = 0.0;
            for (std::size_t j = 0; j < ef.dim; ++j) lin += x[j] * theta[j];
            double p = expit(lin);
            add_outer(out, -p * (1.0 - p), x, x);
            return;
        }
    }
}

namespace {

void check_dims(const EstimatingFunction& ef, std::span<const double> x, std::span<const double> theta) {
    if (theta.size() != ef.dim) throw DimensionMismatch("phi: theta dimension mismatch");
    if (ef.family != Family::mean && x.size() != ef.dim)
        throw DimensionMismatch("phi: x dimension mismatch");
}

} // namespace

Vec phi(const EstimatingFunction& ef, double y, std::span<const double> x, std::span<const double> theta) {
    check_dims(ef, x, theta);
    Vec out(ef.dim, 0.0);
    add_phi(ef, y, x.data(), theta.data(), out.data());
    return out;
}

Mat jacobian(const EstimatingFunction& ef, double y, std::span<const double> x, std::span<const double> theta) {
    check_dims(ef, x, theta);
    Mat out(ef.dim, ef.dim);
    add_jacobian(ef, y, x.data(), theta.data(), out);
    return out;
}

namespace {

// Row subset view over a full design/outcome; idx == nullptr means all rows.
struct RowSource {
    const Mat* x = nullptr;
    const double* outcome = nullptr;
    const std::uint32_t* idx = nullptr;
    std::size_t m = 0;

    std::size_t row(std::size_t k) const { return idx ? idx[k] : k; }
};

ZEstimate solve_mean(const RowSource& rs) {
    double s = 0.0;
    for (std::size_t k = 0; k < rs.m; ++k) s += rs.outcome[rs.row(k)];
    return {{s / static_cast<double>(rs.m)}, true, 0};
}

ZEstimate solve_linear_family(const RowSource& rs, std::size_t dim) {
    Mat s(dim, dim);
    Vec b(dim, 0.0);
    for (std::size_t k = 0; k < rs.m; ++k) {
        std::size_t i = rs.row(k);
        const double* xi = rs.x->row(i);
        add_outer(s, 1.0, xi, xi);
        double yi = rs.outcome[i];
        for (std::size_t j = 0; j < dim; ++j) b[j] += xi[j] * yi;
    }
    return {solve_linear(s, b), true, 1};
}

struct LogisticEval {
    Vec g;          // sum of phi
    Mat j;          // sum of jacobians
    double max_lin; // max |x' theta| over rows
};

LogisticEval eval_logistic(const RowSource& rs, std::size_t dim, const Vec& theta) {
    LogisticEval e{Vec(dim, 0.0), Mat(dim, dim), 0.0};
    for (std::size_t k = 0; k < rs.m; ++k) {
        std::size_t i = rs.row(k);
        const double* xi = rs.x->row(i);
        double lin = 0.0;
        for (std::size_t j = 0; j < dim; ++j) lin += xi[j] * theta[j];
        e.max_lin = std::max(e.max_lin, std::abs(lin));
        double p = expit(lin);
        double r = rs.outcome[i] - p;
        for (std::size_t j = 0; j < dim; ++j) e.g[j] += xi[j] * r;
        add_outer(e.j, -p * (1.0 - p), xi, xi);
    }
    return e;
}

ZEstimate solve_logistic(const RowSource& rs, std::size_t dim) {
    double lo = rs.outcome[rs.row(0)], hi = lo;
    for (std::size_t k = 1; k < rs.m; ++k) {
        double v = rs.outcome[rs.row(k)];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) throw SeparationDetected("solve_z: logistic outcomes all identical");

    const double m = static_cast<double>(rs.m);
    Vec theta(dim, 0.0);
    LogisticEval cur = eval_logistic(rs, dim, theta);
    if (norm_inf(cur.g) / m <= 1e-10) return {theta, true, 0};

    for (int iter = 1; iter <= 100; ++iter) {
        Mat neg_j = -1.0 * cur.j; // positive definite for logistic
        Vec step = solve_linear(neg_j, cur.g);

        double t = 1.0;
        bool accepted = false;
        Vec cand(dim);
        LogisticEval next;
        for (int halving = 0; halving <= 20; ++halving) {
            for (std::size_t j = 0; j < dim; ++j) cand[j] = theta[j] + t * step[j];
            next = eval_logistic(rs, dim, cand);
            if (norm_inf(next.g) < norm_inf(cur.g)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) throw DidNotConverge("solve_z: logistic step-halving exhausted");
        if (next.max_lin > 30.0)
            throw SeparationDetected("solve_z: |x' theta| exceeded 30 during logistic iteration");

        double step_norm = 0.0;
        for (std::size_t j = 0; j < dim; ++j) step_norm = std::max(step_norm, std::abs(t * step[j]));
        theta = cand;
        cur = next;
        if (norm_inf(cur.g) / m <= 1e-10 || step_norm <= 1e-12) return {theta, true, iter};
    }
    throw DidNotConverge("solve_z: logistic Newton did not converge in 100 iterations");
}

ZEstimate solve_rows(const EstimatingFunction& ef, const RowSource& rs) {
    if (rs.m < ef.dim) throw InsufficientLabeled("solve_z: fewer rows than parameters");
    switch (ef.family) {
        case Family::mean: return solve_mean(rs);
        case Family::linear: return solve_linear_family(rs, ef.dim);
        case Family::logistic: return solve_logistic(rs, ef.dim);
    }
    throw InvalidArgument("solve_z: unknown family");
}

RowSource dataset_rows(const EstimatingFunction& ef, const Dataset& ds, Outcome oc, Rows rows) {
    if (ef.family != Family::mean && ef.dim != ds.dim())
        throw DimensionMismatch("solve_z: dataset dimension mismatch");
    if (oc == Outcome::y && rows != Rows::labeled)
        throw InvalidArgument("solve_z: true outcome is only available on labeled rows");
    RowSource rs;
    rs.x = &ds.x;
    rs.outcome = (oc == Outcome::y) ? ds.y.data() : ds.yhat.data();
    switch (rows) {
        case Rows::labeled:
            rs.idx = ds.labeled_idx.data();
            rs.m = ds.labeled_idx.size();
            break;
        case Rows::unlabeled:
            rs.idx = ds.unlabeled_idx.data();
            rs.m = ds.unlabeled_idx.size();
            break;
        case Rows::all:
            rs.idx = nullptr;
            rs.m = ds.n;
            break;
    }
    return rs;
}

} // namespace

ZEstimate solve_z(const EstimatingFunction& ef, const Vec& outcome, const Mat& x) {
    if (ef.family != Family::mean) {
        if (x.cols != ef.dim) throw DimensionMismatch("solve_z: x dimension mismatch");
        if (x.rows != outcome.size()) throw DimensionMismatch("solve_z: row count mismatch");
    }
    if (!is_finite(outcome)) throw NonFiniteValue("solve_z: non-finite outcome");
    RowSource rs{&x, outcome.data(), nullptr, outcome.size()};
    return solve_rows(ef, rs);
}

ZEstimate solve_z(const EstimatingFunction& ef, const Dataset& ds, Outcome oc, Rows rows) {
    return solve_rows(ef, dataset_rows(ef, ds, oc, rows));
}

double mean_equation_norm(const EstimatingFunction& ef, const Dataset& ds, Outcome oc, Rows rows,
                          const Vec& theta) {
    RowSource rs = dataset_rows(ef, ds, oc, rows);
    Vec g(ef.dim, 0.0);
    for (std::size_t k = 0; k < rs.m; ++k) {
        std::size_t i = rs.row(k);
        add_phi(ef, rs.outcome[i], rs.x->row(i), theta.data(), g.data());
    }
    for (double& v : g) v /= static_cast<double>(rs.m);
    return norm_inf(g);
}

} // namespace pbinfer
