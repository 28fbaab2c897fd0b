#include "pbinfer/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace pbinfer {

Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat diagm(const Vec& d) {
    Mat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Mat transpose(const Mat& m) {
    Mat t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols != b.rows) throw DimensionMismatch("matmul: inner dimensions disagree");
    Mat c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            double* crow = c.row(i);
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Vec matvec(const Mat& a, const Vec& x) {
    if (a.cols != x.size()) throw DimensionMismatch("matvec: dimensions disagree");
    Vec y(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        const double* arow = a.row(i);
        for (std::size_t j = 0; j < a.cols; ++j) s += arow[j] * x[j];
        y[i] = s;
    }
    return y;
}

Mat operator+(const Mat& a, const Mat& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw DimensionMismatch("mat add: shape mismatch");
    Mat c = a;
    for (std::size_t i = 0; i < c.a.size(); ++i) c.a[i] += b.a[i];
    return c;
}

Mat operator-(const Mat& a, const Mat& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw DimensionMismatch("mat sub: shape mismatch");
    Mat c = a;
    for (std::size_t i = 0; i < c.a.size(); ++i) c.a[i] -= b.a[i];
    return c;
}

Mat operator*(double s, const Mat& m) {
    Mat c = m;
    for (double& v : c.a) v *= s;
    return c;
}

Mat sym(const Mat& m) {
    if (m.rows != m.cols) throw DimensionMismatch("sym: matrix not square");
    Mat s(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

double trace(const Mat& m) {
    if (m.rows != m.cols) throw DimensionMismatch("trace: matrix not square");
    double t = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) t += m(i, i);
    return t;
}

double max_abs(const Mat& m) {
    double v = 0.0;
    for (double x : m.a) v = std::max(v, std::abs(x));
    return v;
}

bool is_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool is_finite(const Mat& m) {
    for (double x : m.a)
        if (!std::isfinite(x)) return false;
    return true;
}

void add_outer(Mat& m, double s, const double* v, const double* w) {
    for (std::size_t i = 0; i < m.rows; ++i) {
        double sv = s * v[i];
        double* row = m.row(i);
        for (std::size_t j = 0; j < m.cols; ++j) row[j] += sv * w[j];
    }
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_inf(const Vec& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

namespace {

struct LuFactors {
    Mat lu;
    std::vector<std::size_t> piv;
};

LuFactors lu_factor(const Mat& a) {
    if (a.rows != a.cols) throw DimensionMismatch("lu_factor: matrix not square");
    if (!is_finite(a)) throw NonFiniteValue("lu_factor: non-finite entries");
    const std::size_t n = a.rows;
    const double tol = 1e-12 * max_abs(a);
    LuFactors f{a, std::vector<std::size_t>(n)};
    Mat& m = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(m(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = std::abs(m(i, k));
            if (v > best) { best = v; p = i; }
        }
        if (best <= tol || best == 0.0)
            throw SingularMatrix("lu_factor: pivot below 1e-12 * max|a|");
        f.piv[k] = p;
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
        double inv_piv = 1.0 / m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            double l = m(i, k) * inv_piv;
            m(i, k) = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
        }
    }
    return f;
}

Vec lu_solve(const LuFactors& f, Vec b) {
    const std::size_t n = f.lu.rows;
    for (std::size_t k = 0; k < n; ++k)
        if (f.piv[k] != k) std::swap(b[k], b[f.piv[k]]);
    for (std::size_t i = 1; i < n; ++i) {
        double s = b[i];
        for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * b[j];
        b[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * b[j];
        b[i] = s / f.lu(i, i);
    }
    return b;
}

// Lower Cholesky factor; throws SingularMatrix on a non-positive pivot.
Mat cholesky_lower(const Mat& a) {
    if (a.rows != a.cols) throw DimensionMismatch("cholesky: matrix not square");
    const std::size_t n = a.rows;
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
    const double tol = 1e-12 * max_diag;
    Mat l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= tol || s <= 0.0) throw SingularMatrix("cholesky: non-positive pivot");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

} // namespace

Vec solve_linear(const Mat& a, const Vec& b) {
    if (a.rows != b.size()) throw DimensionMismatch("solve_linear: rhs length mismatch");
    if (!is_finite(b)) throw NonFiniteValue("solve_linear: non-finite rhs");
    return lu_solve(lu_factor(a), b);
}

Mat inverse(const Mat& a) {
    LuFactors f = lu_factor(a);
    const std::size_t n = a.rows;
    Mat inv(n, n);
    Vec e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        Vec col = lu_solve(f, e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

Mat spd_inverse(const Mat& a) {
    Mat l;
    try {
        l = cholesky_lower(a);
    } catch (const SingularMatrix&) {
        return inverse(a); // LU fallback; rethrows SingularMatrix if truly rank-deficient
    }
    // Invert L, then inv(a) = L^{-T} L^{-1}.
    const std::size_t n = a.rows;
    Mat linv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        linv(j, j) = 1.0 / l(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = j; k < i; ++k) s -= l(i, k) * linv(k, j);
            linv(i, j) = s / l(i, i);
        }
    }
    Mat inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = i; k < n; ++k) s += linv(k, i) * linv(k, j);
            inv(i, j) = s;
            inv(j, i) = s;
        }
    return inv;
}

Mat spd_inverse_ridge_retry(const Mat& a) {
    try {
        return spd_inverse(a);
    } catch (const SingularMatrix&) {
        double r = 1e-8 * trace(a) / static_cast<double>(a.rows);
        if (!(r > 0.0)) r = 1e-12;
        Mat b = a;
        for (std::size_t i = 0; i < b.rows; ++i) b(i, i) += r;
        return spd_inverse(b);
    }
}

Mat pseudo_inverse(const Mat& a, double ridge) {
    if (!(ridge >= 0.0)) throw InvalidArgument("pseudo_inverse: ridge must be >= 0");
    if (!is_finite(a)) throw NonFiniteValue("pseudo_inverse: non-finite entries");
    if (ridge == 0.0 && a.rows == a.cols) return inverse(a);
    Mat at = transpose(a);
    Mat g = matmul(at, a);
    for (std::size_t i = 0; i < g.rows; ++i) g(i, i) += ridge;
    LuFactors f = lu_factor(g);
    Mat out(a.cols, a.rows);
    Vec rhs(a.cols);
    for (std::size_t j = 0; j < a.rows; ++j) {
        for (std::size_t i = 0; i < a.cols; ++i) rhs[i] = at(i, j);
        Vec col = lu_solve(f, rhs);
        for (std::size_t i = 0; i < a.cols; ++i) out(i, j) = col[i];
    }
    return out;
}

Mat finite_diff_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
    if (!(h >= 1e-8 && h <= 1e-3)) throw InvalidArgument("finite_diff_jacobian: h outside [1e-8, 1e-3]");
    const std::size_t n = x.size();
    Mat j;
    Vec xp = x, xm = x;
    for (std::size_t k = 0; k < n; ++k) {
        xp[k] = x[k] + h;
        xm[k] = x[k] - h;
        Vec fp = f(xp);
        Vec fm = f(xm);
        xp[k] = x[k];
        xm[k] = x[k];
        if (!is_finite(fp) || !is_finite(fm))
            throw NonFiniteValue("finite_diff_jacobian: non-finite function value");
        if (j.empty()) j = Mat(fp.size(), n);
        if (fp.size() != j.rows || fm.size() != j.rows)
            throw DimensionMismatch("finite_diff_jacobian: inconsistent output dimension");
        for (std::size_t i = 0; i < j.rows; ++i) j(i, k) = (fp[i] - fm[i]) / (2.0 * h);
    }
    return j;
}

Vec sym_eigenvalues(const Mat& m) {
    if (m.rows != m.cols) throw DimensionMismatch("sym_eigenvalues: matrix not square");
    Mat a = sym(m);
    const std::size_t n = a.rows;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        double scale = max_abs(a);
        if (off <= 1e-30 * (1.0 + scale * scale)) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (apq == 0.0) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Vec ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace pbinfer
