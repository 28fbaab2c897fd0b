#ifndef PBINFER_NUMERICS_HPP
#define PBINFER_NUMERICS_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "pbinfer/errors.hpp"

namespace pbinfer {

using Vec = std::vector<double>;

// Dense row-major matrix. Everything in this project is tiny (p <= ~10),
// so robustness beats speed throughout.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    const double* row(std::size_t i) const { return a.data() + i * cols; }
    double* row(std::size_t i) { return a.data() + i * cols; }

    bool empty() const { return a.empty(); }
};

Mat identity(std::size_t n);
Mat diagm(const Vec& d);
Mat transpose(const Mat& m);
Mat matmul(const Mat& a, const Mat& b);
Vec matvec(const Mat& a, const Vec& x);

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& m);

/// (m + m^T)/2
Mat sym(const Mat& m);
double trace(const Mat& m);
double max_abs(const Mat& m);

bool is_finite(const Vec& v);
bool is_finite(const Mat& m);

/// Rank-one update m += s * v w^T (dims must agree).
void add_outer(Mat& m, double s, const double* v, const double* w);

double dot(const Vec& a, const Vec& b);
double norm_inf(const Vec& v);

/// Solves a x = b by partially pivoted LU. Throws SingularMatrix when a
/// pivot falls below 1e-12 * max|a|.
Vec solve_linear(const Mat& a, const Vec& b);

/// LU-based inverse of a square matrix.
Mat inverse(const Mat& a);

/// Cholesky-based inverse for symmetric positive-definite input, with an
/// LU fallback when the factorization breaks down.
Mat spd_inverse(const Mat& a);

/// Inverse of an SPD matrix with the ridge-retry policy: on SingularMatrix,
/// retries once with ridge 1e-8 * trace/dim added to the diagonal.
Mat spd_inverse_ridge_retry(const Mat& a);

/// ridge == 0 and square: plain inverse. Otherwise (a^T a + ridge I)^{-1} a^T.
Mat pseudo_inverse(const Mat& a, double ridge);

/// Central-difference Jacobian, column j = (f(x+h e_j) - f(x-h e_j)) / (2h).
/// h must lie in [1e-8, 1e-3].
Mat finite_diff_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
Vec sym_eigenvalues(const Mat& m);

} // namespace pbinfer

#endif
