#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pbinfer/estimating.hpp"
#include "pbinfer/rng.hpp"

using namespace pbinfer;

namespace {

Dataset tiny_mean_dataset() {
    // labeled y = {1, 3} with yhat = {2, 2}; one unlabeled row with yhat = 4
    Vec yhat = {2, 2, 4};
    Vec y = {1, 3, std::nan("")};
    return make_mean_dataset(yhat, y);
}

Mat design(std::initializer_list<std::initializer_list<double>> rows) {
    Mat m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

} // namespace

TEST_CASE("phi values per family") {
    EstimatingFunction mean_ef = make_ef(Family::mean, 1);
    CHECK(phi(mean_ef, 3.0, {}, Vec{3.0})[0] == doctest::Approx(0.0));

    EstimatingFunction lin = make_ef(Family::linear, 2);
    Vec x = {1.0, 2.0};
    Vec th = {1.0, 2.0};
    Vec p = phi(lin, 5.0, x, th);
    CHECK(p[0] == doctest::Approx(0.0));
    CHECK(p[1] == doctest::Approx(0.0));

    EstimatingFunction logi = make_ef(Family::logistic, 1);
    Vec x1 = {1.0};
    Vec th0 = {0.0};
    CHECK(phi(logi, 1.0, x1, th0)[0] == doctest::Approx(0.5));

    Vec short_theta = {1.0};
    CHECK_THROWS_AS(phi(lin, 1.0, x, short_theta), DimensionMismatch);
}

TEST_CASE("jacobian values per family") {
    EstimatingFunction mean_ef = make_ef(Family::mean, 1);
    CHECK(jacobian(mean_ef, 7.0, {}, Vec{1.0})(0, 0) == doctest::Approx(-1.0));

    EstimatingFunction lin = make_ef(Family::linear, 2);
    Vec x = {1.0, 2.0};
    Vec th = {0.0, 0.0};
    Mat j = jacobian(lin, 0.0, x, th);
    CHECK(j(0, 0) == doctest::Approx(-1.0));
    CHECK(j(0, 1) == doctest::Approx(-2.0));
    CHECK(j(1, 0) == doctest::Approx(-2.0));
    CHECK(j(1, 1) == doctest::Approx(-4.0));

    EstimatingFunction logi = make_ef(Family::logistic, 1);
    Vec x1 = {1.0};
    Vec th0 = {0.0};
    CHECK(jacobian(logi, 0.0, x1, th0)(0, 0) == doctest::Approx(-0.25));
}

TEST_CASE("analytic jacobian matches central differences on random inputs") {
    SplitRng rng(99);
    for (Family fam : {Family::mean, Family::linear, Family::logistic}) {
        std::size_t d = fam == Family::mean ? 1 : 3;
        EstimatingFunction ef = make_ef(fam, d);
        for (int trial = 0; trial < 25; ++trial) {
            Vec x(d), th(d);
            for (double& v : x) v = rng.normal();
            for (double& v : th) v = 0.5 * rng.normal();
            if (fam != Family::mean) x[0] = 1.0;
            double y = fam == Family::logistic ? (rng.uniform01() < 0.5 ? 0.0 : 1.0) : rng.normal();
            Mat analytic = jacobian(ef, y, x, th);
            Mat numeric = finite_diff_jacobian(
                [&](const Vec& t) { return phi(ef, y, x, t); }, th, 1e-5);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    double denom = std::max(1.0, std::abs(analytic(i, j)));
                    CHECK(std::abs(analytic(i, j) - numeric(i, j)) / denom < 1e-4);
                }
        }
    }
}

TEST_CASE("solve_z mean family returns the sample mean") {
    ZEstimate z = solve_z(make_ef(Family::mean, 1), Vec{1.0, 3.0}, Mat());
    CHECK(z.theta[0] == doctest::Approx(2.0));
    CHECK(z.converged);
}

TEST_CASE("solve_z linear interpolates two points exactly") {
    Mat x = design({{1, 0}, {1, 1}});
    ZEstimate z = solve_z(make_ef(Family::linear, 2), Vec{0.0, 1.0}, x);
    CHECK(z.theta[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(z.theta[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solve_z linear equals closed-form least squares") {
    SplitRng rng(5);
    const std::size_t n = 60, d = 3;
    Mat x(n, d);
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        for (std::size_t j = 1; j < d; ++j) x(i, j) = rng.normal();
        y[i] = 1.0 + 0.5 * x(i, 1) - x(i, 2) + 0.3 * rng.normal();
    }
    ZEstimate z = solve_z(make_ef(Family::linear, d), y, x);
    Mat s(d, d);
    Vec b(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        add_outer(s, 1.0, x.row(i), x.row(i));
        for (std::size_t j = 0; j < d; ++j) b[j] += x(i, j) * y[i];
    }
    Vec direct = solve_linear(s, b);
    for (std::size_t j = 0; j < d; ++j)
        CHECK(std::abs(z.theta[j] - direct[j]) < 1e-10);
}

TEST_CASE("solve_z logistic intercept-only hits logit of the outcome rate") {
    Mat x(10, 1, 1.0);
    Vec y = {1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
    ZEstimate z = solve_z(make_ef(Family::logistic, 1), y, x);
    CHECK(std::abs(z.theta[0]) < 1e-8); // logit(1/2) = 0
    CHECK(z.converged);

    Vec y2 = {1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
    ZEstimate z2 = solve_z(make_ef(Family::logistic, 1), y2, x);
    CHECK(z2.theta[0] == doctest::Approx(std::log(0.3 / 0.7)).epsilon(1e-8));
}

TEST_CASE("solve_z logistic flags separation") {
    Mat x(6, 1, 1.0);
    Vec all_ones = {1, 1, 1, 1, 1, 1};
    CHECK_THROWS_AS(solve_z(make_ef(Family::logistic, 1), all_ones, x), SeparationDetected);

    // Perfectly separated two-column design walks |x' theta| past the guard.
    Mat x2 = design({{1, -2}, {1, -1.5}, {1, -1}, {1, 1}, {1, 1.5}, {1, 2}});
    Vec y2 = {0, 0, 0, 1, 1, 1};
    CHECK_THROWS_AS(solve_z(make_ef(Family::logistic, 2), y2, x2), SeparationDetected);
}

TEST_CASE("solve_z is permutation invariant") {
    SplitRng rng(31);
    const std::size_t n = 40;
    Mat x(n, 2);
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = rng.normal();
        y[i] = rng.uniform01() < expit(0.4 + 0.8 * x(i, 1)) ? 1.0 : 0.0;
    }
    ZEstimate base = solve_z(make_ef(Family::logistic, 2), y, x);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i-- > 1;)
        std::swap(perm[i], perm[static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i + 1))]);
    Mat xp(n, 2);
    Vec yp(n);
    for (std::size_t i = 0; i < n; ++i) {
        xp(i, 0) = x(perm[i], 0);
        xp(i, 1) = x(perm[i], 1);
        yp[i] = y[perm[i]];
    }
    ZEstimate shuffled = solve_z(make_ef(Family::logistic, 2), yp, xp);
    CHECK(std::abs(base.theta[0] - shuffled.theta[0]) < 1e-9);
    CHECK(std::abs(base.theta[1] - shuffled.theta[1]) < 1e-9);
}

TEST_CASE("root plugs back into the mean estimating equation") {
    Dataset ds = tiny_mean_dataset();
    EstimatingFunction ef = make_ef(Family::mean, 1);
    ZEstimate beta = solve_z(ef, ds, Outcome::y, Rows::labeled);
    CHECK(mean_equation_norm(ef, ds, Outcome::y, Rows::labeled, beta.theta) <= 1e-8);
    ZEstimate gamma = solve_z(ef, ds, Outcome::yhat, Rows::all);
    CHECK(gamma.theta[0] == doctest::Approx(8.0 / 3.0));
    CHECK(mean_equation_norm(ef, ds, Outcome::yhat, Rows::all, gamma.theta) <= 1e-8);
}

TEST_CASE("dataset validation") {
    CHECK_THROWS_AS(make_mean_dataset(Vec{1.0}, Vec{std::nan("")}), InsufficientLabeled);

    Vec bad_yhat = {std::nan(""), 1.0, 1.0};
    CHECK_THROWS_AS(make_mean_dataset(bad_yhat, Vec{1.0, 2.0, 3.0}), NonFiniteValue);

    Mat no_intercept(3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        no_intercept(i, 0) = 2.0;
        no_intercept(i, 1) = 1.0;
    }
    CHECK_THROWS_AS(make_dataset(no_intercept, Vec{1, 1, 1}, Vec{1, 2, 3}, Family::linear),
                    InvalidArgument);

    Mat x(3, 1, 1.0);
    CHECK_THROWS_AS(make_dataset(x, Vec{1, 0, 1}, Vec{0.5, 1, 0}, Family::logistic), InvalidArgument);
}
