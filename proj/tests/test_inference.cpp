#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pbinfer/inference.hpp"
#include "pbinfer/rng.hpp"

using namespace pbinfer;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

MomentSet scalar_moments(double pi_hat, double c11, double c12, double c22) {
    MomentSet m;
    m.family = Family::mean;
    m.dim = 1;
    m.pi_hat = pi_hat;
    m.A = Mat(1, 1);
    m.A(0, 0) = -1.0;
    m.B = m.A;
    m.jac_y = m.A;
    m.jac_yhat = m.A;
    m.C11 = Mat(1, 1);
    m.C11(0, 0) = c11;
    m.C12 = Mat(1, 1);
    m.C12(0, 0) = c12;
    m.C22 = Mat(1, 1);
    m.C22(0, 0) = c22;
    m.sigma_yyhat = m.C12;
    m.sigma_yhatyhat = m.C22;
    return m;
}

MomentSet random_moments(SplitRng& rng, std::size_t d, double pi_hat) {
    MomentSet m;
    m.family = Family::linear;
    m.dim = d;
    m.pi_hat = pi_hat;
    auto rand_mat = [&](double scale) {
        Mat g(d, d);
        for (double& v : g.a) v = scale * rng.normal();
        return g;
    };
    auto rand_spd = [&](double bump) {
        Mat g = rand_mat(1.0);
        Mat s = matmul(g, transpose(g));
        for (std::size_t i = 0; i < d; ++i) s(i, i) += bump;
        return s;
    };
    Mat neg_jac = -1.0 * rand_spd(0.5);
    m.jac_y = neg_jac;
    m.jac_yhat = -1.0 * rand_spd(0.5);
    m.A = -1.0 * spd_inverse(-1.0 * m.jac_y);
    m.B = -1.0 * spd_inverse(-1.0 * m.jac_yhat);
    m.C11 = rand_spd(0.2);
    m.C22 = rand_spd(0.2);
    m.C12 = rand_mat(0.7);
    m.sigma_yyhat = m.C12;
    m.sigma_yhatyhat = m.C22;
    return m;
}

Dataset mean_dataset_with_noise(std::uint64_t seed, std::size_t n, std::size_t n_lab, double rho) {
    SplitRng rng(seed);
    Vec y(n), yhat(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.normal(), v = rng.normal();
        double e2 = rho * u + std::sqrt(1.0 - rho * rho) * v;
        yhat[i] = 0.5 + e2;
        y[i] = i < n_lab ? 1.0 + u : kNaN;
    }
    return make_mean_dataset(yhat, y);
}

} // namespace

TEST_CASE("normal quantile matches the pinned 95% z value") {
    CHECK(std::abs(normal_quantile(0.975) - 1.959964) < 1e-6);
    CHECK(std::abs(normal_quantile(0.5)) < 1e-9);
    CHECK(normal_quantile(0.025) == doctest::Approx(-normal_quantile(0.975)).epsilon(1e-9));
}

TEST_CASE("if_covariance of all-zero rows is the zero matrix, empty rows throw") {
    PBFit fit;
    fit.n = 10;
    fit.theta = {0.0};
    fit.if_rows = Mat(10, 1);
    Mat cov = if_covariance(fit);
    CHECK(cov(0, 0) == 0.0);

    PBFit empty;
    CHECK_THROWS_AS(if_covariance(empty), EmptyInfluence);
}

TEST_CASE("lab avar equals sample variance over pi_hat for the mean family") {
    Dataset ds = mean_dataset_with_noise(3, 400, 100, 0.6);
    EstimatingFunction ef = make_ef(Family::mean, 1);
    PBFit lab = estimate_lab(ds, ef);
    double mean = 0.0;
    for (std::uint32_t i : ds.labeled_idx) mean += ds.y_at(i);
    mean /= static_cast<double>(ds.n_lab());
    double var = 0.0;
    for (std::uint32_t i : ds.labeled_idx) var += (ds.y_at(i) - mean) * (ds.y_at(i) - mean);
    var /= static_cast<double>(ds.n_lab());
    CHECK(std::abs(lab.cov(0, 0) - var / ds.pi_hat()) <= 1e-10);

    // se and ci fields follow the covariance
    double se = std::sqrt(lab.cov(0, 0) / static_cast<double>(ds.n));
    CHECK(lab.se[0] == doctest::Approx(se).epsilon(1e-12));
    CHECK(lab.ci_upper[0] - lab.theta[0] == doctest::Approx(1.959963984540054 * se).epsilon(1e-9));
}

TEST_CASE("delta_avar_ppia: hand values in the homoskedastic mean case") {
    // pi = 0.5, sigma_y = sigma_yhat = 1, rho = 0.75: delta = (2*0.75 - 1) = 0.5
    Mat d = delta_avar_ppia(scalar_moments(0.5, 1.0, 0.75, 1.0));
    CHECK(d(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

    // boundary rho = sigma_yhat / (2 sigma_y): exactly zero
    Mat d0 = delta_avar_ppia(scalar_moments(0.5, 1.0, 0.5, 1.0));
    CHECK(d0(0, 0) == doctest::Approx(0.0));

    // C12 = 0 with positive C22 forces a negative-definite delta
    Mat dn = delta_avar_ppia(scalar_moments(0.5, 1.0, 0.0, 1.0));
    CHECK(dn(0, 0) < 0.0);
}

TEST_CASE("delta_avar_ppia with zero cross-moments is negative definite") {
    SplitRng rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        MomentSet m = random_moments(rng, 3, 0.4);
        m.C12 = Mat(3, 3); // no shared signal
        Vec ev = sym_eigenvalues(delta_avar_ppia(m));
        CHECK(ev.back() < 0.0);
    }
}

TEST_CASE("delta_avar_cc: hand values and perfect-prediction limit") {
    // pi = 0.5, rho = 0.8: (1/pi - 1) * rho^2 = 0.64
    Mat d = delta_avar_cc(scalar_moments(0.5, 1.0, 0.8, 1.0));
    CHECK(d(0, 0) == doctest::Approx(0.64).epsilon(1e-12));

    CHECK(delta_avar_cc(scalar_moments(0.5, 1.0, 0.0, 1.0))(0, 0) == doctest::Approx(0.0));

    // yhat == y: C11 = C12 = C22, so the delta recovers (1/pi - 1) A C11 A
    MomentSet m = scalar_moments(0.25, 1.7, 1.7, 1.7);
    CHECK(delta_avar_cc(m)(0, 0) == doctest::Approx(3.0 * 1.7).epsilon(1e-12));
}

TEST_CASE("delta_avar_cc is PSD on random plug-in moments") {
    SplitRng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        MomentSet m = random_moments(rng, 3, 0.2 + 0.6 * rng.uniform01());
        Vec ev = sym_eigenvalues(delta_avar_cc(m));
        CHECK(ev.front() >= -1e-10);
    }
}

TEST_CASE("avar_of_weight identities") {
    SplitRng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        MomentSet m = random_moments(rng, 3, 0.3);
        Mat lab = (1.0 / m.pi_hat) * matmul(matmul(m.A, m.C11), m.A);

        // w = 0 recovers the labeled-only avar
        Mat a0 = avar_of_weight(m, Mat(3, 3));
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(std::abs(a0(i, j) - lab(i, j)) <= 1e-10 * (1.0 + std::abs(lab(i, j))));

        // w = W^CC matches lab - delta_cc exactly
        Mat w_cc = cc_weight(m).w;
        Mat a_cc = avar_of_weight(m, w_cc);
        Mat expect = lab - delta_avar_cc(m);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(std::abs(a_cc(i, j) - expect(i, j)) <= 1e-9 * (1.0 + std::abs(expect(i, j))));

        // identity weight matches the general ppi_a delta built with B
        Mat ai = avar_of_weight(m, identity(3));
        Mat gen = lab - (1.0 / m.pi_hat - 1.0) *
                            sym(2.0 * matmul(matmul(m.A, m.C12), m.B) -
                                matmul(matmul(m.B, m.C22), m.B));
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(std::abs(ai(i, j) - gen(i, j)) <= 1e-9 * (1.0 + std::abs(gen(i, j))));
    }
}

TEST_CASE("trace of avar at W^CC dominates the constrained weights") {
    SplitRng rng(202);
    for (int trial = 0; trial < 100; ++trial) {
        MomentSet m = random_moments(rng, 3, 0.15 + 0.7 * rng.uniform01());
        double best = trace(avar_of_weight(m, cc_weight(m).w));
        CHECK(best <= trace(avar_of_weight(m, Mat(3, 3))) + 1e-10);
        CHECK(best <= trace(avar_of_weight(m, identity(3))) + 1e-10);
        CHECK(best <= trace(avar_of_weight(m, ppipp_weight(m).w)) + 1e-10);
        CHECK(best <= trace(avar_of_weight(m, pspa_weight(m).w)) + 1e-10);
    }
}

TEST_CASE("mean-family cc covariance approaches the closed form") {
    // sigma_y = 1, rho = 0.8, pi = 0.5: aVar(cc) = 1/pi - (1/pi - 1) rho^2 = 1.36
    const double rho = 0.8;
    Dataset ds = mean_dataset_with_noise(11, 40000, 20000, rho);
    EstimatingFunction ef = make_ef(Family::mean, 1);
    PBFit cc = estimate_cc(ds, ef);
    CHECK(cc.cov(0, 0) == doctest::Approx(2.0 - 1.0 * rho * rho).epsilon(0.05));
}

TEST_CASE("homoskedastic summary") {
    // perfect prediction: rho = 1, threshold = 0.5
    Mat x(4, 1, 1.0);
    Dataset ds = make_dataset(std::move(x), Vec{2, 4, 1, 0.0}, Vec{2, 4, 1, kNaN}, Family::linear);
    EstimatingFunction ef = make_ef(Family::linear, 1);
    HomoskedasticSummary hs = homoskedastic_summary(ds, ef, solve_core(ds, ef, false));
    CHECK(hs.rho == doctest::Approx(1.0));
    CHECK(hs.threshold == doctest::Approx(0.5).epsilon(1e-12));

    // residual sds 1 and 2 exactly: threshold 1
    Mat x2(3, 1, 1.0);
    Dataset ds2 = make_dataset(std::move(x2), Vec{5 + 2, 5 - 2, 0.0}, Vec{3 + 1, 3 - 1, kNaN},
                               Family::linear);
    HomoskedasticSummary hs2 = homoskedastic_summary(ds2, ef, solve_core(ds2, ef, false));
    CHECK(hs2.sigma_y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hs2.sigma_yhat == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(hs2.threshold == doctest::Approx(1.0).epsilon(1e-12));

    // independent residual noise: |rho| below 3 / sqrt(n_lab)
    SplitRng rng(13);
    const std::size_t n = 4000;
    Mat x3(n, 1, 1.0);
    Vec y3(n), yh3(n);
    for (std::size_t i = 0; i < n; ++i) {
        y3[i] = 1.0 + rng.normal();
        yh3[i] = 0.5 + rng.normal();
    }
    Dataset ds3 = make_dataset(std::move(x3), std::move(yh3), std::move(y3), Family::linear);
    HomoskedasticSummary hs3 = homoskedastic_summary(ds3, ef, solve_core(ds3, ef, false));
    CHECK(std::abs(hs3.rho) < 3.0 / std::sqrt(static_cast<double>(n)));

    CHECK_THROWS_AS(homoskedastic_summary(ds, make_ef(Family::logistic, 1), solve_core(ds, ef, false)),
                    FamilyUnsupported);
}

TEST_CASE("avar_report flags per-coordinate efficiency") {
    // strong prediction: ppi_a efficient; weak: inefficient, cc delta ~ 0
    AvarReport strong = avar_report(Method::ppi_a, scalar_moments(0.5, 1.0, 0.9, 1.0));
    CHECK(strong.efficient_vs_lab[0] == 1);
    AvarReport weak = avar_report(Method::ppi_a, scalar_moments(0.5, 1.0, 0.1, 1.0));
    CHECK(weak.efficient_vs_lab[0] == 0);
    AvarReport cc = avar_report(Method::cc, scalar_moments(0.5, 1.0, 0.1, 1.0));
    CHECK(cc.delta_vs_lab(0, 0) >= 0.0);
}

TEST_CASE("ase tracks ese for the weighted estimators on a mid-size run") {
    // one-sample check that IF-based se is calibrated at modest n
    const std::size_t R = 400, n = 600, n_lab = 150;
    std::vector<Vec> est(4, Vec(R));
    Vec se_sum(4, 0.0);
    for (std::size_t r = 0; r < R; ++r) {
        Dataset ds = mean_dataset_with_noise(1000 + r, n, n_lab, 0.7);
        EstimatingFunction ef = make_ef(Family::mean, 1);
        std::vector<PBFit> fits =
            fit_methods(ds, ef, {Method::lab, Method::ppi_a, Method::cc, Method::ppi});
        for (std::size_t k = 0; k < 4; ++k) {
            est[k][r] = fits[k].theta[0];
            se_sum[k] += fits[k].se[0];
        }
    }
    for (std::size_t k = 0; k < 4; ++k) {
        double mean = 0.0;
        for (double v : est[k]) mean += v;
        mean /= static_cast<double>(R);
        double var = 0.0;
        for (double v : est[k]) var += (v - mean) * (v - mean);
        double ese = std::sqrt(var / static_cast<double>(R - 1));
        double ase = se_sum[k] / static_cast<double>(R);
        CHECK(ase / ese > 0.85);
        CHECK(ase / ese < 1.15);
    }
}
