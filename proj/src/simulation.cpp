#include "pbinfer/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pbinfer {

namespace {

constexpr std::uint64_t kCalibrationSeed = 0x5bd1e995cb9f86a1ULL;
constexpr std::uint64_t kReferenceSeed = 0x2b7e151628aed2a6ULL;
constexpr std::size_t kCalibrationDraws = 1'000'000;
constexpr std::size_t kReferenceDraws = 10'000'000;
constexpr std::size_t kBlockRows = 65'536;

constexpr double kEpsSd = 0.75;      // sd of the linear outcome noise
constexpr double kPairwiseCorr = 0.4;

// Cholesky factor of the 4x4 compound-symmetric covariance.
struct CovFactor {
    double l[4][4] = {};
    CovFactor() {
        double s[4][4];
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) s[i][j] = (i == j) ? 1.0 : kPairwiseCorr;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j <= i; ++j) {
                double v = s[i][j];
                for (int k = 0; k < j; ++k) v -= l[i][k] * l[j][k];
                l[i][j] = (i == j) ? std::sqrt(v) : v / l[j][j];
            }
    }
};

const CovFactor kCov;

inline void draw_w(SplitRng& rng, double* w) {
    double z[4];
    for (int k = 0; k < 4; ++k) z[k] = rng.normal();
    for (int k = 0; k < 4; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += kCov.l[k][j] * z[j];
        w[k] = s;
    }
}

inline void design_row(const double* w, double* x) {
    x[0] = 1.0;
    x[1] = w[0];
    x[2] = w[2];
    x[3] = w[3] > 0.0 ? 1.0 : 0.0;
}

struct LinearErrorParams {
    double a = 0.0, b = 0.0;
    double scale = 0.0;        // sigma_tau, or c when covariate-dependent
    bool covdep = false;
};

LinearErrorParams linear_error_params(ErrorType et, double target_r2) {
    switch (et) {
        case ErrorType::random_error:
            return {0.0, 0.0, calibrate_sigma_tau(et, target_r2), false};
        case ErrorType::nonrandom_error:
            return {-2.0, 0.0, calibrate_sigma_tau(et, target_r2), false};
        case ErrorType::covariate_dependent:
            return {0.0, -3.5, calibrate_sigma_tau(et, target_r2), true};
    }
    throw InvalidArgument("unknown error type");
}

} // namespace

const char* error_type_name(ErrorType e) {
    switch (e) {
        case ErrorType::random_error: return "random";
        case ErrorType::nonrandom_error: return "nonrandom";
        case ErrorType::covariate_dependent: return "covdep";
    }
    return "?";
}

ErrorType error_type_from_name(const std::string& s) {
    if (s == "random") return ErrorType::random_error;
    if (s == "nonrandom") return ErrorType::nonrandom_error;
    if (s == "covdep") return ErrorType::covariate_dependent;
    throw InvalidArgument("unknown error type: " + s);
}

const char* quality_name(Quality q) { return q == Quality::high ? "high" : "low"; }

Quality quality_from_name(const std::string& s) {
    if (s == "high") return Quality::high;
    if (s == "low") return Quality::low;
    throw InvalidArgument("unknown quality: " + s);
}

std::string scenario_id(const SimScenario& sc) {
    return std::string(family_name(sc.family)) + "_" + error_type_name(sc.error_type) + "_" +
           quality_name(sc.quality);
}

Mat gen_covariates(SplitRng& rng, std::size_t n) {
    Mat w(n, 4);
    for (std::size_t i = 0; i < n; ++i) draw_w(rng, w.row(i));
    return w;
}

double signal(const double* w) {
    return 1.0 + 0.1 * std::exp(w[0]) + std::sin(w[1]) + w[2] + w[2] * w[2] +
           (w[3] > 0.0 ? 1.0 : 0.0);
}

double quality_target(Family family, Quality q) {
    if (family == Family::logistic) return q == Quality::high ? 0.9 : 0.7;
    return q == Quality::high ? 0.8 : 0.6;
}

namespace {

// Second moments of (Y, signal-part, noise-basis) on the calibration
// stream. Yhat(scale) = s + scale * m, so corr^2(Y, Yhat) is a closed-form
// rational function of the scale and bisection never regenerates data.
struct CalMoments {
    double vy, vs, vm, cys, csm, cym;
};

CalMoments linear_cal_moments(ErrorType et) {
    double a = et == ErrorType::nonrandom_error ? -2.0 : 0.0;
    double b = et == ErrorType::covariate_dependent ? -3.5 : 0.0;
    bool covdep = et == ErrorType::covariate_dependent;

    SplitRng rng(kCalibrationSeed, 0, static_cast<std::uint64_t>(et));
    const double n = static_cast<double>(kCalibrationDraws);
    double sy = 0, syy = 0, ss = 0, sss = 0, sys = 0, sm = 0, smm = 0, ssm = 0, sym = 0;
    double w[4];
    for (std::size_t i = 0; i < kCalibrationDraws; ++i) {
        draw_w(rng, w);
        double h = signal(w);
        double y = h + kEpsSd * rng.normal();
        double s = h + a + b * std::abs(w[1]);
        double m = covdep ? std::abs(w[1]) * rng.normal() : rng.normal();
        sy += y; syy += y * y;
        ss += s; sss += s * s;
        sys += y * s;
        sm += m; smm += m * m;
        ssm += s * m;
        sym += y * m;
    }
    auto cov = [n](double sab, double sa, double sb) { return sab / n - (sa / n) * (sb / n); };
    return {cov(syy, sy, sy), cov(sss, ss, ss), cov(smm, sm, sm),
            cov(sys, sy, ss), cov(ssm, ss, sm), cov(sym, sy, sm)};
}

double cal_corr2(const CalMoments& c, double scale) {
    double covar = c.cys + scale * c.cym;
    double v_yhat = c.vs + 2.0 * scale * c.csm + scale * scale * c.vm;
    if (v_yhat <= 0.0) return 0.0;
    return covar * covar / (c.vy * v_yhat);
}

std::mutex g_cal_mutex;
std::map<std::pair<int, double>, double> g_sigma_cache;
std::map<std::pair<int, double>, double> g_perr_cache;

double calibrate_sigma_tau_locked(ErrorType et, double target_r2) {
    auto key = std::make_pair(static_cast<int>(et), target_r2);
    auto it = g_sigma_cache.find(key);
    if (it != g_sigma_cache.end()) return it->second;

    static std::map<int, CalMoments> moments_cache;
    auto mit = moments_cache.find(static_cast<int>(et));
    if (mit == moments_cache.end())
        mit = moments_cache.emplace(static_cast<int>(et), linear_cal_moments(et)).first;
    const CalMoments& cm = mit->second;

    double lo = 0.0, hi = 50.0;
    double ceiling = cal_corr2(cm, lo);
    double result;
    if (target_r2 > ceiling) {
        if (et == ErrorType::covariate_dependent) {
            // The fixed bias slope caps corr^2 near 0.43; match the
            // random-error noise variance for the same target instead.
            result = calibrate_sigma_tau_locked(ErrorType::random_error, target_r2);
            std::fprintf(stderr,
                         "note: covariate-dependent prediction error cannot reach corr^2 = %.2f "
                         "(ceiling %.3f); using the random-error noise scale c = %.6f\n",
                         target_r2, ceiling, result);
        } else {
            throw CalibrationFailed("calibrate_sigma_tau: target above achievable ceiling");
        }
    } else if (cal_corr2(cm, hi) > target_r2) {
        throw CalibrationFailed("calibrate_sigma_tau: bracket [0, 50] does not reach target");
    } else {
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if (cal_corr2(cm, mid) > target_r2)
                lo = mid;
            else
                hi = mid;
            if (hi - lo < 1e-12) break;
        }
        result = 0.5 * (lo + hi);
    }
    g_sigma_cache.emplace(key, result);
    return result;
}

// Mean per-row flip multiplier kappa, so accuracy(p) = 1 - kappa * p.
double logistic_flip_kappa(ErrorType et) {
    SplitRng rng(kCalibrationSeed, 1, 100 + static_cast<std::uint64_t>(et));
    double acc = 0.0;
    double w[4];
    for (std::size_t i = 0; i < kCalibrationDraws; ++i) {
        draw_w(rng, w);
        bool y1 = rng.bernoulli(expit(signal(w)));
        double mult;
        switch (et) {
            case ErrorType::random_error: mult = 1.0; break;
            case ErrorType::nonrandom_error: mult = y1 ? 1.0 : 1.0 / 20.0; break;
            case ErrorType::covariate_dependent:
                mult = y1 ? (w[3] > 0.0 ? 0.25 : 3.0) : (w[3] > 0.0 ? 0.25 : 2.0);
                break;
            default: throw InvalidArgument("unknown error type");
        }
        acc += mult;
    }
    return acc / static_cast<double>(kCalibrationDraws);
}

double calibrate_p_error_locked(ErrorType et, double target_acc) {
    auto key = std::make_pair(static_cast<int>(et), target_acc);
    auto it = g_perr_cache.find(key);
    if (it != g_perr_cache.end()) return it->second;

    double result;
    if (et == ErrorType::random_error) {
        result = 1.0 - target_acc; // accuracy = 1 - p exactly
    } else {
        double kappa = logistic_flip_kappa(et);
        // Every flip probability must stay in [0, 1]; the covariate-dependent
        // model multiplies p by at most 3.
        double p_max = et == ErrorType::covariate_dependent ? 1.0 / 3.0 : 1.0;
        double lo = 0.0, hi = p_max;
        if (1.0 - kappa * p_max > target_acc + 1e-9)
            throw CalibrationFailed("calibrate_p_error: target below achievable accuracy");
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if (1.0 - kappa * mid > target_acc)
                lo = mid;
            else
                hi = mid;
            if (hi - lo < 1e-14) break;
        }
        result = 0.5 * (lo + hi);
    }
    g_perr_cache.emplace(key, result);
    return result;
}

} // namespace

double calibrate_sigma_tau(ErrorType error_type, double target_r2) {
    if (!(target_r2 > 0.0 && target_r2 < 1.0))
        throw InvalidArgument("calibrate_sigma_tau: target must be in (0, 1)");
    std::lock_guard<std::mutex> lock(g_cal_mutex);
    return calibrate_sigma_tau_locked(error_type, target_r2);
}

double calibrate_p_error(ErrorType error_type, double target_accuracy) {
    if (!(target_accuracy > 0.0 && target_accuracy < 1.0))
        throw InvalidArgument("calibrate_p_error: target must be in (0, 1)");
    std::lock_guard<std::mutex> lock(g_cal_mutex);
    return calibrate_p_error_locked(error_type, target_accuracy);
}

namespace {

void check_scenario(const SimScenario& sc) {
    if (sc.n_lab >= sc.n) throw InvalidArgument("scenario: n_lab must be < n");
    if (sc.replicates < 1) throw InvalidArgument("scenario: replicates must be >= 1");
}

} // namespace

Dataset gen_linear(SplitRng& rng, const SimScenario& sc) {
    check_scenario(sc);
    LinearErrorParams p = linear_error_params(sc.error_type, quality_target(Family::linear, sc.quality));
    Mat x(sc.n, 4);
    Vec yhat(sc.n), y(sc.n);
    double w[4];
    for (std::size_t i = 0; i < sc.n; ++i) {
        draw_w(rng, w);
        double h = signal(w);
        double yi = h + kEpsSd * rng.normal();
        double sd = p.covdep ? p.scale * std::abs(w[1]) : p.scale;
        double tau = p.a + p.b * std::abs(w[1]) + sd * rng.normal();
        design_row(w, x.row(i));
        yhat[i] = h + tau;
        y[i] = i < sc.n_lab ? yi : std::numeric_limits<double>::quiet_NaN();
    }
    return make_dataset(std::move(x), std::move(yhat), std::move(y), Family::linear);
}

Dataset gen_logistic(SplitRng& rng, const SimScenario& sc) {
    check_scenario(sc);
    double p_error = calibrate_p_error(sc.error_type, quality_target(Family::logistic, sc.quality));
    Mat x(sc.n, 4);
    Vec yhat(sc.n), y(sc.n);
    double w[4];
    for (std::size_t i = 0; i < sc.n; ++i) {
        draw_w(rng, w);
        double yi = rng.bernoulli(expit(signal(w))) ? 1.0 : 0.0;
        double flip_p;
        switch (sc.error_type) {
            case ErrorType::random_error: flip_p = p_error; break;
            case ErrorType::nonrandom_error: flip_p = yi == 1.0 ? p_error : p_error / 20.0; break;
            case ErrorType::covariate_dependent:
                flip_p = yi == 1.0 ? (w[3] > 0.0 ? p_error / 4.0 : 3.0 * p_error)
                                   : (w[3] > 0.0 ? p_error / 4.0 : 2.0 * p_error);
                break;
            default: throw InvalidArgument("unknown error type");
        }
        bool flip = rng.bernoulli(flip_p);
        design_row(w, x.row(i));
        yhat[i] = flip ? 1.0 - yi : yi;
        y[i] = i < sc.n_lab ? yi : std::numeric_limits<double>::quiet_NaN();
    }
    return make_dataset(std::move(x), std::move(yhat), std::move(y), Family::logistic);
}

Dataset gen_dataset(SplitRng& rng, const SimScenario& sc) {
    if (sc.family == Family::linear) return gen_linear(rng, sc);
    if (sc.family == Family::logistic) return gen_logistic(rng, sc);
    throw InvalidArgument("gen_dataset: scenario family must be linear or logistic");
}

std::vector<std::string> sim_coef_names(Family family) {
    (void)family;
    return {"intercept", "w1", "w3", "ind_w4"};
}

namespace {

// Accumulates X'X (packed upper) and X'g partials over one block of the
// reference stream. Blocks have a fixed size and are combined in index
// order, so the reduction is identical for any thread count.
struct BlockSums {
    double s[10] = {};  // upper triangle of sum x x^T (times a weight)
    double b[4] = {};
};

template <typename RowFn>
void reference_pass(Family family, RowFn&& row_fn) {
    const std::size_t n_blocks = (kReferenceDraws + kBlockRows - 1) / kBlockRows;
    std::vector<BlockSums> partial(n_blocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(n_blocks); ++blk) {
        SplitRng rng(kReferenceSeed, static_cast<std::uint64_t>(blk),
                     1000 + static_cast<std::uint64_t>(family));
        std::size_t lo = static_cast<std::size_t>(blk) * kBlockRows;
        std::size_t hi = std::min(lo + kBlockRows, kReferenceDraws);
        BlockSums& out = partial[static_cast<std::size_t>(blk)];
        double w[4], x[4];
        for (std::size_t i = lo; i < hi; ++i) {
            draw_w(rng, w);
            design_row(w, x);
            row_fn(rng, w, x, out);
        }
    }
    BlockSums total;
    for (const BlockSums& p : partial) {
        for (int k = 0; k < 10; ++k) total.s[k] += p.s[k];
        for (int k = 0; k < 4; ++k) total.b[k] += p.b[k];
    }
    row_fn.finish(total);
}

inline void add_upper(double* s, const double* x, double wgt) {
    int k = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) s[k++] += wgt * x[i] * x[j];
}

Mat unpack_upper(const double* s) {
    Mat m(4, 4);
    int k = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            m(i, j) = s[k];
            m(j, i) = s[k];
            ++k;
        }
    return m;
}

Vec beta_star_linear() {
    struct Fn {
        void operator()(SplitRng& rng, const double* w, const double* x, BlockSums& out) const {
            double y = signal(w) + kEpsSd * rng.normal();
            add_upper(out.s, x, 1.0);
            for (int j = 0; j < 4; ++j) out.b[j] += x[j] * y;
        }
        void finish(const BlockSums& total) {
            Mat s = unpack_upper(total.s);
            Vec b(total.b, total.b + 4);
            result = solve_linear(s, b);
        }
        Vec result;
    } fn;
    reference_pass(Family::linear, fn);
    return fn.result;
}

Vec beta_star_logistic() {
    Vec theta(4, 0.0);
    for (int iter = 0; iter < 50; ++iter) {
        struct Fn {
            const Vec* theta;
            void operator()(SplitRng& rng, const double* w, const double* x, BlockSums& out) const {
                double y = rng.bernoulli(expit(signal(w))) ? 1.0 : 0.0;
                double lin = 0.0;
                for (int j = 0; j < 4; ++j) lin += x[j] * (*theta)[j];
                double p = expit(lin);
                add_upper(out.s, x, p * (1.0 - p));
                for (int j = 0; j < 4; ++j) out.b[j] += x[j] * (y - p);
            }
            void finish(const BlockSums& total) {
                hessian = unpack_upper(total.s);
                grad = Vec(total.b, total.b + 4);
            }
            Mat hessian;
            Vec grad;
        } fn;
        fn.theta = &theta;
        reference_pass(Family::logistic, fn);
        Vec step = solve_linear(fn.hessian, fn.grad);
        for (int j = 0; j < 4; ++j) theta[j] += step[j];
        if (norm_inf(fn.grad) / static_cast<double>(kReferenceDraws) <= 1e-9 ||
            norm_inf(step) <= 1e-12)
            return theta;
    }
    throw DidNotConverge("beta_star_logistic: reference Newton did not converge");
}

std::mutex g_beta_star_mutex;
std::map<int, Vec> g_beta_star_cache;

} // namespace

Vec reference_beta_star(Family family) {
    std::lock_guard<std::mutex> lock(g_beta_star_mutex);
    auto it = g_beta_star_cache.find(static_cast<int>(family));
    if (it != g_beta_star_cache.end()) return it->second;
    Vec beta;
    if (family == Family::linear)
        beta = beta_star_linear();
    else if (family == Family::logistic)
        beta = beta_star_logistic();
    else
        throw InvalidArgument("reference_beta_star: linear or logistic only");
    g_beta_star_cache.emplace(static_cast<int>(family), beta);
    return beta;
}

std::vector<Method> default_methods(Family family) {
    std::vector<Method> m = {Method::lab,   Method::naive, Method::ppi, Method::ppi_a,
                             Method::cc,    Method::ppipp, Method::pspa};
    if (family == Family::linear) {
        m.push_back(Method::sur);
        m.push_back(Method::pop);
    }
    return m;
}

SimReport run_scenario(const SimScenario& sc, const std::vector<Method>& methods, int threads) {
    check_scenario(sc);
    if (methods.empty()) throw InvalidArgument("run_scenario: no methods requested");
    for (Method m : methods)
        if (!method_supported(m, sc.family))
            throw FamilyUnsupported(std::string("run_scenario: ") + method_name(m) +
                                    " unsupported for family " + family_name(sc.family));

    // lab backs the relative-efficiency denominator even when not requested.
    std::vector<Method> fit_list = methods;
    if (std::find(fit_list.begin(), fit_list.end(), Method::lab) == fit_list.end())
        fit_list.insert(fit_list.begin(), Method::lab);

    const Vec beta_star = reference_beta_star(sc.family);
    const std::size_t dim = beta_star.size();
    const std::size_t n_methods = fit_list.size();
    const std::size_t R = sc.replicates;

    // Trigger calibration before the parallel loop.
    {
        SplitRng warm(sc.seed, 0, 999);
        gen_dataset(warm, sc);
    }

    const EstimatingFunction ef = make_ef(sc.family, dim);
    FitOptions opts;

    std::vector<double> thetas(R * n_methods * dim, 0.0);
    std::vector<double> ses(R * n_methods * dim, 0.0);
    std::vector<std::uint8_t> failed(R, 0);

    auto run_replicate = [&](std::size_t r) {
        SplitRng rng(sc.seed, r, 0);
        try {
            Dataset ds = gen_dataset(rng, sc);
            std::vector<PBFit> fits = fit_methods(ds, ef, fit_list, opts);
            for (std::size_t m = 0; m < n_methods; ++m)
                for (std::size_t j = 0; j < dim; ++j) {
                    thetas[(r * n_methods + m) * dim + j] = fits[m].theta[j];
                    ses[(r * n_methods + m) * dim + j] = fits[m].se[j];
                }
        } catch (const Error&) {
            failed[r] = 1;
        }
    };

    if (threads <= 1) {
        for (std::size_t r = 0; r < R; ++r) run_replicate(r);
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
        for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(R); ++r)
            run_replicate(static_cast<std::size_t>(r));
    }

    std::size_t n_failures = 0;
    for (std::uint8_t f : failed) n_failures += f;

    SimReport report;
    report.scenario = sc;
    report.beta_star = beta_star;
    report.coef_names = sim_coef_names(sc.family);
    report.n_failures = n_failures;

    const std::size_t R_ok = R - n_failures;
    if (R_ok == 0) throw FailureBudgetExceeded("run_scenario: every replicate failed");

    const double z95 = 1.959963984540054;
    std::size_t lab_pos = 0;
    for (std::size_t m = 0; m < n_methods; ++m)
        if (fit_list[m] == Method::lab) lab_pos = m;

    // Per-replicate squared errors, for the RE ratio and its delta-method
    // MC standard error.
    auto sq_err = [&](std::size_t r, std::size_t m, std::size_t j) {
        double d = thetas[(r * n_methods + m) * dim + j] - beta_star[j];
        return d * d;
    };

    for (std::size_t m = 0; m < n_methods; ++m) {
        if (std::find(methods.begin(), methods.end(), fit_list[m]) == methods.end()) continue;
        for (std::size_t j = 0; j < dim; ++j) {
            double sum_t = 0, sum_t2 = 0, sum_se = 0, cover = 0;
            double mse_m = 0, mse_l = 0, var_dm = 0, var_dl = 0, cov_dml = 0;
            for (std::size_t r = 0; r < R; ++r) {
                if (failed[r]) continue;
                double t = thetas[(r * n_methods + m) * dim + j];
                double se = ses[(r * n_methods + m) * dim + j];
                sum_t += t;
                sum_t2 += t * t;
                sum_se += se;
                if (std::abs(t - beta_star[j]) <= z95 * se) cover += 1.0;
                mse_m += sq_err(r, m, j);
                mse_l += sq_err(r, lab_pos, j);
            }
            const double nr = static_cast<double>(R_ok);
            double mean_t = sum_t / nr;
            mse_m /= nr;
            mse_l /= nr;
            for (std::size_t r = 0; r < R; ++r) {
                if (failed[r]) continue;
                double dm = sq_err(r, m, j) - mse_m;
                double dl = sq_err(r, lab_pos, j) - mse_l;
                var_dm += dm * dm;
                var_dl += dl * dl;
                cov_dml += dm * dl;
            }
            var_dm /= nr;
            var_dl /= nr;
            cov_dml /= nr;

            SimCell cell;
            cell.method = fit_list[m];
            cell.coef = static_cast<int>(j);
            cell.pct_bias = 100.0 * (mean_t - beta_star[j]) / std::abs(beta_star[j]);
            cell.coverage = cover / nr;
            cell.coverage_mcse = std::sqrt(cell.coverage * (1.0 - cell.coverage) / nr);
            cell.re = mse_m > 0.0 ? mse_l / mse_m : 1.0;
            if (mse_m > 0.0 && mse_l > 0.0) {
                double rel_var = var_dl / (mse_l * mse_l) + var_dm / (mse_m * mse_m) -
                                 2.0 * cov_dml / (mse_l * mse_m);
                cell.re_mcse = cell.re * std::sqrt(std::max(0.0, rel_var) / nr);
            }
            cell.ase = sum_se / nr;
            cell.ese = R_ok > 1 ? std::sqrt(std::max(0.0, (sum_t2 - nr * mean_t * mean_t) / (nr - 1.0)))
                                : 0.0;
            report.cells.push_back(cell);
        }
    }

    if (static_cast<double>(n_failures) > 0.01 * static_cast<double>(R))
        throw FailureBudgetExceeded("run_scenario: " + std::to_string(n_failures) + " of " +
                                    std::to_string(R) + " replicates failed");
    return report;
}

} // namespace pbinfer
