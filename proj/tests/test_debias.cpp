#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "dlasso/debias.hpp"
#include "dlasso/designs.hpp"
#include "dlasso/errors.hpp"
#include "oracles.hpp"

using namespace dlasso;

namespace {

Dataset small_instance(Eigen::Index n, Eigen::Index p, Eigen::Index s0, double amp,
                       double sigma, std::uint64_t seed) {
    return simulate_dataset(CovarianceModel::identity(p), n, s0, amp, sigma, seed);
}

}  // namespace

TEST_CASE("debias: trivial cases") {
    const Dataset d = small_instance(12, 4, 2, 1.0, 0.5, 7u);
    const LassoFit fit = lasso_fit(d.X, d.y, 0.2);

    const DebiasResult zero_m = debias(d.X, d.y, fit, Eigen::MatrixXd::Zero(4, 4), 1.0);
    CHECK((zero_m.theta_d - fit.theta_hat).cwiseAbs().maxCoeff() == 0.0);

    // zero residual: correction vanishes for any M
    LassoFit interp = fit;
    interp.theta_hat = Eigen::FullPivLU<Eigen::MatrixXd>(d.X.transpose() * d.X)
                           .solve(d.X.transpose() * d.y);
    Eigen::VectorXd y_fit = d.X * interp.theta_hat;
    Eigen::MatrixXd M = Eigen::MatrixXd::Random(4, 4);
    const DebiasResult no_resid = debias(d.X, y_fit, interp, M, 1.0);
    CHECK((no_resid.theta_d - interp.theta_hat).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("debias: hand-checked 3x3 instance and exact recomputation") {
    // X = sqrt(n) I with n = p = 3: theta_d = theta_hat + (y - X theta_hat)/sqrt(3)
    const double rt3 = std::sqrt(3.0);
    Eigen::MatrixXd X = rt3 * Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd y(3);
    y << 0.9, -0.3, 2.1;
    LassoFit fit;
    fit.theta_hat = Eigen::Vector3d(0.1, 0.0, 0.8);
    fit.lambda = 0.1;
    const DebiasResult res = debias(X, y, fit, Eigen::MatrixXd::Identity(3, 3), 1.0);
    // by hand: theta_d_i = theta_i + (y_i - sqrt(3) theta_i) sqrt(3)/3
    for (int i = 0; i < 3; ++i) {
        const double hand = fit.theta_hat(i) + (y(i) - rt3 * fit.theta_hat(i)) * rt3 / 3.0;
        CHECK(std::abs(res.theta_d(i) - hand) < 1e-15);
    }

    // identity theta_d = theta_hat + M X'(y - X theta_hat)/n to 1e-12, random data
    const Dataset d = small_instance(20, 6, 2, 0.7, 1.0, 9u);
    const LassoFit f2 = lasso_fit(d.X, d.y, 0.15);
    Eigen::MatrixXd M = build_covariance(CovarianceModel::circulant(6, 0.5));
    const DebiasResult r2 = debias(d.X, d.y, f2, M, 1.0);
    const Eigen::VectorXd recompute =
        f2.theta_hat + M * (d.X.transpose() * (d.y - d.X * f2.theta_hat)) / 20.0;
    CHECK((r2.theta_d - recompute).cwiseAbs().maxCoeff() <= 1e-12);

    // variance_diag equals the (M Sigma_hat M')_{ii} triple product
    const Eigen::MatrixXd shat = empirical_covariance(d.X);
    for (int i = 0; i < 6; ++i) {
        const double direct = M.row(i) * shat * M.row(i).transpose();
        CHECK(std::abs(r2.variance_diag(i) - direct) < 1e-12);
        CHECK(r2.variance_diag(i) > 0.0);
    }
}

TEST_CASE("debias: correction is affine-equivariant in M") {
    const Dataset d = small_instance(15, 5, 2, 1.0, 1.0, 11u);
    const LassoFit fit = lasso_fit(d.X, d.y, 0.1);
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(5, 5) * 0.7;
    M(0, 2) = 0.3;
    const DebiasResult r1 = debias(d.X, d.y, fit, M, 1.0);
    const DebiasResult r2 = debias(d.X, d.y, fit, 2.0 * M, 1.0);
    const Eigen::VectorXd lhs = r2.theta_d - fit.theta_hat;
    const Eigen::VectorXd rhs = 2.0 * (r1.theta_d - fit.theta_hat);
    // exact algebra; adding and subtracting theta_hat costs the last bits
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("debias_known is deterministic and uses the stated default lambda") {
    const Dataset d = small_instance(40, 10, 3, 0.8, 1.0, 13u);
    const Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(10, 10);
    const double lambda = default_lasso_lambda(40, 10, 1.0);  // 8 sigma sqrt(log p / n)
    const DebiasResult a = debias_known(d.X, d.y, lambda, omega);
    const DebiasResult b = debias_known(d.X, d.y, lambda, omega);
    CHECK((a.theta_d - b.theta_d).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.sigma_hat == b.sigma_hat);
    CHECK(a.mode == DebiasMode::KnownOmega);
}

TEST_CASE("debias_nodewise tracks the known-Omega estimator on easy designs") {
    for (int rep = 0; rep < 3; ++rep) {
        const Dataset d = simulate_dataset(CovarianceModel::identity(20), 2000, 3, 0.5, 1.0,
                                           17u + rep);
        const double lambda = default_lasso_lambda(2000, 20, 1.0);
        const DebiasResult known =
            debias_known(d.X, d.y, lambda, Eigen::MatrixXd::Identity(20, 20), 1.0);
        const DebiasResult nw = debias_nodewise(d.X, d.y, lambda,
                                                nodewise_default_lambda(2000, 20), 1.0);
        CHECK(nw.mode == DebiasMode::Nodewise);
        CHECK((known.theta_d - nw.theta_d).lpNorm<Eigen::Infinity>() <= 0.1);
    }
}

TEST_CASE("debias_nodewise: p = 1 reduces to ordinary least squares") {
    const Dataset d = simulate_dataset(CovarianceModel::identity(1), 30, 1, 1.2, 0.4, 19u);
    const DebiasResult res = debias_nodewise(d.X, d.y, 0.05, 0.1, 0.4);
    const double ols = d.X.col(0).dot(d.y) / d.X.col(0).squaredNorm();
    CHECK(res.M(0, 0) == doctest::Approx(30.0 / d.X.col(0).squaredNorm()).epsilon(1e-12));
    CHECK(res.theta_d(0) == doctest::Approx(ols).epsilon(1e-10));
}

TEST_CASE("split_dataset: deterministic partition, odd totals, row preservation") {
    const Dataset d = small_instance(7, 3, 1, 1.0, 1.0, 23u);
    auto [a1, b1] = split_dataset(d, 5u);
    auto [a2, b2] = split_dataset(d, 5u);
    CHECK((a1.X - a2.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK((b1.y - b2.y).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a1.n() == 3);  // extra sample lands in the estimation batch
    CHECK(b1.n() == 4);
    CHECK(std::abs(a1.y.sum() + b1.y.sum() - d.y.sum()) < 1e-12);

    auto [a3, b3] = split_dataset(d, 6u);
    const bool same = (a3.n() == a1.n()) && ((a3.X - a1.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK_FALSE(same);
}

TEST_CASE("debias_split: degenerate identical batches equal debias_known") {
    const Dataset d = small_instance(40, 8, 2, 1.0, 1.0, 29u);
    const double lambda = 0.3;
    const Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(8, 8);
    const DebiasResult split =
        debias_split(d, d, lambda, SplitMSource::known(omega));
    const DebiasResult known = debias_known(d.X, d.y, lambda, omega);
    CHECK((split.theta_d - known.theta_d).cwiseAbs().maxCoeff() == 0.0);
    CHECK(split.mode == DebiasMode::SampleSplit);
}

TEST_CASE("decompose_bias_noise: zero-noise and exact-inverse cases") {
    const Dataset d = small_instance(25, 5, 2, 1.0, 1.0, 31u);
    const LassoFit fit = lasso_fit(d.X, d.y, 0.2);

    const BiasNoiseSplit quiet = decompose_bias_noise(
        d.X, Eigen::VectorXd::Zero(25), *d.theta_star, fit, Eigen::MatrixXd::Identity(5, 5));
    CHECK(quiet.Z.cwiseAbs().maxCoeff() == 0.0);

    // M = Sigma_hat^{-1} (n > p): R = 0 exactly
    const Eigen::MatrixXd shat = empirical_covariance(d.X);
    const Eigen::MatrixXd minv = shat.inverse();
    const BiasNoiseSplit exact = decompose_bias_noise(d.X, *d.w, *d.theta_star, fit, minv);
    CHECK(exact.R_inf <= 1e-9);

    CHECK_THROWS_AS(decompose_bias_noise(d.X, Eigen::VectorXd::Zero(3), *d.theta_star, fit,
                                         Eigen::MatrixXd::Identity(5, 5)),
                    DimensionMismatch);
}

TEST_CASE("decompose_bias_noise: Z + R reproduces sqrt(n)(theta_d - theta*)") {
    for (int rep = 0; rep < 20; ++rep) {
        const Dataset d = simulate_dataset(CovarianceModel::circulant(12, 0.8), 36, 3, 0.5,
                                           1.0, 41u + rep);
        const Eigen::MatrixXd omega =
            precision_matrix(build_covariance(CovarianceModel::circulant(12, 0.8)));
        const LassoFit fit = lasso_fit(d.X, d.y, default_lasso_lambda(36, 12, 1.0));
        const DebiasResult res = debias(d.X, d.y, fit, omega, 1.0);
        const BiasNoiseSplit split =
            decompose_bias_noise(d.X, *d.w, *d.theta_star, fit, omega);
        const Eigen::VectorXd lhs = std::sqrt(36.0) * (res.theta_d - *d.theta_star);
        CHECK((lhs - (split.Z + split.R)).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
}

TEST_CASE("known-covariance noise term has standard-normal moments after scaling") {
    // Z_i / (sigma sqrt((Omega Shat Omega)_ii)) is exactly N(0,1) given X.
    const Eigen::Index n = 50, p = 20;
    const Eigen::MatrixXd sigma_mat = build_covariance(CovarianceModel::circulant(p, 0.8));
    const Eigen::MatrixXd omega = precision_matrix(sigma_mat);
    std::vector<double> pooled;
    LassoFit dummy;
    dummy.theta_hat = Eigen::VectorXd::Zero(p);
    for (int rep = 0; rep < 1000; ++rep) {
        RngStream design_rng(77u, static_cast<std::uint64_t>(rep), RngRole::Design);
        RngStream noise_rng(77u, static_cast<std::uint64_t>(rep), RngRole::Noise);
        const Eigen::MatrixXd X = sample_design(sigma_mat, n, design_rng);
        Eigen::VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i) w(i) = noise_rng.normal();
        const BiasNoiseSplit split =
            decompose_bias_noise(X, w, Eigen::VectorXd::Zero(p), dummy, omega);
        const Eigen::MatrixXd shat = empirical_covariance(X);
        const Eigen::VectorXd vdiag = ((omega * shat).cwiseProduct(omega)).rowwise().sum();
        for (Eigen::Index i = 0; i < p; ++i)
            pooled.push_back(split.Z(i) / std::sqrt(vdiag(i)));
    }
    double mean = 0, var = 0, kurt = 0;
    for (double v : pooled) mean += v;
    mean /= pooled.size();
    for (double v : pooled) var += (v - mean) * (v - mean);
    var /= pooled.size();
    for (double v : pooled) kurt += std::pow(v - mean, 4);
    kurt = kurt / pooled.size() / (var * var) - 3.0;
    CHECK(std::abs(mean) <= 0.05);
    CHECK(std::abs(var - 1.0) <= 0.1);
    CHECK(std::abs(kurt) <= 0.3);
}

TEST_CASE("median bias grows like sqrt(s0) in the theorem regime") {
    const Eigen::Index n = 800, p = 400;
    const Eigen::MatrixXd sigma_mat = build_covariance(CovarianceModel::circulant(p, 0.8));
    const Eigen::MatrixXd omega = precision_matrix(sigma_mat);
    const double lambda = default_lasso_lambda(n, p, 1.0);
    std::vector<double> log_s0, log_median;
    for (const Eigen::Index s0 : {5, 10, 20, 40}) {
        std::vector<double> r_inf;
        for (int rep = 0; rep < 11; ++rep) {
            const std::uint64_t seed = 1000u + static_cast<std::uint64_t>(rep);
            RngStream support_rng(seed, static_cast<std::uint64_t>(s0), RngRole::Support);
            RngStream design_rng(seed, static_cast<std::uint64_t>(s0), RngRole::Design);
            RngStream noise_rng(seed, static_cast<std::uint64_t>(s0), RngRole::Noise);
            const SparseSignal sig = make_sparse_signal(p, s0, 0.15, support_rng);
            const Eigen::MatrixXd X = sample_design(sigma_mat, n, design_rng);
            auto [y, w] = sample_response(X, sig.theta, 1.0, noise_rng);
            const LassoFit fit = lasso_fit(X, y, lambda);
            r_inf.push_back(decompose_bias_noise(X, w, sig.theta, fit, omega).R_inf);
        }
        std::sort(r_inf.begin(), r_inf.end());
        log_s0.push_back(std::log(static_cast<double>(s0)));
        log_median.push_back(std::log(r_inf[r_inf.size() / 2]));
    }
    const double slope = oracles::regression_slope(log_s0, log_median);
    CHECK(slope >= 0.3);
    CHECK(slope <= 0.7);
}
