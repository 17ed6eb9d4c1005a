#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "dlasso/designs.hpp"
#include "dlasso/diagnostics.hpp"
#include "dlasso/errors.hpp"
#include "dlasso/gaussian.hpp"
#include "oracles.hpp"

using namespace dlasso;

TEST_CASE("rho_subset_norm: identity, lemma identity, enumeration oracle") {
    const Eigen::MatrixXd id5 = Eigen::MatrixXd::Identity(5, 5);
    for (int k : {1, 2, 3, 5})
        CHECK(rho_subset_norm(id5, k).rho == doctest::Approx(1.0).epsilon(1e-12));

    const Eigen::MatrixXd sigma = build_covariance(CovarianceModel::circulant(6, 0.8));
    const SubsetNormReport full = rho_subset_norm(sigma, 6);
    const double inv_inf = sigma.inverse().cwiseAbs().rowwise().sum().maxCoeff();
    CHECK(std::abs(full.rho - inv_inf) <= 1e-10);

    const SubsetNormReport r3 = rho_subset_norm(sigma, 3);
    CHECK(r3.method == SubsetNormReport::Method::ExactEnumeration);
    CHECK(r3.rho == doctest::Approx(oracles::rho_enumeration(sigma, 3)).epsilon(1e-12));

    // rho(A,1) = max_i 1/A_ii
    Eigen::MatrixXd diag_test = sigma;
    CHECK(rho_subset_norm(diag_test, 1).rho ==
          doctest::Approx((1.0 / sigma.diagonal().array()).maxCoeff()).epsilon(1e-12));
}

TEST_CASE("rho_subset_norm: monotone in k and bounded by sqrt(k)/sigma_min") {
    const Eigen::MatrixXd sigma = build_covariance(CovarianceModel::circulant(6, 0.7));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    const double smin = es.eigenvalues().minCoeff();
    double prev = 0.0;
    for (int k = 1; k <= 6; ++k) {
        const double rho = rho_subset_norm(sigma, k).rho;
        CHECK(rho >= prev - 1e-12);
        CHECK(rho <= std::sqrt(static_cast<double>(k)) / smin + 1e-9);
        prev = rho;
    }
    CHECK_THROWS_AS(rho_subset_norm(sigma, 0), BadConfig);
    CHECK_THROWS_AS(rho_subset_norm(sigma, 7), BadConfig);
}

TEST_CASE("rho_subset_norm: large instances fall back to a labeled lower bound") {
    const Eigen::MatrixXd sigma = build_covariance(CovarianceModel::circulant(40, 0.8));
    const SubsetNormReport rep = rho_subset_norm(sigma, 8);  // C(40,8) > 1e6
    CHECK(rep.method == SubsetNormReport::Method::GreedyLowerBound);
    CHECK(rep.rho >= rho_subset_norm(sigma, 1).rho - 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    CHECK(rep.rho <= std::sqrt(8.0) / es.eigenvalues().minCoeff() + 1e-9);
}

TEST_CASE("compatibility constant: identity, grid oracle, homogeneity") {
    const Eigen::MatrixXd id6 = Eigen::MatrixXd::Identity(6, 6);
    const double phi_id = compatibility_constant_estimate(id6, {0, 2, 4});
    CHECK(phi_id >= 1.0 - 1e-6);
    CHECK(phi_id <= 1.05);

    Eigen::MatrixXd s2(2, 2);
    s2 << 1.0, 0.9, 0.9, 1.0;
    const double got = compatibility_constant_estimate(s2, {0});
    const double ref = oracles::compatibility_grid_2d(s2, 0, 3.0);
    CHECK(std::abs(got - ref) <= 0.02 * ref);

    const double scaled = compatibility_constant_estimate(2.0 * s2, {0});
    CHECK(scaled == doctest::Approx(2.0 * got).epsilon(1e-12));

    CHECK_THROWS_AS(compatibility_constant_estimate(id6, {}), EmptySupport);
}

TEST_CASE("gauss_hermite: moments and a soft-threshold expectation") {
    std::vector<double> x, w;
    gauss_hermite(61, x, w);
    double s0 = 0, s2 = 0, s4 = 0, st = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s0 += w[i];
        s2 += w[i] * x[i] * x[i];
        s4 += w[i] * x[i] * x[i] * x[i] * x[i];
        const double e = soft_threshold(x[i], 1.0);
        st += w[i] * e * e;
    }
    CHECK(std::abs(s0 - 1.0) < 1e-12);
    CHECK(std::abs(s2 - 1.0) < 1e-11);
    CHECK(std::abs(s4 - 3.0) < 1e-10);
    // E[eta(Z;1)^2] = 2[(1+1) Phi(-1) - phi(1)]; the kink at |z| = 1 limits
    // the rule to ~1e-4 absolute at this order, plenty for its 25% role.
    const double closed = 2.0 * (2.0 * normal_cdf(-1.0) - normal_pdf(1.0));
    CHECK(std::abs(st - closed) < 1e-3);
}

TEST_CASE("kurtosis sweep: exact-normal calibration and determinism") {
    KurtosisSweepConfig cfg;
    cfg.p = 160;
    cfg.epsilon = 0.0;
    cfg.delta_grid = {3.0};  // n = 480 > p
    cfg.replicates = 300;
    cfg.cov_model = CovarianceModel::circulant(160, 0.8);
    cfg.amplitude = 0.0;
    cfg.lambda_kappa = -1.0;  // OLS path
    cfg.m_mode = MMode::KnownOmega;
    cfg.seed = 12345u;
    const KurtosisSweep sweep = kurtosis_sweep(cfg);
    REQUIRE(sweep.deltas.size() == 1);
    CHECK(std::abs(sweep.mean_kurtosis[0]) <= 3.0 * sweep.se_kurtosis[0]);
    CHECK(sweep.delta_c.has_value());

    cfg.threads = 1;
    const KurtosisSweep one = kurtosis_sweep(cfg);
    cfg.threads = 4;
    const KurtosisSweep four = kurtosis_sweep(cfg);
    CHECK(one.mean_kurtosis[0] == four.mean_kurtosis[0]);
    CHECK(one.se_kurtosis[0] == four.se_kurtosis[0]);
}

TEST_CASE("kurtosis sweep: config validation") {
    KurtosisSweepConfig cfg;
    cfg.p = 20;
    cfg.delta_grid = {0.5, 0.4};
    CHECK_THROWS_AS(kurtosis_sweep(cfg), BadConfig);
    cfg.delta_grid = {0.5};
    cfg.replicates = 1;
    CHECK_THROWS_AS(kurtosis_sweep(cfg), BadConfig);
}

TEST_CASE("coverage experiment: interval length shrinks like 1/sqrt(n)") {
    CoverageConfig base;
    base.p = 50;
    base.s0 = 3;
    base.amplitude = 0.3;
    base.cov_model = CovarianceModel::identity(50);
    base.replicates = 40;
    base.use_true_sigma = true;
    base.seed = 77u;

    base.n = 400;
    const CoverageReport r1 = coverage_experiment(base);
    base.n = 800;
    const CoverageReport r2 = coverage_experiment(base);
    const double ratio = r2.average_length / r1.average_length;
    CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.15));
    CHECK(r1.coverage.minCoeff() >= 0.0);
    CHECK(r1.coverage.maxCoeff() <= 1.0);
    CHECK(r1.average_length > 0.0);
}

TEST_CASE("risk curve: naive never exceeds SURE; far tail degenerates to ||y||^2/n") {
    RiskCurveConfig cfg;
    cfg.n = 60;
    cfg.p = 30;
    cfg.s0 = 3;
    cfg.amplitude = 0.5;
    cfg.cov_model = CovarianceModel::identity(30);
    cfg.replicates = 5;
    cfg.seed = 31u;
    cfg.lambda_grid = {0.05, 0.1, 0.2, 0.4, 0.8, 5.0};
    const RiskCurve curve = risk_curve(cfg);
    for (std::size_t j = 0; j < curve.lambda.size(); ++j)
        CHECK(curve.r_naive[j] <= curve.r_sure[j] + 1e-15);
    // lambda = 5.0 is far beyond the null threshold: theta_hat = 0, df = 0
    CHECK(curve.r_naive.back() == curve.r_sure.back());
}

TEST_CASE("denoiser check: trivial noiseless agreement") {
    DenoiserCheckConfig cfg;
    cfg.n = 100;
    cfg.p = 30;
    cfg.s0 = 3;
    cfg.amplitude = 2.0;
    cfg.sigma = 1.0;
    cfg.replicates = 10;
    cfg.cov_model = CovarianceModel::identity(30);
    cfg.seed = 91u;
    const DenoiserCheckReport rep = denoiser_approximation_check(cfg);
    CHECK(rep.ratios.size() == 10);
    CHECK(rep.median_ratio >= 0.0);
    REQUIRE(rep.quadrature_prediction.has_value());
    CHECK(*rep.quadrature_prediction > 0.0);
}
