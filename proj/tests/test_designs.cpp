#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "dlasso/designs.hpp"
#include "dlasso/errors.hpp"

using namespace dlasso;

TEST_CASE("build_covariance: identity and circulant entries") {
    const Eigen::MatrixXd id = build_covariance(CovarianceModel::identity(3));
    CHECK(id.isApprox(Eigen::MatrixXd::Identity(3, 3), 0.0));

    const Eigen::MatrixXd c = build_covariance(CovarianceModel::circulant(3, 0.8));
    Eigen::MatrixXd expect(3, 3);
    expect << 1.0, 0.8, 0.64, 0.8, 1.0, 0.8, 0.64, 0.8, 1.0;
    CHECK((c - expect).cwiseAbs().maxCoeff() < 1e-15);
    // entries equal r^|i-j| as iterated products of the stored r, bit-exact
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double power = 1.0;
            for (int k = 0; k < std::abs(i - j); ++k) power *= 0.8;
            CHECK(c(i, j) == power);
        }

    const Eigen::MatrixXd h = build_covariance(CovarianceModel::circulant(4, 0.5));
    CHECK(h(0, 3) == 0.125);  // exact: 0.5 is a power of two
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(h(i, j) == std::pow(0.5, std::abs(i - j)));
}

TEST_CASE("build_covariance: block diagonal and validation failures") {
    Eigen::MatrixXd block(2, 2);
    block << 1.0, 0.4, 0.4, 1.0;
    const Eigen::MatrixXd s = build_covariance(CovarianceModel::block_diagonal(block, 3));
    CHECK(s.rows() == 6);
    CHECK(s(0, 1) == 0.4);
    CHECK(s(0, 2) == 0.0);

    Eigen::MatrixXd not_spd(2, 2);
    not_spd << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
    CHECK_THROWS_AS(build_covariance(CovarianceModel::make_dense(not_spd)), NotSPD);

    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.2, 0.1, 1.0;
    CHECK_THROWS_AS(build_covariance(CovarianceModel::make_dense(asym)), NotSPD);

    Eigen::MatrixXd big_diag(2, 2);
    big_diag << 1.5, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(build_covariance(CovarianceModel::make_dense(big_diag)), DiagonalTooLarge);

    CHECK_THROWS_AS(build_covariance(CovarianceModel::circulant(3, 1.2)), BadConfig);
}

TEST_CASE("precision_matrix: closed forms and round trips") {
    const Eigen::MatrixXd id3 = Eigen::MatrixXd::Identity(3, 3);
    CHECK(precision_matrix(id3).isApprox(id3, 1e-14));

    Eigen::MatrixXd s(2, 2);
    s << 1.0, 0.5, 0.5, 1.0;
    Eigen::MatrixXd expect(2, 2);
    expect << 1.0, -0.5, -0.5, 1.0;
    expect /= 0.75;
    CHECK((precision_matrix(s) - expect).cwiseAbs().maxCoeff() < 1e-12);

    for (int p : {8, 50, 200, 500}) {
        const Eigen::MatrixXd sigma = build_covariance(CovarianceModel::circulant(p, 0.8));
        const Eigen::MatrixXd omega = precision_matrix(sigma);
        CHECK((sigma * omega - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(omega.isApprox(omega.transpose(), 1e-12));
    }
}

TEST_CASE("circulant precision is tridiagonal (s_Omega = 2)") {
    const Eigen::MatrixXd sigma = build_covariance(CovarianceModel::circulant(8, 0.8));
    const Eigen::MatrixXd omega = precision_matrix(sigma);
    for (int i = 0; i < 8; ++i) {
        int off = 0;
        for (int j = 0; j < 8; ++j)
            if (j != i && std::abs(omega(i, j)) > 1e-10) ++off;
        CHECK(off <= 2);
    }
}

TEST_CASE("sample_design: determinism and Monte-Carlo sanity") {
    const Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd a = sample_design(id2, 50, 1234u);
    const Eigen::MatrixXd b = sample_design(id2, 50, 1234u);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::MatrixXd X = sample_design(id2, 10000, 5u);
    const Eigen::MatrixXd cov = (X.transpose() * X) / 10000.0;
    CHECK((cov - id2).cwiseAbs().maxCoeff() < 0.05);

    const Eigen::MatrixXd sigma = build_covariance(CovarianceModel::circulant(3, 0.8));
    const Eigen::MatrixXd Xc = sample_design(sigma, 10000, 6u);
    const double c01 = (Xc.col(0).dot(Xc.col(1)) / 10000.0) /
                       std::sqrt((Xc.col(0).squaredNorm() / 10000.0) *
                                 (Xc.col(1).squaredNorm() / 10000.0));
    CHECK(std::abs(c01 - 0.8) < 0.03);
}

TEST_CASE("sample_response: exactness, reproducibility, moments") {
    const Eigen::MatrixXd X = sample_design(Eigen::MatrixXd::Identity(4, 4), 6, 9u);
    Eigen::VectorXd theta(4);
    theta << 1.0, -2.0, 0.0, 0.5;
    auto [y0, w0] = sample_response(X, theta, 0.0, 11u);
    CHECK((y0 - X * theta).cwiseAbs().maxCoeff() == 0.0);
    CHECK(w0.cwiseAbs().maxCoeff() == 0.0);

    auto [y1, w1] = sample_response(X, theta, 1.3, 11u);
    auto [y2, w2] = sample_response(X, theta, 1.3, 11u);
    CHECK((w1 - w2).cwiseAbs().maxCoeff() == 0.0);
    CHECK((y1 - (X * theta + w1)).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::MatrixXd Xbig = sample_design(Eigen::MatrixXd::Identity(2, 2), 10000, 13u);
    auto [yb, wb] = sample_response(Xbig, Eigen::VectorXd::Zero(2), 1.0, 17u);
    CHECK(std::abs(yb.mean()) < 0.05);
    CHECK(std::abs(yb.squaredNorm() / 10000.0 - 1.0) < 0.05);

    CHECK_THROWS_AS(sample_response(X, Eigen::VectorXd::Zero(3), 1.0, 1u), DimensionMismatch);
}

TEST_CASE("empirical_covariance matches the elementwise oracle") {
    const Eigen::MatrixXd id4 = Eigen::MatrixXd::Identity(4, 4);
    CHECK((empirical_covariance(id4) - id4 / 4.0).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd row(1, 3);
    row << 2.0, -1.0, 0.5;
    const Eigen::MatrixXd outer = row.transpose() * row;
    CHECK((empirical_covariance(row) - outer).cwiseAbs().maxCoeff() < 1e-15);

    const Eigen::MatrixXd X = sample_design(Eigen::MatrixXd::Identity(3, 3), 5, 21u);
    const Eigen::MatrixXd got = empirical_covariance(X);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double s = 0;
            for (int i = 0; i < 5; ++i) s += X(i, a) * X(i, b);
            CHECK(std::abs(got(a, b) - s / 5.0) < 1e-12);
        }
}

TEST_CASE("make_sparse_signal: support structure and edge cases") {
    const SparseSignal zero = make_sparse_signal(5, 0, 2.0, 3u);
    CHECK(zero.theta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(zero.support.empty());

    const SparseSignal full = make_sparse_signal(4, 4, 0.7, 3u);
    CHECK((full.theta.array() == 0.7).all());

    const SparseSignal sig = make_sparse_signal(3000, 600, 0.15, 8u);
    CHECK(sig.s0 == 600);
    CHECK(static_cast<Eigen::Index>(sig.support.size()) == 600);
    Eigen::Index nonzero = 0;
    for (Eigen::Index i = 0; i < 3000; ++i)
        if (sig.theta(i) != 0.0) {
            ++nonzero;
            CHECK(sig.theta(i) == 0.15);
        }
    CHECK(nonzero == 600);
    for (std::size_t k = 1; k < sig.support.size(); ++k)
        CHECK(sig.support[k] > sig.support[k - 1]);

    CHECK_THROWS_AS(make_sparse_signal(3, 4, 1.0, 0u), BadSparsity);
}

TEST_CASE("simulate_dataset ties the pieces together exactly") {
    const Dataset d =
        simulate_dataset(CovarianceModel::circulant(20, 0.8), 30, 4, 0.5, 1.2, 99u);
    REQUIRE(d.theta_star.has_value());
    REQUIRE(d.w.has_value());
    CHECK((d.y - (d.X * *d.theta_star + *d.w)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.n() == 30);
    CHECK(d.p() == 20);
    const Dataset d2 =
        simulate_dataset(CovarianceModel::circulant(20, 0.8), 30, 4, 0.5, 1.2, 99u);
    CHECK((d.X - d2.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK((d.y - d2.y).cwiseAbs().maxCoeff() == 0.0);
}
