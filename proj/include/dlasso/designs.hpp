#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dlasso/rng.hpp"

namespace dlasso {

// Population covariance of the Gaussian design. The realized matrix must be
// SPD with unit-bounded diagonal (the normalization condition of the known-
// covariance limit theorem).
struct CovarianceModel {
    enum class Kind { Identity, Circulant, BlockDiagonal, Dense };

    Kind kind = Kind::Identity;
    Eigen::Index p = 0;
    double r = 0.0;                // Circulant: Sigma_ij = r^|i-j|, 0 < r < 1
    Eigen::MatrixXd block;         // BlockDiagonal: repeated SPD block
    Eigen::Index count = 0;        // BlockDiagonal: number of blocks
    Eigen::MatrixXd dense;         // Dense: user matrix, validated not repaired

    static CovarianceModel identity(Eigen::Index p);
    static CovarianceModel circulant(Eigen::Index p, double r);
    static CovarianceModel block_diagonal(Eigen::MatrixXd block, Eigen::Index count);
    static CovarianceModel make_dense(Eigen::MatrixXd sigma);
};

// One sampled instance of the linear model y = X theta* + w. Ground-truth
// fields are optional so the same type carries both simulated and user data.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::optional<Eigen::VectorXd> theta_star;
    std::optional<Eigen::VectorXd> w;
    std::optional<double> sigma;
    std::uint64_t seed = 0;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }
};

struct SparseSignal {
    Eigen::VectorXd theta;
    std::vector<Eigen::Index> support;
    Eigen::Index s0 = 0;
};

Eigen::MatrixXd build_covariance(const CovarianceModel& model);

// Omega = Sigma^{-1} via Cholesky. Throws NotSPD on factorization failure.
Eigen::MatrixXd precision_matrix(const Eigen::MatrixXd& sigma);

// n i.i.d. rows from N(0, Sigma), generated as L z with L the lower Cholesky
// factor. Deterministic given the stream.
Eigen::MatrixXd sample_design(const Eigen::MatrixXd& sigma, Eigen::Index n, RngStream& rng);
Eigen::MatrixXd sample_design(const Eigen::MatrixXd& sigma, Eigen::Index n, std::uint64_t seed);

// Draws w ~ N(0, sigma^2 I) and returns (y, w) with y = X theta* + w.
std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_response(const Eigen::MatrixXd& X,
                                                            const Eigen::VectorXd& theta_star,
                                                            double sigma, RngStream& rng);
std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_response(const Eigen::MatrixXd& X,
                                                            const Eigen::VectorXd& theta_star,
                                                            double sigma, std::uint64_t seed);

// X^T X / n.
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& X);

// s0 distinct uniformly-chosen coordinates set to `amplitude`, rest zero.
SparseSignal make_sparse_signal(Eigen::Index p, Eigen::Index s0, double amplitude, RngStream& rng);
SparseSignal make_sparse_signal(Eigen::Index p, Eigen::Index s0, double amplitude, std::uint64_t seed);

// Full simulation of one dataset: support, design and noise come from
// separate role-tagged substreams of (seed, stream).
Dataset simulate_dataset(const CovarianceModel& model, Eigen::Index n, Eigen::Index s0,
                         double amplitude, double sigma, std::uint64_t seed,
                         std::uint64_t stream = 0);

}  // namespace dlasso
