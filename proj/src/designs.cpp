#include "dlasso/designs.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "dlasso/errors.hpp"

namespace dlasso {

namespace {

// Cholesky with no jitter: user matrices are validated, never repaired.
Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& sigma, const char* what) {
    if (sigma.rows() != sigma.cols())
        throw DimensionMismatch(std::string(what) + " matrix is not square");
    if (!sigma.isApprox(sigma.transpose(), 1e-12))
        throw NotSPD(std::string(what) + " matrix is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw NotSPD(std::string(what) + " matrix failed Cholesky factorization");
    return llt;
}

void check_diagonal(const Eigen::MatrixXd& sigma) {
    for (Eigen::Index i = 0; i < sigma.rows(); ++i)
        if (sigma(i, i) > 1.0 + 1e-12)
            throw DiagonalTooLarge("Sigma(" + std::to_string(i) + "," + std::to_string(i) +
                                   ") = " + std::to_string(sigma(i, i)) + " exceeds 1");
}

}  // namespace

CovarianceModel CovarianceModel::identity(Eigen::Index p) {
    CovarianceModel m;
    m.kind = Kind::Identity;
    m.p = p;
    return m;
}

CovarianceModel CovarianceModel::circulant(Eigen::Index p, double r) {
    CovarianceModel m;
    m.kind = Kind::Circulant;
    m.p = p;
    m.r = r;
    return m;
}

CovarianceModel CovarianceModel::block_diagonal(Eigen::MatrixXd block, Eigen::Index count) {
    CovarianceModel m;
    m.kind = Kind::BlockDiagonal;
    m.block = std::move(block);
    m.count = count;
    m.p = m.block.rows() * count;
    return m;
}

CovarianceModel CovarianceModel::make_dense(Eigen::MatrixXd sigma) {
    CovarianceModel m;
    m.kind = Kind::Dense;
    m.dense = std::move(sigma);
    m.p = m.dense.rows();
    return m;
}

Eigen::MatrixXd build_covariance(const CovarianceModel& model) {
    if (model.p < 1) throw BadConfig("covariance dimension must be positive");
    switch (model.kind) {
        case CovarianceModel::Kind::Identity:
            return Eigen::MatrixXd::Identity(model.p, model.p);
        case CovarianceModel::Kind::Circulant: {
            if (!(model.r > 0.0 && model.r < 1.0))
                throw BadConfig("circulant parameter r must lie in (0,1)");
            // Powers by iterated product so Sigma_ij == r^|i-j| reproduces
            // bit-for-bit however the offset is reached.
            std::vector<double> pow_r(static_cast<std::size_t>(model.p));
            pow_r[0] = 1.0;
            for (Eigen::Index k = 1; k < model.p; ++k)
                pow_r[static_cast<std::size_t>(k)] =
                    pow_r[static_cast<std::size_t>(k - 1)] * model.r;
            Eigen::MatrixXd sigma(model.p, model.p);
            for (Eigen::Index i = 0; i < model.p; ++i)
                for (Eigen::Index j = 0; j < model.p; ++j)
                    sigma(i, j) = pow_r[static_cast<std::size_t>(std::abs(i - j))];
            return sigma;
        }
        case CovarianceModel::Kind::BlockDiagonal: {
            if (model.count < 1) throw BadConfig("block count must be positive");
            checked_llt(model.block, "block");
            check_diagonal(model.block);
            const Eigen::Index b = model.block.rows();
            Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(b * model.count, b * model.count);
            for (Eigen::Index k = 0; k < model.count; ++k)
                sigma.block(k * b, k * b, b, b) = model.block;
            return sigma;
        }
        case CovarianceModel::Kind::Dense: {
            checked_llt(model.dense, "dense covariance");
            check_diagonal(model.dense);
            return model.dense;
        }
    }
    throw BadConfig("unknown covariance kind");
}

Eigen::MatrixXd precision_matrix(const Eigen::MatrixXd& sigma) {
    auto llt = checked_llt(sigma, "covariance");
    Eigen::MatrixXd omega = llt.solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.rows()));
    // Solve output is symmetric only to solver precision; symmetrize exactly.
    omega = ((omega + omega.transpose()) / 2.0).eval();
    return omega;
}

Eigen::MatrixXd sample_design(const Eigen::MatrixXd& sigma, Eigen::Index n, RngStream& rng) {
    if (n < 1) throw BadConfig("sample size must be positive");
    auto llt = checked_llt(sigma, "covariance");
    const Eigen::MatrixXd L = llt.matrixL();
    const Eigen::Index p = sigma.rows();
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd z(p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
        X.row(i) = (L * z).transpose();
    }
    return X;
}

Eigen::MatrixXd sample_design(const Eigen::MatrixXd& sigma, Eigen::Index n, std::uint64_t seed) {
    RngStream rng(seed, 0, RngRole::Design);
    return sample_design(sigma, n, rng);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_response(const Eigen::MatrixXd& X,
                                                            const Eigen::VectorXd& theta_star,
                                                            double sigma, RngStream& rng) {
    if (theta_star.size() != X.cols())
        throw DimensionMismatch("theta_star length does not match design columns");
    if (sigma < 0.0) throw BadConfig("sigma must be nonnegative");
    Eigen::VectorXd w(X.rows());
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = sigma * rng.normal();
    Eigen::VectorXd y = X * theta_star + w;
    return {std::move(y), std::move(w)};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_response(const Eigen::MatrixXd& X,
                                                            const Eigen::VectorXd& theta_star,
                                                            double sigma, std::uint64_t seed) {
    RngStream rng(seed, 0, RngRole::Noise);
    return sample_response(X, theta_star, sigma, rng);
}

Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& X) {
    const double n = static_cast<double>(X.rows());
    Eigen::MatrixXd s = (X.transpose() * X) / n;
    return ((s + s.transpose()) / 2.0).eval();
}

SparseSignal make_sparse_signal(Eigen::Index p, Eigen::Index s0, double amplitude,
                                RngStream& rng) {
    if (s0 < 0 || s0 > p)
        throw BadSparsity("s0 = " + std::to_string(s0) + " outside [0, p]; p = " +
                          std::to_string(p));
    // Partial Fisher-Yates: the first s0 slots end up a uniform sample
    // without replacement.
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
    for (Eigen::Index i = 0; i < p; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index i = 0; i < s0; ++i) {
        const auto j = i + static_cast<Eigen::Index>(
                               rng.uniform_below(static_cast<std::uint64_t>(p - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    SparseSignal sig;
    sig.s0 = s0;
    sig.support.assign(idx.begin(), idx.begin() + s0);
    std::sort(sig.support.begin(), sig.support.end());
    sig.theta = Eigen::VectorXd::Zero(p);
    for (auto i : sig.support) sig.theta(i) = amplitude;
    return sig;
}

SparseSignal make_sparse_signal(Eigen::Index p, Eigen::Index s0, double amplitude,
                                std::uint64_t seed) {
    RngStream rng(seed, 0, RngRole::Support);
    return make_sparse_signal(p, s0, amplitude, rng);
}

Dataset simulate_dataset(const CovarianceModel& model, Eigen::Index n, Eigen::Index s0,
                         double amplitude, double sigma, std::uint64_t seed,
                         std::uint64_t stream) {
    const Eigen::MatrixXd sigma_mat = build_covariance(model);
    RngStream support_rng(seed, stream, RngRole::Support);
    RngStream design_rng(seed, stream, RngRole::Design);
    RngStream noise_rng(seed, stream, RngRole::Noise);
    SparseSignal sig = make_sparse_signal(model.p, s0, amplitude, support_rng);
    Dataset ds;
    ds.X = sample_design(sigma_mat, n, design_rng);
    auto [y, w] = sample_response(ds.X, sig.theta, sigma, noise_rng);
    ds.y = std::move(y);
    ds.w = std::move(w);
    ds.theta_star = std::move(sig.theta);
    ds.sigma = sigma;
    ds.seed = seed;
    return ds;
}

}  // namespace dlasso
