#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>

#include "dlasso/designs.hpp"
#include "dlasso/solvers.hpp"

namespace dlasso {

enum class DebiasMode { KnownOmega, Nodewise, SampleSplit };

struct DebiasResult {
    Eigen::VectorXd theta_d;        // theta_hat + M X^T (y - X theta_hat)/n
    Eigen::MatrixXd M;
    Eigen::VectorXd variance_diag;  // diag(M Sigma_hat M^T)
    double sigma_hat = 0.0;
    Eigen::Index n = 0;             // samples behind the correction term
    LassoFit lasso;
    DebiasMode mode = DebiasMode::KnownOmega;
};

struct BiasNoiseSplit {
    Eigen::VectorXd Z;   // M X^T w / sqrt(n)
    Eigen::VectorXd R;   // sqrt(n) (M Sigma_hat - I)(theta* - theta_hat)
    double R_inf = 0.0;  // ||R||_inf
};

// The one-step correction applied verbatim; variance_diag is filled from the
// empirical covariance of X. sigma_hat is recorded as passed (callers that
// need an estimate use the *_known / *_nodewise drivers).
DebiasResult debias(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoFit& lasso,
                    const Eigen::MatrixXd& M, double sigma_hat = 0.0);

// Lasso at `lambda` followed by debiasing with M = Omega. When sigma is not
// supplied, sigma_hat comes from the scaled Lasso.
DebiasResult debias_known(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                          const Eigen::MatrixXd& omega,
                          std::optional<double> sigma = std::nullopt,
                          const LassoOptions& opts = {});

// As above with M from the node-wise Lasso at lambda_tilde.
DebiasResult debias_nodewise(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                             double lambda_tilde, std::optional<double> sigma = std::nullopt,
                             const LassoOptions& opts = {});

struct SplitMSource {
    enum class Kind { KnownOmega, NodewiseOnA } kind = Kind::NodewiseOnA;
    Eigen::MatrixXd omega;        // used when kind == KnownOmega
    double lambda_tilde = 0.0;    // used when kind == NodewiseOnA; <=0 -> default
    static SplitMSource known(Eigen::MatrixXd omega_in) {
        SplitMSource s;
        s.kind = Kind::KnownOmega;
        s.omega = std::move(omega_in);
        return s;
    }
    static SplitMSource nodewise_on_a(double lambda_tilde_in = 0.0) {
        SplitMSource s;
        s.kind = Kind::NodewiseOnA;
        s.lambda_tilde = lambda_tilde_in;
        return s;
    }
};

// Sample-splitting estimator: Lasso on batch B, correction (and M, when
// node-wise) from batch A. sigma_hat from the scaled Lasso on batch B unless
// supplied.
DebiasResult debias_split(const Dataset& batch_a, const Dataset& batch_b, double lambda,
                          const SplitMSource& m_source,
                          std::optional<double> sigma = std::nullopt,
                          const LassoOptions& opts = {});

// Seeded uniform permutation split; with an odd total the estimation batch
// (B, second return) takes the extra sample.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, std::uint64_t seed);

// Exact algebraic decomposition sqrt(n)(theta_d - theta*) = Z + R; requires
// the simulation ground truth (w, theta*).
BiasNoiseSplit decompose_bias_noise(const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                                    const Eigen::VectorXd& theta_star, const LassoFit& lasso,
                                    const Eigen::MatrixXd& M);

}  // namespace dlasso
