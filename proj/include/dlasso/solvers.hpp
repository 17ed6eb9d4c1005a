#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace dlasso {

// Exact scalar soft threshold (|x|-tau)_+ sign(x); returns 0.0 (not -0.0)
// whenever |x| <= tau.
double soft_threshold(double x, double tau);

struct LassoOptions {
    int max_sweeps = 100000;
    double gap_tol = 1e-8;                      // absolute, on the objective scale
    std::optional<Eigen::VectorXd> warm_start;  // convergence target is warm-start independent
};

struct LassoFit {
    Eigen::VectorXd theta_hat;
    double lambda = 0.0;
    std::vector<Eigen::Index> support;  // coordinates with theta_hat != 0
    int iterations = 0;                 // full coordinate sweeps
    double gap = 0.0;                   // duality gap at exit
    double objective = 0.0;             // (1/2n)||y - X theta||^2 + lambda ||theta||_1
    bool converged = true;              // false iff max_sweeps hit with gap > gap_tol
};

// Cyclic coordinate descent on (1/2n)||y - X theta||_2^2 + lambda||theta||_1,
// stopping when the Fenchel duality gap drops below gap_tol.
LassoFit lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                   const LassoOptions& opts = {});

// Same solver in Gram form: (1/2) theta^T A theta - b^T theta + c
// + lambda ||theta||_1 with A PSD (A = X^T X/n, b = X^T y/n, c = ||y||^2/2n
// recovers the Lasso). Used where the quadratic is given directly.
LassoFit quad_lasso_fit(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double c,
                        double lambda, const LassoOptions& opts = {});

struct ScaledLassoFit {
    Eigen::VectorXd theta_hat;
    double sigma_hat = 0.0;
    double lambda_bar = 0.0;
    int outer_iterations = 0;
    LassoFit fit;  // Lasso state at the final sigma_hat
};

// Default lambda_bar = 10 sqrt(2 log(p)/n) (the consistency lemma's value).
double scaled_lasso_default_lambda(Eigen::Index n, Eigen::Index p);

// Alternating minimization of the jointly convex scaled-Lasso objective
// ||y - X theta||^2/(2 sigma n) + sigma/2 + lambda_bar ||theta||_1:
// a Lasso step at lambda = sigma_hat * lambda_bar, then
// sigma_hat = ||y - X theta||/sqrt(n), until sigma_hat is stationary.
ScaledLassoFit scaled_lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                double lambda_bar = -1.0, const LassoOptions& opts = {});

struct PrecisionEstimate {
    Eigen::MatrixXd gamma;       // p x (p-1); row i = node-wise coefficients for column i
    Eigen::VectorXd tau_sq;      // tau_i^2 = (x_i - X_{~i} gamma_i)^T x_i / n
    Eigen::MatrixXd C_hat;       // unit diagonal, -gamma off-diagonal
    Eigen::MatrixXd M;           // T^{-2} C_hat
    double lambda_tilde = 0.0;
};

struct NodewiseOptions {
    LassoOptions lasso;
    int threads = 0;  // 0 = use the global worker-pool default
};

double nodewise_default_lambda(Eigen::Index n, Eigen::Index p, double K = 2.0);

// p independent L1 regressions of each column on the rest; assembles the
// debiasing matrix M = T^{-2} C_hat. Throws TauNonPositive when some
// tau_i^2 <= 0 (lambda_tilde too small for the collinearity present).
PrecisionEstimate nodewise_lasso(const Eigen::MatrixXd& X, double lambda_tilde,
                                 const NodewiseOptions& opts = {});

// argmin_theta (1/2)||Sigma^{1/2}(theta - z)||^2 + lambda||theta||_1.
// For Sigma = I this is componentwise soft thresholding.
Eigen::VectorXd sigma_denoiser(const Eigen::VectorXd& z, const Eigen::MatrixXd& sigma,
                               double lambda, const LassoOptions& opts = {});

// kappa * sigma * sqrt(log(p)/n); kappa defaults to 8, the lower end of the
// admissible range.
double default_lasso_lambda(Eigen::Index n, Eigen::Index p, double sigma, double kappa = 8.0);

}  // namespace dlasso
