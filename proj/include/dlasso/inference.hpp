#pragma once

#include <Eigen/Dense>
#include <optional>

#include "dlasso/debias.hpp"

namespace dlasso {

struct IntervalSet {
    double alpha = 0.0;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::VectorXd half_width;  // Phi^{-1}(1-alpha/2) sigma_hat sqrt(vdiag_i)/sqrt(n)
};

struct PValueSet {
    Eigen::VectorXd p;  // two-sided, 2(1 - Phi(|z_i|))
};

struct RiskTriple {
    std::optional<double> R_true;  // needs ground truth
    double R_naive = 0.0;          // ||y - X theta_hat||^2/n
    double R_sure = 0.0;           // R_naive + 2 sigma_hat^2 df/n
    Eigen::Index df = 0;           // ||theta_hat||_0
};

struct TwoStepEstimate {
    Eigen::VectorXd theta2;  // eta(theta_d_i; tau_i)
    Eigen::VectorXd tau;     // sqrt(2 sigma^2 Omega_ii log(p/s0)/n)
};

// J_i = theta_d_i +- Phi^{-1}(1-alpha/2) sigma_hat sqrt(variance_diag_i / n).
IntervalSet confidence_intervals(const DebiasResult& result, double alpha);

PValueSet p_values(const DebiasResult& result);

// Soft thresholding of the debiased estimator at the sparsity-adaptive level;
// not adaptive to s0, which the caller must supply.
TwoStepEstimate two_step_estimate(const DebiasResult& result, const Eigen::MatrixXd& omega,
                                  double sigma, Eigen::Index s0);

// Empirical prediction risk plus the degrees-of-freedom correction
// 2 sigma_hat^2 ||theta_hat||_0 / n; R_true is left empty.
RiskTriple sure_estimate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const LassoFit& lasso, double sigma_hat);

// ||X(theta_hat - theta*)||^2/n + ||w||^2/n; simulation only.
double prediction_error(const Eigen::MatrixXd& X, const LassoFit& lasso,
                        const Eigen::VectorXd& theta_star, const Eigen::VectorXd& w);

// Default lambda_bar for the refit route: sqrt(2 log(p)/n), the selector
// default actually used in practice (tighter than the consistency lemma's
// conservative constant).
double noise_refit_default_lambda(Eigen::Index n, Eigen::Index p);

// Scaled Lasso for selection, then OLS on the selected columns:
// sigma_hat = ||y - X theta^LS||/sqrt(n). Empty selection falls back to
// ||y||/sqrt(n).
double noise_refit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   double lambda_bar = -1.0);

}  // namespace dlasso
