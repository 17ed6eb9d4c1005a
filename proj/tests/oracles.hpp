#pragma once

// Independent reference implementations used only to check the library.
// Nothing here may call the solver paths under test.

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace oracles {

// Proximal gradient (ISTA) on (1/2n)||y - X theta||^2 + lambda ||theta||_1
// with step 1/L, run to stagnation.
Eigen::VectorXd prox_gradient_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    double lambda, int max_iter = 200000,
                                    double change_tol = 1e-14);

// Dense multilevel grid search for p in {1, 2}.
Eigen::VectorXd grid_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                           double radius = 3.0);

// Same objective family in quadratic form (for the covariance denoiser).
Eigen::VectorXd grid_quad_lasso(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double c,
                                double lambda, double radius = 3.0);

// rho(A,k) by bitmask enumeration over all subsets of size <= k (p <= 20),
// inverting with Eigen's LU-based inverse.
double rho_enumeration(const Eigen::MatrixXd& A, int k);

// phi^2(Sigma, S) for p = 2, S = {s}, scanning the cone by angle.
double compatibility_grid_2d(const Eigen::MatrixXd& sigma, int s, double L);

// Kolmogorov-Smirnov distance between a sample and a cdf.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

// Least-squares slope of y against x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oracles
