#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlasso/debias.hpp"
#include "dlasso/designs.hpp"
#include "dlasso/inference.hpp"

namespace dlasso {

// ---------------------------------------------------------------------------
// Covariance regularity diagnostics
// ---------------------------------------------------------------------------

struct SubsetNormReport {
    int k = 0;
    double rho = 0.0;
    enum class Method { ExactEnumeration, GreedyLowerBound } method = Method::ExactEnumeration;
};

// rho(A,k) = max over |T| <= k of the l_inf operator norm of (A_TT)^{-1}.
// Exact enumeration while the subset count stays below 1e6; beyond that a
// greedy grow + random-restart search returns a lower bound, labeled as such.
SubsetNormReport rho_subset_norm(const Eigen::MatrixXd& A, int k);

// Upper-bound estimate of the compatibility constant phi^2(Sigma_hat, S):
// multi-start projected gradient over the cone ||theta_{S^c}||_1 <= L ||theta_S||_1
// with the normalization ||theta_S||_1 = 1. Any feasible point upper-bounds
// the minimum, so the true phi^2 <= returned value.
double compatibility_constant_estimate(const Eigen::MatrixXd& sigma_hat,
                                       const std::vector<Eigen::Index>& S, double L = 3.0,
                                       int restarts = 200, int iterations = 500,
                                       std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Kurtosis sweep (samples-per-parameter transition)
// ---------------------------------------------------------------------------

enum class MMode { KnownOmega, Nodewise };

struct KurtosisSweepConfig {
    Eigen::Index p = 400;
    double epsilon = 0.2;              // s0 / p
    std::vector<double> delta_grid;    // nondecreasing; empty -> 0.10:0.05:0.95
    int replicates = 100;              // noise draws per delta
    CovarianceModel cov_model;         // defaults to circulant(p, 0.8)
    double amplitude = 0.15;
    double sigma = 1.0;
    MMode m_mode = MMode::KnownOmega;
    double lambda_kappa = 8.0;         // lambda = kappa sigma sqrt(log p / n); <0 -> lambda = 0 (OLS)
    double nodewise_k = 2.0;
    bool resample_design = false;      // spec protocol: one X per delta
    bool refine = true;                // 0.01-step pass around the coarse delta_c
    bool use_sigma_hat = false;        // default: true sigma in T_i
    std::uint64_t seed = 0;
    int threads = 0;
};

struct KurtosisSweep {
    double epsilon = 0.0;
    std::vector<double> deltas;
    std::vector<double> mean_kurtosis;  // m(gamma^delta)
    std::vector<double> se_kurtosis;    // SD(gamma^delta)/sqrt(p)
    int replicates = 0;
    std::optional<double> delta_c;      // absent: rule never fired (grid too coarse)
    std::string estimator = "plain excess kurtosis m4/m2^2 - 3";
};

KurtosisSweep kurtosis_sweep(const KurtosisSweepConfig& config);

// ---------------------------------------------------------------------------
// Coverage experiment
// ---------------------------------------------------------------------------

struct CoverageConfig {
    CovarianceModel cov_model;
    Eigen::Index n = 600;
    Eigen::Index p = 300;
    Eigen::Index s0 = 10;
    double amplitude = 0.15;
    double sigma = 1.0;
    double alpha = 0.05;
    int replicates = 500;
    MMode m_mode = MMode::KnownOmega;
    double lambda_kappa = 8.0;
    double nodewise_k = 2.0;
    bool use_true_sigma = false;  // default: scaled-Lasso sigma_hat
    std::uint64_t seed = 0;
    int threads = 0;
};

struct CoverageReport {
    double alpha = 0.0;
    Eigen::VectorXd coverage;       // per-coordinate hit frequency
    double mean_coverage = 0.0;
    double average_length = 0.0;
    int replicates = 0;
    Eigen::VectorXd null_pvalues;   // pooled p-values at true-null coordinates
};

CoverageReport coverage_experiment(const CoverageConfig& config);

// ---------------------------------------------------------------------------
// Risk curve (SURE versus truth along a lambda grid)
// ---------------------------------------------------------------------------

struct RiskCurveConfig {
    CovarianceModel cov_model;
    Eigen::Index n = 300;
    Eigen::Index p = 800;
    Eigen::Index s0 = 16;
    double amplitude = 0.1;
    double sigma = 1.0;
    std::vector<double> lambda_grid;  // empty -> geometric grid
    int replicates = 20;
    std::uint64_t seed = 0;
    int threads = 0;
};

struct RiskCurve {
    std::vector<double> lambda;
    std::vector<double> r_true;   // mean over replicates
    std::vector<double> r_naive;
    std::vector<double> r_sure;
};

RiskCurve risk_curve(const RiskCurveConfig& config);

// ---------------------------------------------------------------------------
// Denoiser approximation check
// ---------------------------------------------------------------------------

struct DenoiserCheckConfig {
    CovarianceModel cov_model;
    Eigen::Index n = 800;
    Eigen::Index p = 400;
    Eigen::Index s0 = 10;
    double amplitude = 1.5;
    double sigma = 1.0;
    double lambda_kappa = 8.0;
    int replicates = 50;
    std::uint64_t seed = 0;
    int threads = 0;
};

struct DenoiserCheckReport {
    double median_ratio = 0.0;        // median of ||theta_hat - eta||^2 / ||theta_hat - theta*||^2
    double mean_lasso_err = 0.0;
    std::optional<double> quadrature_prediction;  // identity designs only
    std::vector<double> ratios;
    std::vector<double> lasso_errs;
};

DenoiserCheckReport denoiser_approximation_check(const DenoiserCheckConfig& config);

// Probabilists' Gauss-Hermite rule: E[g(Z)] ~= sum w_i g(x_i), Z ~ N(0,1).
void gauss_hermite(int m, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace dlasso
