#include "dlasso/inference.hpp"

#include <Eigen/QR>
#include <cmath>

#include "dlasso/errors.hpp"
#include "dlasso/gaussian.hpp"

namespace dlasso {

IntervalSet confidence_intervals(const DebiasResult& result, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw BadAlpha("alpha must lie in (0,1)");
    if ((result.variance_diag.array() <= 0.0).any())
        throw BadConfig("variance_diag must be positive");
    const double mult = normal_quantile(1.0 - alpha / 2.0);
    const double sqrt_n = std::sqrt(static_cast<double>(result.n));
    IntervalSet out;
    out.alpha = alpha;
    out.half_width =
        (mult * result.sigma_hat / sqrt_n) * result.variance_diag.array().sqrt().matrix();
    out.lower = result.theta_d - out.half_width;
    out.upper = result.theta_d + out.half_width;
    return out;
}

PValueSet p_values(const DebiasResult& result) {
    if ((result.variance_diag.array() <= 0.0).any())
        throw BadConfig("variance_diag must be positive");
    const double sqrt_n = std::sqrt(static_cast<double>(result.n));
    PValueSet out;
    out.p.resize(result.theta_d.size());
    for (Eigen::Index i = 0; i < out.p.size(); ++i) {
        const double z = sqrt_n * std::abs(result.theta_d(i)) /
                         (result.sigma_hat * std::sqrt(result.variance_diag(i)));
        out.p(i) = 2.0 * (1.0 - normal_cdf(z));
    }
    return out;
}

TwoStepEstimate two_step_estimate(const DebiasResult& result, const Eigen::MatrixXd& omega,
                                  double sigma, Eigen::Index s0) {
    const Eigen::Index p = result.theta_d.size();
    if (omega.rows() != p || omega.cols() != p)
        throw DimensionMismatch("Omega does not match the estimate");
    if (!(sigma > 0.0)) throw BadConfig("sigma must be positive");
    if (s0 <= 0 || s0 >= p)
        throw BadSparsity("two-step thresholds need 0 < s0 < p");
    const double n = static_cast<double>(result.n);
    const double log_ratio = std::log(static_cast<double>(p) / static_cast<double>(s0));
    TwoStepEstimate out;
    out.tau.resize(p);
    out.theta2.resize(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        out.tau(i) = std::sqrt(2.0 * sigma * sigma * omega(i, i) * log_ratio / n);
        out.theta2(i) = soft_threshold(result.theta_d(i), out.tau(i));
    }
    return out;
}

RiskTriple sure_estimate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const LassoFit& lasso, double sigma_hat) {
    if (!(sigma_hat > 0.0)) throw BadConfig("sigma_hat must be positive");
    if (y.size() != X.rows() || lasso.theta_hat.size() != X.cols())
        throw DimensionMismatch("fit does not match data");
    const double n = static_cast<double>(X.rows());
    RiskTriple out;
    out.df = static_cast<Eigen::Index>(lasso.support.size());
    out.R_naive = (y - X * lasso.theta_hat).squaredNorm() / n;
    out.R_sure = out.R_naive + 2.0 * sigma_hat * sigma_hat * static_cast<double>(out.df) / n;
    return out;
}

double prediction_error(const Eigen::MatrixXd& X, const LassoFit& lasso,
                        const Eigen::VectorXd& theta_star, const Eigen::VectorXd& w) {
    if (theta_star.size() != X.cols() || lasso.theta_hat.size() != X.cols())
        throw DimensionMismatch("parameter vectors do not match design");
    if (w.size() != X.rows()) throw DimensionMismatch("w length does not match design rows");
    const double n = static_cast<double>(X.rows());
    return (X * (lasso.theta_hat - theta_star)).squaredNorm() / n + w.squaredNorm() / n;
}

double noise_refit_default_lambda(Eigen::Index n, Eigen::Index p) {
    return std::sqrt(2.0 * std::log(static_cast<double>(p)) / static_cast<double>(n));
}

double noise_refit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda_bar) {
    const Eigen::Index n = X.rows();
    if (lambda_bar <= 0.0) lambda_bar = noise_refit_default_lambda(n, X.cols());

    // Scaled-Lasso alternation, but tolerant of interpolable data: when
    // sigma_hat collapses (noiseless y), the support right before the
    // collapse already contains the signal and the OLS refit below returns
    // sigma_hat ~ 0 as it should.
    if (y.isZero(0.0)) return 0.0;
    double sigma = y.norm() / std::sqrt(static_cast<double>(n));
    const double floor = 1e-10 * sigma;
    std::vector<Eigen::Index> selected;
    LassoOptions opts;
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(X.cols());
    for (int it = 0; it < 200; ++it) {
        opts.warm_start = warm;
        const LassoFit fit = lasso_fit(X, y, sigma * lambda_bar, opts);
        warm = fit.theta_hat;
        selected = fit.support;
        const double next = (y - X * fit.theta_hat).norm() / std::sqrt(static_cast<double>(n));
        const bool done = std::abs(next - sigma) < 1e-8 * sigma || next < floor;
        sigma = std::max(next, floor);
        if (done) break;
    }
    if (selected.empty()) return y.norm() / std::sqrt(static_cast<double>(n));
    if (static_cast<Eigen::Index>(selected.size()) >= n)
        throw ModelTooLarge("selected model has >= n columns");
    Eigen::MatrixXd Xs(n, static_cast<Eigen::Index>(selected.size()));
    for (std::size_t k = 0; k < selected.size(); ++k)
        Xs.col(static_cast<Eigen::Index>(k)) = X.col(selected[k]);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    if (qr.rank() < Xs.cols())
        throw RankDeficient("selected columns are rank deficient");
    const Eigen::VectorXd beta = qr.solve(y);
    return (y - Xs * beta).norm() / std::sqrt(static_cast<double>(n));
}

}  // namespace dlasso
