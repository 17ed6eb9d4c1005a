#include "dlasso/debias.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "dlasso/errors.hpp"

namespace dlasso {

DebiasResult debias(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LassoFit& lasso,
                    const Eigen::MatrixXd& M, double sigma_hat) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (y.size() != n) throw DimensionMismatch("y length does not match design rows");
    if (lasso.theta_hat.size() != p) throw DimensionMismatch("fit does not match design");
    if (M.rows() != p || M.cols() != p) throw DimensionMismatch("M must be p x p");

    DebiasResult out;
    out.lasso = lasso;
    out.M = M;
    out.sigma_hat = sigma_hat;
    out.n = n;
    const Eigen::VectorXd resid = y - X * lasso.theta_hat;
    out.theta_d = lasso.theta_hat + M * (X.transpose() * resid) / static_cast<double>(n);
    const Eigen::MatrixXd sigma_hat_mat = (X.transpose() * X) / static_cast<double>(n);
    out.variance_diag = ((M * sigma_hat_mat).cwiseProduct(M)).rowwise().sum();
    return out;
}

DebiasResult debias_known(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                          const Eigen::MatrixXd& omega, std::optional<double> sigma,
                          const LassoOptions& opts) {
    const LassoFit fit = lasso_fit(X, y, lambda, opts);
    const double sh = sigma ? *sigma : scaled_lasso_fit(X, y).sigma_hat;
    DebiasResult out = debias(X, y, fit, omega, sh);
    out.mode = DebiasMode::KnownOmega;
    return out;
}

DebiasResult debias_nodewise(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                             double lambda_tilde, std::optional<double> sigma,
                             const LassoOptions& opts) {
    if (lambda_tilde <= 0.0) lambda_tilde = nodewise_default_lambda(X.rows(), X.cols());
    const PrecisionEstimate pe = nodewise_lasso(X, lambda_tilde);
    const LassoFit fit = lasso_fit(X, y, lambda, opts);
    const double sh = sigma ? *sigma : scaled_lasso_fit(X, y).sigma_hat;
    DebiasResult out = debias(X, y, fit, pe.M, sh);
    out.mode = DebiasMode::Nodewise;
    return out;
}

DebiasResult debias_split(const Dataset& batch_a, const Dataset& batch_b, double lambda,
                          const SplitMSource& m_source, std::optional<double> sigma,
                          const LassoOptions& opts) {
    if (batch_a.p() != batch_b.p()) throw DimensionMismatch("batches disagree on p");
    if (batch_a.n() < 1 || batch_b.n() < 1) throw BadConfig("both batches need samples");

    const LassoFit fit = lasso_fit(batch_b.X, batch_b.y, lambda, opts);

    Eigen::MatrixXd M;
    if (m_source.kind == SplitMSource::Kind::KnownOmega) {
        M = m_source.omega;
    } else {
        double lt = m_source.lambda_tilde;
        if (lt <= 0.0) lt = nodewise_default_lambda(batch_a.n(), batch_a.p());
        M = nodewise_lasso(batch_a.X, lt).M;
    }
    const double sh = sigma ? *sigma : scaled_lasso_fit(batch_b.X, batch_b.y).sigma_hat;
    DebiasResult out = debias(batch_a.X, batch_a.y, fit, M, sh);
    out.mode = DebiasMode::SampleSplit;
    return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, std::uint64_t seed) {
    const Eigen::Index n = data.n();
    if (n < 2) throw BadConfig("need at least two samples to split");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    RngStream rng(seed, 0, RngRole::Split);
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(
            rng.uniform_below(static_cast<std::uint64_t>(i + 1)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    const Eigen::Index n_a = n / 2;  // odd total: the extra row goes to batch B
    auto take = [&](Eigen::Index from, Eigen::Index count) {
        Dataset d;
        d.X.resize(count, data.p());
        d.y.resize(count);
        const bool has_w = data.w.has_value();
        if (has_w) d.w = Eigen::VectorXd(count);
        for (Eigen::Index i = 0; i < count; ++i) {
            const Eigen::Index src = order[static_cast<std::size_t>(from + i)];
            d.X.row(i) = data.X.row(src);
            d.y(i) = data.y(src);
            if (has_w) (*d.w)(i) = (*data.w)(src);
        }
        d.theta_star = data.theta_star;
        d.sigma = data.sigma;
        d.seed = seed;
        return d;
    };
    return {take(0, n_a), take(n_a, n - n_a)};
}

BiasNoiseSplit decompose_bias_noise(const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                                    const Eigen::VectorXd& theta_star, const LassoFit& lasso,
                                    const Eigen::MatrixXd& M) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (w.size() != n) throw DimensionMismatch("w length does not match design rows");
    if (theta_star.size() != p || lasso.theta_hat.size() != p)
        throw DimensionMismatch("parameter vectors do not match design");
    if (M.rows() != p || M.cols() != p) throw DimensionMismatch("M must be p x p");

    const double sqrt_n = std::sqrt(static_cast<double>(n));
    BiasNoiseSplit out;
    out.Z = M * (X.transpose() * w) / sqrt_n;
    const Eigen::MatrixXd sigma_hat_mat = (X.transpose() * X) / static_cast<double>(n);
    const Eigen::VectorXd diff = theta_star - lasso.theta_hat;
    out.R = sqrt_n * (M * (sigma_hat_mat * diff) - diff);
    out.R_inf = out.R.lpNorm<Eigen::Infinity>();
    return out;
}

}  // namespace dlasso
