#include "dlasso/solvers.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "dlasso/errors.hpp"
#include "dlasso/parallel.hpp"

namespace dlasso {

double soft_threshold(double x, double tau) {
    if (x > tau) return x - tau;
    if (x < -tau) return x + tau;
    return 0.0;
}

double default_lasso_lambda(Eigen::Index n, Eigen::Index p, double sigma, double kappa) {
    return kappa * sigma * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

double scaled_lasso_default_lambda(Eigen::Index n, Eigen::Index p) {
    return 10.0 * std::sqrt(2.0 * std::log(static_cast<double>(p)) / static_cast<double>(n));
}

double nodewise_default_lambda(Eigen::Index n, Eigen::Index p, double K) {
    return K * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

namespace {

std::vector<Eigen::Index> support_of(const Eigen::VectorXd& theta) {
    std::vector<Eigen::Index> s;
    for (Eigen::Index i = 0; i < theta.size(); ++i)
        if (theta(i) != 0.0) s.push_back(i);
    return s;
}

// Fenchel gap for (1/2n)||y-X theta||^2 + lambda l1(theta), written in the
// scalars it needs: rsq = ||resid||^2/n, ry = <resid,y>/n, xi = ||X^T resid/n||_inf.
double fenchel_gap(double rsq, double ry, double xi, double lambda, double l1) {
    const double s = xi > lambda ? lambda / xi : 1.0;
    const double gap = 0.5 * rsq + lambda * l1 - s * ry + 0.5 * s * s * rsq;
    return std::max(gap, 0.0);
}

// The advertised stationarity certificate, with half the tolerance in hand:
// |corr|_inf <= lambda (1 + 1e-6) and sign agreement at lambda (1 - 1e-6) on
// the support. The solver keeps sweeping until this holds alongside the gap.
bool kkt_certificate(const Eigen::VectorXd& corr, const Eigen::VectorXd& theta,
                     double lambda) {
    if (corr.lpNorm<Eigen::Infinity>() > lambda * (1.0 + 5e-7)) return false;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        if (theta(j) == 0.0) continue;
        const double sign = theta(j) > 0 ? 1.0 : -1.0;
        if (sign * corr(j) < lambda * (1.0 - 5e-7)) return false;
    }
    return true;
}

}  // namespace

LassoFit lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                   const LassoOptions& opts) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (y.size() != n) throw DimensionMismatch("y length does not match design rows");
    if (!(lambda > 0.0)) throw BadConfig("lambda must be positive");

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    if (opts.warm_start) {
        if (opts.warm_start->size() != p)
            throw DimensionMismatch("warm start has wrong length");
        theta = *opts.warm_start;
    }
    const Eigen::VectorXd col_sq = X.colwise().squaredNorm() / static_cast<double>(n);
    Eigen::VectorXd resid = y - X * theta;

    LassoFit out;
    out.lambda = lambda;
    int sweep = 0;
    double gap = std::numeric_limits<double>::infinity();
    while (sweep < opts.max_sweeps) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const double cj = col_sq(j);
            if (cj <= 0.0) {
                theta(j) = 0.0;
                continue;
            }
            const double rho = X.col(j).dot(resid) / static_cast<double>(n) + cj * theta(j);
            const double next = soft_threshold(rho, lambda) / cj;
            const double delta = next - theta(j);
            if (delta != 0.0) {
                resid.noalias() -= X.col(j) * delta;
                theta(j) = next;
            }
        }
        ++sweep;
        const Eigen::VectorXd corr = X.transpose() * resid / static_cast<double>(n);
        gap = fenchel_gap(resid.squaredNorm() / n, resid.dot(y) / n,
                          corr.lpNorm<Eigen::Infinity>(), lambda, theta.lpNorm<1>());
        if (gap <= opts.gap_tol) {
            // Confirm against a freshly computed residual; incremental updates
            // can drift over long runs.
            resid = y - X * theta;
            const Eigen::VectorXd corr2 = X.transpose() * resid / static_cast<double>(n);
            gap = fenchel_gap(resid.squaredNorm() / n, resid.dot(y) / n,
                              corr2.lpNorm<Eigen::Infinity>(), lambda, theta.lpNorm<1>());
            if (gap <= opts.gap_tol && kkt_certificate(corr2, theta, lambda)) break;
        }
    }
    out.theta_hat = std::move(theta);
    out.iterations = sweep;
    out.gap = gap;
    out.converged = gap <= opts.gap_tol;
    resid = y - X * out.theta_hat;
    out.objective =
        0.5 * resid.squaredNorm() / static_cast<double>(n) + lambda * out.theta_hat.lpNorm<1>();
    out.support = support_of(out.theta_hat);
    return out;
}

LassoFit quad_lasso_fit(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double c,
                        double lambda, const LassoOptions& opts) {
    const Eigen::Index p = A.rows();
    if (A.cols() != p) throw DimensionMismatch("A must be square");
    if (b.size() != p) throw DimensionMismatch("b length does not match A");
    if (!(lambda > 0.0)) throw BadConfig("lambda must be positive");
    if (p == 0) {  // empty problem (node-wise regression at p = 1)
        LassoFit out;
        out.lambda = lambda;
        out.objective = c;
        return out;
    }

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    if (opts.warm_start) {
        if (opts.warm_start->size() != p)
            throw DimensionMismatch("warm start has wrong length");
        theta = *opts.warm_start;
    }
    Eigen::VectorXd q = A * theta;  // running A theta

    auto gap_now = [&](double& l1_out) {
        const double l1 = theta.lpNorm<1>();
        l1_out = l1;
        const double quad = theta.dot(q);
        const double bt = b.dot(theta);
        const double rsq = std::max(quad - 2.0 * bt + 2.0 * c, 0.0);
        const double ry = 2.0 * c - bt;
        const double xi = (b - q).lpNorm<Eigen::Infinity>();
        return fenchel_gap(rsq, ry, xi, lambda, l1);
    };

    LassoFit out;
    out.lambda = lambda;
    int sweep = 0;
    double gap = std::numeric_limits<double>::infinity();
    double l1 = 0.0;
    while (sweep < opts.max_sweeps) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const double ajj = A(j, j);
            if (ajj <= 0.0) {
                if (std::abs(b(j)) > lambda)
                    throw NotSPD("quadratic term vanishes on an active coordinate");
                if (theta(j) != 0.0) {
                    q.noalias() -= A.col(j) * theta(j);
                    theta(j) = 0.0;
                }
                continue;
            }
            const double rho = b(j) - q(j) + ajj * theta(j);
            const double next = soft_threshold(rho, lambda) / ajj;
            const double delta = next - theta(j);
            if (delta != 0.0) {
                q.noalias() += A.col(j) * delta;
                theta(j) = next;
            }
        }
        ++sweep;
        gap = gap_now(l1);
        if (gap <= opts.gap_tol) {
            q.noalias() = A * theta;  // refresh before trusting the gap
            gap = gap_now(l1);
            if (gap <= opts.gap_tol && kkt_certificate(b - q, theta, lambda)) break;
        }
    }
    out.theta_hat = theta;
    out.iterations = sweep;
    out.gap = gap;
    out.converged = gap <= opts.gap_tol;
    out.objective = 0.5 * theta.dot(q) - b.dot(theta) + c + lambda * l1;
    out.support = support_of(out.theta_hat);
    return out;
}

ScaledLassoFit scaled_lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                double lambda_bar, const LassoOptions& opts) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (y.size() != n) throw DimensionMismatch("y length does not match design rows");
    if (y.isZero(0.0)) throw DegenerateFit("response is identically zero");
    if (lambda_bar <= 0.0) lambda_bar = scaled_lasso_default_lambda(n, p);

    ScaledLassoFit out;
    out.lambda_bar = lambda_bar;
    double sigma = y.norm() / std::sqrt(static_cast<double>(n));
    LassoOptions inner = opts;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    constexpr int kMaxOuter = 500;
    int it = 0;
    for (; it < kMaxOuter; ++it) {
        inner.warm_start = theta;
        out.fit = lasso_fit(X, y, sigma * lambda_bar, inner);
        theta = out.fit.theta_hat;
        const double rss = (y - X * theta).squaredNorm() / static_cast<double>(n);
        const double next_sigma = std::sqrt(rss);
        if (next_sigma < 1e-12)
            throw DegenerateFit("scaled Lasso reached a perfect interpolation");
        const bool done = std::abs(next_sigma - sigma) < 1e-8 * sigma;
        sigma = next_sigma;
        if (done) {
            ++it;
            break;
        }
    }
    out.sigma_hat = sigma;
    out.theta_hat = std::move(theta);
    out.outer_iterations = it;
    return out;
}

PrecisionEstimate nodewise_lasso(const Eigen::MatrixXd& X, double lambda_tilde,
                                 const NodewiseOptions& opts) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (n < 2) throw BadConfig("node-wise Lasso needs n >= 2");
    if (!(lambda_tilde > 0.0)) throw BadConfig("lambda_tilde must be positive");
    const Eigen::MatrixXd G = (X.transpose() * X) / static_cast<double>(n);

    PrecisionEstimate est;
    est.lambda_tilde = lambda_tilde;
    est.gamma.resize(p, p - 1);
    est.tau_sq.resize(p);
    est.C_hat = Eigen::MatrixXd::Identity(p, p);
    est.M.resize(p, p);

    std::vector<std::string> failures(static_cast<std::size_t>(p));
    parallel_for(0, p, opts.threads, [&](Eigen::Index i) {
        // Gram form of the regression of column i on the others: the shared
        // G makes each sub-problem a cheap minor extraction.
        Eigen::MatrixXd A(p - 1, p - 1);
        Eigen::VectorXd b(p - 1);
        Eigen::Index r = 0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (j == i) continue;
            b(r) = G(j, i);
            Eigen::Index s = 0;
            for (Eigen::Index k = 0; k < p; ++k) {
                if (k == i) continue;
                A(r, s) = G(j, k);
                ++s;
            }
            ++r;
        }
        const LassoFit fit = quad_lasso_fit(A, b, G(i, i) / 2.0, lambda_tilde, opts.lasso);
        const double tau2 = G(i, i) - fit.theta_hat.dot(b);
        if (tau2 <= 0.0) {
            failures[static_cast<std::size_t>(i)] =
                "tau^2 <= 0 at row " + std::to_string(i) + " (lambda_tilde too small)";
            return;
        }
        est.gamma.row(i) = fit.theta_hat.transpose();
        est.tau_sq(i) = tau2;
        Eigen::Index col = 0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (j == i) continue;
            est.C_hat(i, j) = -fit.theta_hat(col);
            ++col;
        }
        est.M.row(i) = est.C_hat.row(i) / tau2;
    });
    for (const auto& msg : failures)
        if (!msg.empty()) throw TauNonPositive(msg);
    return est;
}

Eigen::VectorXd sigma_denoiser(const Eigen::VectorXd& z, const Eigen::MatrixXd& sigma,
                               double lambda, const LassoOptions& opts) {
    const Eigen::Index p = z.size();
    if (sigma.rows() != p || sigma.cols() != p)
        throw DimensionMismatch("Sigma does not match z");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw NotSPD("Sigma failed Cholesky factorization");
    const Eigen::VectorXd b = sigma * z;
    const double c = 0.5 * z.dot(b);
    return quad_lasso_fit(sigma, b, c, lambda, opts).theta_hat;
}

}  // namespace dlasso
