#include "dlasso/diagnostics.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dlasso/errors.hpp"
#include "dlasso/parallel.hpp"
#include "dlasso/rng.hpp"

namespace dlasso {

namespace {

double linf_operator_norm_of_inverse(const Eigen::MatrixXd& sub) {
    const Eigen::LLT<Eigen::MatrixXd> llt(sub);
    if (llt.info() != Eigen::Success)
        throw NotSPD("principal submatrix failed Cholesky factorization");
    const Eigen::MatrixXd inv =
        llt.solve(Eigen::MatrixXd::Identity(sub.rows(), sub.rows()));
    return inv.cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& A,
                                    const std::vector<int>& T) {
    const auto k = static_cast<Eigen::Index>(T.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b)
            sub(a, b) = A(T[static_cast<std::size_t>(a)], T[static_cast<std::size_t>(b)]);
    return sub;
}

// Cumulative count of subsets of size 1..k, saturating at `cap`.
double subset_count(Eigen::Index p, int k, double cap) {
    double total = 0.0, binom = 1.0;
    for (int j = 1; j <= k; ++j) {
        binom *= static_cast<double>(p - j + 1) / static_cast<double>(j);
        total += binom;
        if (total > cap) return total;
    }
    return total;
}

// Euclidean projection of v onto the l1 ball of radius z.
void project_l1_ball(Eigen::VectorXd& v, double z) {
    const double norm1 = v.lpNorm<1>();
    if (norm1 <= z) return;
    std::vector<double> mags(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        mags[static_cast<std::size_t>(i)] = std::abs(v(i));
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    double cumsum = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < mags.size(); ++j) {
        cumsum += mags[j];
        const double t = (cumsum - z) / static_cast<double>(j + 1);
        if (t >= (j + 1 < mags.size() ? mags[j + 1] : 0.0)) {
            theta = t;
            break;
        }
    }
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = soft_threshold(v(i), theta);
}

double excess_kurtosis(const Eigen::VectorXd& v) {
    const double mean = v.mean();
    const auto centered = (v.array() - mean).eval();
    const double m2 = centered.square().mean();
    const double m4 = centered.square().square().mean();
    return m4 / (m2 * m2) - 3.0;
}

struct FitAndDebias {
    LassoFit fit;
    Eigen::VectorXd theta_d;
};

// Lasso (or OLS when lambda <= 0, requiring n > p) followed by the one-step
// correction with a caller-supplied M.
FitAndDebias fit_and_correct(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                             const Eigen::MatrixXd& M) {
    const auto n = static_cast<double>(X.rows());
    FitAndDebias out;
    if (lambda > 0.0) {
        out.fit = lasso_fit(X, y, lambda);
    } else {
        if (X.rows() <= X.cols())
            throw BadConfig("lambda = 0 (OLS path) needs n > p");
        const Eigen::MatrixXd G = (X.transpose() * X) / n;
        const Eigen::LLT<Eigen::MatrixXd> llt(G);
        if (llt.info() != Eigen::Success) throw NotSPD("empirical covariance not SPD");
        out.fit.theta_hat = llt.solve(X.transpose() * y / n);
        out.fit.lambda = 0.0;
        out.fit.gap = 0.0;
        out.fit.converged = true;
        const Eigen::VectorXd r = y - X * out.fit.theta_hat;
        out.fit.objective = 0.5 * r.squaredNorm() / n;
    }
    out.theta_d =
        out.fit.theta_hat + M * (X.transpose() * (y - X * out.fit.theta_hat)) / n;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// rho(A, k)
// ---------------------------------------------------------------------------

SubsetNormReport rho_subset_norm(const Eigen::MatrixXd& A, int k) {
    const Eigen::Index p = A.rows();
    if (A.cols() != p) throw DimensionMismatch("A must be square");
    if (k < 1 || k > p) throw BadConfig("k must lie in [1, p]");
    {
        const Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() != Eigen::Success) throw NotSPD("A failed Cholesky factorization");
    }

    SubsetNormReport report;
    report.k = k;
    constexpr double kExactLimit = 1e6;

    if (subset_count(p, k, kExactLimit) <= kExactLimit) {
        report.method = SubsetNormReport::Method::ExactEnumeration;
        double best = 0.0;
        std::vector<int> T;
        for (int size = 1; size <= k; ++size) {
            T.assign(static_cast<std::size_t>(size), 0);
            for (int i = 0; i < size; ++i) T[static_cast<std::size_t>(i)] = i;
            for (;;) {
                best = std::max(best, linf_operator_norm_of_inverse(principal_submatrix(A, T)));
                int pos = size - 1;
                while (pos >= 0 &&
                       T[static_cast<std::size_t>(pos)] == static_cast<int>(p) - size + pos)
                    --pos;
                if (pos < 0) break;
                ++T[static_cast<std::size_t>(pos)];
                for (int q = pos + 1; q < size; ++q)
                    T[static_cast<std::size_t>(q)] = T[static_cast<std::size_t>(q - 1)] + 1;
            }
        }
        report.rho = best;
        return report;
    }

    // Greedy growth from every singleton plus random restarts; every visited
    // subset is feasible, so the result is a certified lower bound.
    report.method = SubsetNormReport::Method::GreedyLowerBound;
    double best = 0.0;
    auto grow = [&](std::vector<int> T) {
        std::vector<char> used(static_cast<std::size_t>(p), 0);
        for (int t : T) used[static_cast<std::size_t>(t)] = 1;
        best = std::max(best, linf_operator_norm_of_inverse(principal_submatrix(A, T)));
        while (static_cast<int>(T.size()) < k) {
            double local_best = -1.0;
            int pick = -1;
            for (int j = 0; j < static_cast<int>(p); ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                T.push_back(j);
                const double val =
                    linf_operator_norm_of_inverse(principal_submatrix(A, T));
                T.pop_back();
                if (val > local_best) {
                    local_best = val;
                    pick = j;
                }
            }
            T.push_back(pick);
            used[static_cast<std::size_t>(pick)] = 1;
            best = std::max(best, local_best);
        }
    };
    for (int j = 0; j < static_cast<int>(p); ++j) grow({j});
    RngStream rng(0x5eed, static_cast<std::uint64_t>(k), RngRole::Search);
    for (int restart = 0; restart < 32; ++restart) {
        std::vector<int> T;
        std::vector<char> used(static_cast<std::size_t>(p), 0);
        while (static_cast<int>(T.size()) < std::max(1, k / 2)) {
            const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(p)));
            if (!used[static_cast<std::size_t>(j)]) {
                used[static_cast<std::size_t>(j)] = 1;
                T.push_back(j);
            }
        }
        grow(T);
    }
    report.rho = best;
    return report;
}

// ---------------------------------------------------------------------------
// Compatibility constant
// ---------------------------------------------------------------------------

double compatibility_constant_estimate(const Eigen::MatrixXd& sigma_hat,
                                       const std::vector<Eigen::Index>& S, double L,
                                       int restarts, int iterations, std::uint64_t seed) {
    const Eigen::Index p = sigma_hat.rows();
    if (sigma_hat.cols() != p) throw DimensionMismatch("Sigma_hat must be square");
    if (S.empty()) throw EmptySupport("compatibility constant needs a nonempty set");
    if (!(L > 0.0)) throw BadConfig("cone constant L must be positive");

    std::vector<char> in_s(static_cast<std::size_t>(p), 0);
    for (auto i : S) {
        if (i < 0 || i >= p) throw BadConfig("support index out of range");
        in_s[static_cast<std::size_t>(i)] = 1;
    }
    const double s_size = static_cast<double>(S.size());
    const double scale = sigma_hat.cwiseAbs().rowwise().sum().maxCoeff();
    const double step = 0.25 / std::max(scale, 1e-12);

    auto s_l1 = [&](const Eigen::VectorXd& v) {
        double t = 0.0;
        for (auto i : S) t += std::abs(v(i));
        return t;
    };
    auto normalize_and_project = [&](Eigen::VectorXd& v) -> bool {
        const double ns = s_l1(v);
        if (ns < 1e-12) return false;
        v /= ns;
        Eigen::VectorXd off(p - static_cast<Eigen::Index>(S.size()));
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < p; ++i)
            if (!in_s[static_cast<std::size_t>(i)]) off(r++) = v(i);
        project_l1_ball(off, L);
        r = 0;
        for (Eigen::Index i = 0; i < p; ++i)
            if (!in_s[static_cast<std::size_t>(i)]) v(i) = off(r++);
        return true;
    };

    RngStream rng(seed, 0, RngRole::Search);
    double best = std::numeric_limits<double>::infinity();
    for (int rs = 0; rs < restarts; ++rs) {
        Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
        for (Eigen::Index i = 0; i < p; ++i) {
            const bool on_s = in_s[static_cast<std::size_t>(i)] != 0;
            // Off-support coordinates start inside the cone with shrunk mass.
            theta(i) = (on_s ? 1.0 : 0.5) * rng.normal();
        }
        if (!normalize_and_project(theta)) continue;
        best = std::min(best, s_size * theta.dot(sigma_hat * theta));
        for (int it = 0; it < iterations; ++it) {
            // Descend the scale-invariant ratio theta' Sigma theta / ||theta_S||_1^2;
            // with ||theta_S||_1 normalized to 1 its gradient is
            // 2(Sigma theta - (theta' Sigma theta) sgn_S(theta)).
            const Eigen::VectorXd q = sigma_hat * theta;
            const double val = theta.dot(q);
            Eigen::VectorXd grad = 2.0 * q;
            for (auto i : S)
                grad(i) -= 2.0 * val * (theta(i) > 0.0 ? 1.0 : (theta(i) < 0.0 ? -1.0 : 0.0));
            theta.noalias() -= step * grad;
            if (!normalize_and_project(theta)) break;
            best = std::min(best, s_size * theta.dot(sigma_hat * theta));
        }
    }
    if (!std::isfinite(best)) throw BadConfig("compatibility search failed to find a feasible point");
    return best;
}

// ---------------------------------------------------------------------------
// Kurtosis sweep
// ---------------------------------------------------------------------------

namespace {

struct DeltaPointResult {
    double m = 0.0;
    double se = 0.0;
};

DeltaPointResult kurtosis_at_delta(const KurtosisSweepConfig& cfg,
                                   const Eigen::MatrixXd& sigma_mat,
                                   const Eigen::MatrixXd* omega, double delta) {
    const Eigen::Index p = cfg.p;
    const auto n = static_cast<Eigen::Index>(
        std::ceil(delta * static_cast<double>(p)));
    const auto s0 = static_cast<Eigen::Index>(
        std::llround(cfg.epsilon * static_cast<double>(p)));
    const auto key = static_cast<std::uint64_t>(std::llround(delta * 1e6));

    RngStream support_rng(cfg.seed, key, RngRole::Support);
    RngStream design_rng(cfg.seed, key, RngRole::Design);
    const SparseSignal signal = make_sparse_signal(p, s0, cfg.amplitude, support_rng);
    const Eigen::MatrixXd X = sample_design(sigma_mat, n, design_rng);

    Eigen::MatrixXd M;
    if (cfg.m_mode == MMode::KnownOmega) {
        M = *omega;
    } else {
        M = nodewise_lasso(X, nodewise_default_lambda(n, p, cfg.nodewise_k)).M;
    }
    const Eigen::MatrixXd shat = empirical_covariance(X);
    const Eigen::VectorXd vdiag = ((M * shat).cwiseProduct(M)).rowwise().sum();
    const Eigen::VectorXd scale = vdiag.array().sqrt().matrix();
    const double lambda =
        cfg.lambda_kappa > 0.0 ? default_lasso_lambda(n, p, cfg.sigma, cfg.lambda_kappa) : 0.0;
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    Eigen::MatrixXd T(cfg.replicates, p);
    parallel_for(0, cfg.replicates, cfg.threads, [&](Eigen::Index rep) {
        RngStream noise_rng(cfg.seed, key * 1000003ULL + static_cast<std::uint64_t>(rep),
                            RngRole::Noise);
        auto [y, w] = sample_response(X, signal.theta, cfg.sigma, noise_rng);
        const FitAndDebias fd = fit_and_correct(X, y, lambda, M);
        double sig = cfg.sigma;
        if (cfg.use_sigma_hat) sig = scaled_lasso_fit(X, y).sigma_hat;
        T.row(rep) =
            (sqrt_n * (fd.theta_d - signal.theta).array() / (sig * scale.array())).matrix();
    });

    Eigen::VectorXd gamma(p);
    for (Eigen::Index i = 0; i < p; ++i) gamma(i) = excess_kurtosis(T.col(i));
    DeltaPointResult out;
    out.m = gamma.mean();
    const double sd = std::sqrt((gamma.array() - out.m).square().mean());
    out.se = sd / std::sqrt(static_cast<double>(p));
    return out;
}

}  // namespace

KurtosisSweep kurtosis_sweep(const KurtosisSweepConfig& config) {
    KurtosisSweepConfig cfg = config;
    if (cfg.delta_grid.empty()) {
        for (int k = 0; k <= 17; ++k) cfg.delta_grid.push_back(0.10 + 0.05 * k);
    }
    if (!std::is_sorted(cfg.delta_grid.begin(), cfg.delta_grid.end()))
        throw BadConfig("delta grid must be nondecreasing");
    if (cfg.replicates < 2) throw BadConfig("need at least two replicates");
    if (cfg.cov_model.p == 0) cfg.cov_model = CovarianceModel::circulant(cfg.p, 0.8);
    if (cfg.cov_model.p != cfg.p) throw BadConfig("covariance model dimension mismatch");

    const Eigen::MatrixXd sigma_mat = build_covariance(cfg.cov_model);
    Eigen::MatrixXd omega;
    const Eigen::MatrixXd* omega_ptr = nullptr;
    if (cfg.m_mode == MMode::KnownOmega) {
        omega = precision_matrix(sigma_mat);
        omega_ptr = &omega;
    }

    KurtosisSweep sweep;
    sweep.epsilon = cfg.epsilon;
    sweep.replicates = cfg.replicates;
    std::optional<std::size_t> first_hit;
    for (std::size_t d = 0; d < cfg.delta_grid.size(); ++d) {
        const double delta = cfg.delta_grid[d];
        const DeltaPointResult r = kurtosis_at_delta(cfg, sigma_mat, omega_ptr, delta);
        sweep.deltas.push_back(delta);
        sweep.mean_kurtosis.push_back(r.m);
        sweep.se_kurtosis.push_back(r.se);
        if (!first_hit && r.m <= r.se) first_hit = d;
    }
    if (first_hit) {
        double delta_c = cfg.delta_grid[*first_hit];
        if (cfg.refine && *first_hit > 0) {
            const double lo = cfg.delta_grid[*first_hit - 1];
            for (double d = lo + 0.01; d < delta_c - 1e-9; d += 0.01) {
                const DeltaPointResult r = kurtosis_at_delta(cfg, sigma_mat, omega_ptr, d);
                if (r.m <= r.se) {
                    delta_c = d;
                    break;
                }
            }
        }
        sweep.delta_c = delta_c;
    }
    return sweep;
}

// ---------------------------------------------------------------------------
// Coverage experiment
// ---------------------------------------------------------------------------

CoverageReport coverage_experiment(const CoverageConfig& config) {
    CoverageConfig cfg = config;
    if (cfg.replicates < 1) throw BadConfig("need at least one replicate");
    if (cfg.cov_model.p == 0) cfg.cov_model = CovarianceModel::identity(cfg.p);
    if (cfg.cov_model.p != cfg.p) throw BadConfig("covariance model dimension mismatch");

    const Eigen::MatrixXd sigma_mat = build_covariance(cfg.cov_model);
    Eigen::MatrixXd omega;
    if (cfg.m_mode == MMode::KnownOmega) omega = precision_matrix(sigma_mat);
    const double lambda = default_lasso_lambda(cfg.n, cfg.p, cfg.sigma, cfg.lambda_kappa);

    std::vector<Eigen::VectorXd> hits(static_cast<std::size_t>(cfg.replicates));
    std::vector<std::vector<double>> nulls(static_cast<std::size_t>(cfg.replicates));
    std::vector<double> lengths(static_cast<std::size_t>(cfg.replicates));

    parallel_for(0, cfg.replicates, cfg.threads, [&](Eigen::Index rep) {
        const auto stream = static_cast<std::uint64_t>(rep);
        RngStream support_rng(cfg.seed, stream, RngRole::Support);
        RngStream design_rng(cfg.seed, stream, RngRole::Design);
        RngStream noise_rng(cfg.seed, stream, RngRole::Noise);
        const SparseSignal signal =
            make_sparse_signal(cfg.p, cfg.s0, cfg.amplitude, support_rng);
        const Eigen::MatrixXd X = sample_design(sigma_mat, cfg.n, design_rng);
        auto [y, w] = sample_response(X, signal.theta, cfg.sigma, noise_rng);

        const LassoFit fit = lasso_fit(X, y, lambda);
        const Eigen::MatrixXd& M =
            cfg.m_mode == MMode::KnownOmega
                ? omega
                : nodewise_lasso(X, nodewise_default_lambda(cfg.n, cfg.p, cfg.nodewise_k)).M;
        const double sigma_hat =
            cfg.use_true_sigma ? cfg.sigma : scaled_lasso_fit(X, y).sigma_hat;
        DebiasResult res = debias(X, y, fit, M, sigma_hat);
        res.mode = cfg.m_mode == MMode::KnownOmega ? DebiasMode::KnownOmega
                                                   : DebiasMode::Nodewise;
        const IntervalSet intervals = confidence_intervals(res, cfg.alpha);
        const PValueSet pvals = p_values(res);

        Eigen::VectorXd hit(cfg.p);
        for (Eigen::Index i = 0; i < cfg.p; ++i)
            hit(i) = (signal.theta(i) >= intervals.lower(i) &&
                      signal.theta(i) <= intervals.upper(i))
                         ? 1.0
                         : 0.0;
        hits[static_cast<std::size_t>(rep)] = std::move(hit);
        lengths[static_cast<std::size_t>(rep)] = 2.0 * intervals.half_width.mean();
        auto& nv = nulls[static_cast<std::size_t>(rep)];
        for (Eigen::Index i = 0; i < cfg.p; ++i)
            if (signal.theta(i) == 0.0) nv.push_back(pvals.p(i));
    });

    CoverageReport report;
    report.alpha = cfg.alpha;
    report.replicates = cfg.replicates;
    report.coverage = Eigen::VectorXd::Zero(cfg.p);
    double total_len = 0.0;
    std::vector<double> pooled;
    for (std::size_t r = 0; r < hits.size(); ++r) {
        report.coverage += hits[r];
        total_len += lengths[r];
        pooled.insert(pooled.end(), nulls[r].begin(), nulls[r].end());
    }
    report.coverage /= static_cast<double>(cfg.replicates);
    report.mean_coverage = report.coverage.mean();
    report.average_length = total_len / static_cast<double>(cfg.replicates);
    report.null_pvalues =
        Eigen::Map<Eigen::VectorXd>(pooled.data(), static_cast<Eigen::Index>(pooled.size()));
    return report;
}

// ---------------------------------------------------------------------------
// Risk curve
// ---------------------------------------------------------------------------

RiskCurve risk_curve(const RiskCurveConfig& config) {
    RiskCurveConfig cfg = config;
    if (cfg.cov_model.p == 0) cfg.cov_model = CovarianceModel::identity(cfg.p);
    if (cfg.cov_model.p != cfg.p) throw BadConfig("covariance model dimension mismatch");
    if (cfg.lambda_grid.empty()) {
        const double ref = cfg.sigma * std::sqrt(2.0 * std::log(static_cast<double>(cfg.p)) /
                                                 static_cast<double>(cfg.n));
        const int m = 25;
        const double lo = 0.1 * ref, hi = 3.0 * ref;
        for (int j = 0; j < m; ++j)
            cfg.lambda_grid.push_back(lo * std::pow(hi / lo, static_cast<double>(j) / (m - 1)));
    }
    for (double l : cfg.lambda_grid)
        if (!(l > 0.0)) throw BadConfig("lambda grid must be positive");
    std::sort(cfg.lambda_grid.begin(), cfg.lambda_grid.end());

    const Eigen::MatrixXd sigma_mat = build_covariance(cfg.cov_model);
    const auto n_lambda = cfg.lambda_grid.size();
    std::vector<Eigen::VectorXd> rt(static_cast<std::size_t>(cfg.replicates));
    std::vector<Eigen::VectorXd> rn(static_cast<std::size_t>(cfg.replicates));
    std::vector<Eigen::VectorXd> rs(static_cast<std::size_t>(cfg.replicates));

    parallel_for(0, cfg.replicates, cfg.threads, [&](Eigen::Index rep) {
        const auto stream = static_cast<std::uint64_t>(rep);
        RngStream support_rng(cfg.seed, stream, RngRole::Support);
        RngStream design_rng(cfg.seed, stream, RngRole::Design);
        RngStream noise_rng(cfg.seed, stream, RngRole::Noise);
        const SparseSignal signal =
            make_sparse_signal(cfg.p, cfg.s0, cfg.amplitude, support_rng);
        const Eigen::MatrixXd X = sample_design(sigma_mat, cfg.n, design_rng);
        auto [y, w] = sample_response(X, signal.theta, cfg.sigma, noise_rng);
        const double sigma_hat = noise_refit(X, y);

        Eigen::VectorXd vt(n_lambda), vn(n_lambda), vs(n_lambda);
        LassoOptions opts;  // warm start down the grid; fits stay gap-certified
        Eigen::VectorXd warm = Eigen::VectorXd::Zero(cfg.p);
        for (std::size_t j = n_lambda; j-- > 0;) {
            opts.warm_start = warm;
            const LassoFit fit = lasso_fit(X, y, cfg.lambda_grid[j], opts);
            warm = fit.theta_hat;
            RiskTriple triple = sure_estimate(X, y, fit, sigma_hat);
            vt(static_cast<Eigen::Index>(j)) = prediction_error(X, fit, signal.theta, w);
            vn(static_cast<Eigen::Index>(j)) = triple.R_naive;
            vs(static_cast<Eigen::Index>(j)) = triple.R_sure;
        }
        rt[static_cast<std::size_t>(rep)] = std::move(vt);
        rn[static_cast<std::size_t>(rep)] = std::move(vn);
        rs[static_cast<std::size_t>(rep)] = std::move(vs);
    });

    RiskCurve curve;
    curve.lambda = cfg.lambda_grid;
    curve.r_true.assign(n_lambda, 0.0);
    curve.r_naive.assign(n_lambda, 0.0);
    curve.r_sure.assign(n_lambda, 0.0);
    for (int rep = 0; rep < cfg.replicates; ++rep)
        for (std::size_t j = 0; j < n_lambda; ++j) {
            curve.r_true[j] += rt[static_cast<std::size_t>(rep)](static_cast<Eigen::Index>(j));
            curve.r_naive[j] += rn[static_cast<std::size_t>(rep)](static_cast<Eigen::Index>(j));
            curve.r_sure[j] += rs[static_cast<std::size_t>(rep)](static_cast<Eigen::Index>(j));
        }
    for (std::size_t j = 0; j < n_lambda; ++j) {
        curve.r_true[j] /= cfg.replicates;
        curve.r_naive[j] /= cfg.replicates;
        curve.r_sure[j] /= cfg.replicates;
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Denoiser approximation check
// ---------------------------------------------------------------------------

void gauss_hermite(int m, std::vector<double>& nodes, std::vector<double>& weights) {
    if (m < 1) throw BadConfig("quadrature order must be positive");
    // Physicists' rule for weight e^{-x^2}, then rescaled to N(0,1).
    nodes.assign(static_cast<std::size_t>(m), 0.0);
    weights.assign(static_cast<std::size_t>(m), 0.0);
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const int half = (m + 1) / 2;
    double z = 0.0, z1, pp = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * m + 1.0) - 1.85575 * std::pow(2.0 * m + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(m), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * nodes[1];
        } else {
            z = 2.0 * z - nodes[static_cast<std::size_t>(i) - 2];
        }
        for (int its = 0; its < 100; ++its) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 1; j <= m; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * m) * p2;
            z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-14) break;
        }
        nodes[static_cast<std::size_t>(i)] = z;
        nodes[static_cast<std::size_t>(m - 1 - i)] = -z;
        weights[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
        weights[static_cast<std::size_t>(m - 1 - i)] = weights[static_cast<std::size_t>(i)];
    }
    // e^{-x^2} -> standard normal: x = z sqrt(2), weights sum to 1.
    const double inv_sqrt_pi = 0.5641895835477563;
    for (int i = 0; i < m; ++i) {
        nodes[static_cast<std::size_t>(i)] *= std::sqrt(2.0);
        weights[static_cast<std::size_t>(i)] *= inv_sqrt_pi;
    }
    std::sort(nodes.begin(), nodes.end());
}

DenoiserCheckReport denoiser_approximation_check(const DenoiserCheckConfig& config) {
    DenoiserCheckConfig cfg = config;
    if (cfg.cov_model.p == 0) cfg.cov_model = CovarianceModel::identity(cfg.p);
    if (cfg.cov_model.p != cfg.p) throw BadConfig("covariance model dimension mismatch");
    const Eigen::MatrixXd sigma_mat = build_covariance(cfg.cov_model);
    const Eigen::MatrixXd omega = precision_matrix(sigma_mat);
    const double lambda = default_lasso_lambda(cfg.n, cfg.p, cfg.sigma, cfg.lambda_kappa);

    std::vector<double> ratios(static_cast<std::size_t>(cfg.replicates));
    std::vector<double> errs(static_cast<std::size_t>(cfg.replicates));
    parallel_for(0, cfg.replicates, cfg.threads, [&](Eigen::Index rep) {
        const auto stream = static_cast<std::uint64_t>(rep);
        RngStream support_rng(cfg.seed, stream, RngRole::Support);
        RngStream design_rng(cfg.seed, stream, RngRole::Design);
        RngStream noise_rng(cfg.seed, stream, RngRole::Noise);
        const SparseSignal signal =
            make_sparse_signal(cfg.p, cfg.s0, cfg.amplitude, support_rng);
        const Eigen::MatrixXd X = sample_design(sigma_mat, cfg.n, design_rng);
        auto [y, w] = sample_response(X, signal.theta, cfg.sigma, noise_rng);
        const LassoFit fit = lasso_fit(X, y, lambda);
        const Eigen::VectorXd z =
            signal.theta + omega * (X.transpose() * w) / static_cast<double>(cfg.n);
        const Eigen::VectorXd eta = sigma_denoiser(z, sigma_mat, lambda);
        const double gap = (fit.theta_hat - eta).squaredNorm();
        const double err = (fit.theta_hat - signal.theta).squaredNorm();
        ratios[static_cast<std::size_t>(rep)] = err > 0.0 ? gap / err : 0.0;
        errs[static_cast<std::size_t>(rep)] = err;
    });

    DenoiserCheckReport report;
    report.ratios = ratios;
    report.lasso_errs = errs;
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    report.median_ratio = sorted.size() % 2 == 1
                              ? sorted[mid]
                              : 0.5 * (sorted[mid - 1] + sorted[mid]);
    report.mean_lasso_err = 0.0;
    for (double e : errs) report.mean_lasso_err += e;
    report.mean_lasso_err /= static_cast<double>(errs.size());

    if (cfg.cov_model.kind == CovarianceModel::Kind::Identity) {
        // Corollary-style exact expression: sum over the support of
        // E[(eta(theta_i + Z/sqrt(n); lambda) - theta_i)^2].
        std::vector<double> nodes, w8;
        gauss_hermite(61, nodes, w8);
        const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(cfg.n));
        double pred = 0.0;
        for (Eigen::Index k = 0; k < cfg.s0; ++k) {
            double e = 0.0;
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                const double d =
                    soft_threshold(cfg.amplitude + nodes[q] * inv_sqrt_n, lambda) -
                    cfg.amplitude;
                e += w8[q] * d * d;
            }
            pred += e;
        }
        report.quadrature_prediction = pred;
    }
    return report;
}

}  // namespace dlasso
