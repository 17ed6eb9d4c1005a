#include "dlasso/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dlasso/debias.hpp"
#include "dlasso/designs.hpp"
#include "dlasso/diagnostics.hpp"
#include "dlasso/errors.hpp"
#include "dlasso/gaussian.hpp"
#include "dlasso/inference.hpp"
#include "dlasso/io.hpp"
#include "dlasso/parallel.hpp"
#include "dlasso/svg.hpp"

namespace dlasso::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Covariance spec strings: identity | circulant:<r> | dense:<csv> | block:<csv>:<count>
// ---------------------------------------------------------------------------

CovarianceModel parse_cov_spec(const std::string& spec, Eigen::Index p) {
    if (spec == "identity") return CovarianceModel::identity(p);
    if (spec.rfind("circulant:", 0) == 0) {
        const double r = std::stod(spec.substr(10));
        return CovarianceModel::circulant(p, r);
    }
    if (spec.rfind("dense:", 0) == 0) {
        auto m = CovarianceModel::make_dense(read_matrix_csv(spec.substr(6)));
        if (m.p != p) throw BadConfig("dense covariance dimension disagrees with --p");
        return m;
    }
    if (spec.rfind("block:", 0) == 0) {
        const auto rest = spec.substr(6);
        const auto colon = rest.rfind(':');
        if (colon == std::string::npos) throw BadConfig("block spec needs block:<csv>:<count>");
        auto m = CovarianceModel::block_diagonal(read_matrix_csv(rest.substr(0, colon)),
                                                 std::stoll(rest.substr(colon + 1)));
        if (m.p != p) throw BadConfig("block covariance dimension disagrees with --p");
        return m;
    }
    throw BadConfig("unknown covariance spec '" + spec + "'");
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return json::parse(in);
}

void reject_unknown(const json& j, const std::vector<std::string>& known) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw BadConfig("unknown config key '" + it.key() + "'");
    }
}

// flag > config file > default
template <typename T>
void apply(const json& cfg, const char* key, T& value) {
    if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string cov = "identity";
    Eigen::Index p = 0, n = 0, s0 = 0;
    double amp = 0.0, sigma = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    if (a.p < 1 || a.n < 1) throw BadConfig("--p and --n must be positive");
    const CovarianceModel model = parse_cov_spec(a.cov, a.p);
    const Dataset data = simulate_dataset(model, a.n, a.s0, a.amp, a.sigma, a.seed);
    write_dataset(a.out, data);
    // Record the generator settings next to the envelope for reruns.
    json meta = read_json(fs::path(a.out) / "meta.json");
    meta["cov"] = a.cov;
    meta["s0"] = a.s0;
    meta["amplitude"] = a.amp;
    meta["version"] = kVersion;
    write_json(fs::path(a.out) / "meta.json", meta);
    return 0;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitArgs {
    std::string data;
    double lambda = -1.0;
    double kappa = 8.0;
    std::optional<double> sigma;
    std::string out;
};

json fit_to_json(const LassoFit& fit) {
    json jf;
    jf["lambda"] = fit.lambda;
    jf["gap"] = fit.gap;
    jf["iterations"] = fit.iterations;
    jf["converged"] = fit.converged;
    jf["objective"] = fit.objective;
    json coords = json::array();
    for (auto i : fit.support)
        coords.push_back({{"i", i}, {"v", fit.theta_hat(i)}});
    jf["theta_hat"] = coords;
    return jf;
}

int run_fit(const FitArgs& a) {
    const Dataset data = read_dataset(fs::path(a.data) / "meta.json");
    double lambda = a.lambda;
    if (lambda <= 0.0) {
        const double sigma =
            a.sigma ? *a.sigma : scaled_lasso_fit(data.X, data.y).sigma_hat;
        lambda = default_lasso_lambda(data.n(), data.p(), sigma, a.kappa);
    }
    const LassoFit fit = lasso_fit(data.X, data.y, lambda);
    fs::create_directories(a.out);
    write_json(fs::path(a.out) / "fit.json", fit_to_json(fit));
    return 0;
}

// ---------------------------------------------------------------------------
// infer
// ---------------------------------------------------------------------------

struct InferArgs {
    std::string data;
    std::string mode = "nodewise";  // known-omega | nodewise | split
    std::string sigma_file;         // population covariance CSV for known-omega
    double alpha = 0.05;
    double kappa = 8.0;
    double lambda = -1.0;           // explicit override
    double lambda_tilde_k = 2.0;
    std::optional<double> sigma;    // true noise level, if known
    std::uint64_t split_seed = 1;
    std::string out;
};

int run_infer(const InferArgs& a) {
    const Dataset data = read_dataset(fs::path(a.data) / "meta.json");
    const Eigen::Index n = data.n(), p = data.p();

    double sigma_hat;
    if (a.sigma) {
        sigma_hat = *a.sigma;
    } else {
        sigma_hat = scaled_lasso_fit(data.X, data.y).sigma_hat;
    }
    const double lambda =
        a.lambda > 0.0 ? a.lambda : default_lasso_lambda(n, p, sigma_hat, a.kappa);

    DebiasResult result;
    if (a.mode == "known-omega") {
        if (a.sigma_file.empty())
            throw BadConfig("known-omega mode requires --sigma-file with the covariance CSV");
        const Eigen::MatrixXd omega = precision_matrix(read_matrix_csv(a.sigma_file));
        result = debias_known(data.X, data.y, lambda, omega, sigma_hat);
    } else if (a.mode == "nodewise") {
        const double lt = nodewise_default_lambda(n, p, a.lambda_tilde_k);
        result = debias_nodewise(data.X, data.y, lambda, lt, sigma_hat);
    } else if (a.mode == "split") {
        auto [batch_a, batch_b] = split_dataset(data, a.split_seed);
        result = debias_split(batch_a, batch_b, lambda,
                              SplitMSource::nodewise_on_a(
                                  nodewise_default_lambda(batch_a.n(), p, a.lambda_tilde_k)),
                              sigma_hat);
    } else {
        throw BadConfig("unknown mode '" + a.mode + "'");
    }

    const IntervalSet intervals = confidence_intervals(result, a.alpha);
    const PValueSet pvals = p_values(result);

    fs::create_directories(a.out);
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < result.theta_d.size(); ++i)
        rows.push_back({static_cast<double>(i), result.lasso.theta_hat(i), result.theta_d(i),
                        intervals.lower(i), intervals.upper(i), pvals.p(i)});
    write_table_csv(fs::path(a.out) / "intervals.csv",
                    {"coordinate", "theta_hat", "theta_d", "lower", "upper", "p_value"}, rows);

    json meta;
    meta["mode"] = a.mode;
    meta["alpha"] = a.alpha;
    meta["multiplier"] = normal_quantile(1.0 - a.alpha / 2.0);
    meta["lambda"] = lambda;
    meta["sigma_hat"] = sigma_hat;
    meta["lambda_tilde_k"] = a.lambda_tilde_k;
    meta["version"] = kVersion;
    write_json(fs::path(a.out) / "meta.json", meta);
    return 0;
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

struct ExperimentArgs {
    std::string kind;
    std::string config_file;
    std::string from_meta;
    std::string out;
    bool paper_scale = false;
    json flags;  // explicitly-set CLI values, applied last
};

json cov_default(const std::string& s) { return s; }

json kurtosis_defaults(bool paper) {
    json c;
    c["p"] = paper ? 3000 : 400;
    c["epsilon"] = 0.2;
    c["replicates"] = 100;
    c["cov"] = "circulant:0.8";
    c["amplitude"] = 0.15;
    c["sigma"] = 1.0;
    c["m_mode"] = "known-omega";
    c["lambda_kappa"] = 8.0;
    c["nodewise_k"] = 2.0;
    c["refine"] = true;
    c["use_sigma_hat"] = false;
    c["seed"] = 0;
    c["delta_grid"] = json::array();
    return c;
}

json coverage_defaults() {
    json c;
    c["n"] = 600;
    c["p"] = 300;
    c["s0"] = 10;
    c["amplitude"] = 0.15;
    c["sigma"] = 1.0;
    c["alpha"] = 0.05;
    c["replicates"] = 500;
    c["cov"] = "circulant:0.8";
    c["m_mode"] = "known-omega";
    c["lambda_kappa"] = 8.0;
    c["nodewise_k"] = 2.0;
    c["use_true_sigma"] = false;
    c["seed"] = 0;
    return c;
}

json risk_curve_defaults(bool paper) {
    json c;
    c["n"] = paper ? 1800 : 300;
    c["p"] = paper ? 5000 : 800;
    c["s0"] = paper ? 100 : 16;
    c["amplitude"] = 0.1;
    c["sigma"] = 1.0;
    c["replicates"] = paper ? 10 : 20;
    c["cov"] = "circulant:0.1";
    c["seed"] = 0;
    c["lambda_grid"] = json::array();
    return c;
}

json two_step_defaults() {
    json c;
    c["n"] = 1500;
    c["p"] = 2000;
    c["s0"] = 50;
    c["amplitude"] = 0.1;
    c["sigma"] = 1.0;
    c["replicates"] = 200;
    c["cov"] = "identity";
    c["lambda_kappa"] = 8.0;
    c["seed"] = 0;
    return c;
}

json denoiser_defaults() {
    json c;
    c["n"] = 800;
    c["p"] = 400;
    c["s0"] = 10;
    c["amplitude"] = 1.5;
    c["sigma"] = 1.0;
    c["replicates"] = 50;
    c["cov"] = "identity";
    c["lambda_kappa"] = 8.0;
    c["seed"] = 0;
    return c;
}

MMode parse_m_mode(const std::string& s) {
    if (s == "known-omega") return MMode::KnownOmega;
    if (s == "nodewise") return MMode::Nodewise;
    throw BadConfig("unknown m_mode '" + s + "'");
}

void run_kurtosis(const json& cfg, const fs::path& out) {
    KurtosisSweepConfig k;
    k.p = cfg.at("p").get<Eigen::Index>();
    k.epsilon = cfg.at("epsilon").get<double>();
    k.replicates = cfg.at("replicates").get<int>();
    k.cov_model = parse_cov_spec(cfg.at("cov").get<std::string>(), k.p);
    k.amplitude = cfg.at("amplitude").get<double>();
    k.sigma = cfg.at("sigma").get<double>();
    k.m_mode = parse_m_mode(cfg.at("m_mode").get<std::string>());
    k.lambda_kappa = cfg.at("lambda_kappa").get<double>();
    k.nodewise_k = cfg.at("nodewise_k").get<double>();
    k.refine = cfg.at("refine").get<bool>();
    k.use_sigma_hat = cfg.at("use_sigma_hat").get<bool>();
    k.seed = cfg.at("seed").get<std::uint64_t>();
    k.delta_grid = cfg.at("delta_grid").get<std::vector<double>>();

    const KurtosisSweep sweep = kurtosis_sweep(k);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < sweep.deltas.size(); ++i)
        rows.push_back({sweep.deltas[i], sweep.mean_kurtosis[i], sweep.se_kurtosis[i]});
    write_table_csv(out / "results.csv", {"delta", "mean_kurtosis", "se_kurtosis"}, rows);

    SvgPlot plot;
    plot.title = "Mean excess kurtosis vs delta (epsilon = " +
                 std::to_string(sweep.epsilon) + ")";
    plot.x_label = "delta = n/p";
    plot.y_label = "m(gamma^delta)";
    SvgSeries mean_s{"m", "#1f77b4", sweep.deltas, sweep.mean_kurtosis};
    SvgSeries hi{"m+SE", "#bbbbbb", sweep.deltas, {}};
    SvgSeries lo{"m-SE", "#bbbbbb", sweep.deltas, {}};
    for (std::size_t i = 0; i < sweep.deltas.size(); ++i) {
        hi.y.push_back(sweep.mean_kurtosis[i] + sweep.se_kurtosis[i]);
        lo.y.push_back(sweep.mean_kurtosis[i] - sweep.se_kurtosis[i]);
    }
    plot.series = {mean_s, hi, lo};
    write_svg_plot(out / "sweep.svg", plot);

    json extra;
    if (sweep.delta_c) extra["delta_c"] = *sweep.delta_c;
    extra["estimator"] = sweep.estimator;
    write_json(out / "summary.json", extra);
}

void run_coverage(const json& cfg, const fs::path& out) {
    CoverageConfig c;
    c.n = cfg.at("n").get<Eigen::Index>();
    c.p = cfg.at("p").get<Eigen::Index>();
    c.s0 = cfg.at("s0").get<Eigen::Index>();
    c.amplitude = cfg.at("amplitude").get<double>();
    c.sigma = cfg.at("sigma").get<double>();
    c.alpha = cfg.at("alpha").get<double>();
    c.replicates = cfg.at("replicates").get<int>();
    c.cov_model = parse_cov_spec(cfg.at("cov").get<std::string>(), c.p);
    c.m_mode = parse_m_mode(cfg.at("m_mode").get<std::string>());
    c.lambda_kappa = cfg.at("lambda_kappa").get<double>();
    c.nodewise_k = cfg.at("nodewise_k").get<double>();
    c.use_true_sigma = cfg.at("use_true_sigma").get<bool>();
    c.seed = cfg.at("seed").get<std::uint64_t>();

    const CoverageReport report = coverage_experiment(c);
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < report.coverage.size(); ++i)
        rows.push_back({static_cast<double>(i), report.coverage(i)});
    write_table_csv(out / "results.csv", {"coordinate", "coverage"}, rows);

    json extra;
    extra["mean_coverage"] = report.mean_coverage;
    extra["average_length"] = report.average_length;
    write_json(out / "summary.json", extra);
}

void run_risk_curve(const json& cfg, const fs::path& out) {
    RiskCurveConfig c;
    c.n = cfg.at("n").get<Eigen::Index>();
    c.p = cfg.at("p").get<Eigen::Index>();
    c.s0 = cfg.at("s0").get<Eigen::Index>();
    c.amplitude = cfg.at("amplitude").get<double>();
    c.sigma = cfg.at("sigma").get<double>();
    c.replicates = cfg.at("replicates").get<int>();
    c.cov_model = parse_cov_spec(cfg.at("cov").get<std::string>(), c.p);
    c.seed = cfg.at("seed").get<std::uint64_t>();
    c.lambda_grid = cfg.at("lambda_grid").get<std::vector<double>>();

    const RiskCurve curve = risk_curve(c);
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < curve.lambda.size(); ++j)
        rows.push_back({curve.lambda[j], curve.r_true[j], curve.r_naive[j], curve.r_sure[j]});
    write_table_csv(out / "results.csv", {"lambda", "R_true", "R_naive", "R_sure"}, rows);

    SvgPlot plot;
    plot.title = "Prediction risk vs lambda";
    plot.x_label = "lambda";
    plot.y_label = "risk";
    plot.series = {{"R_true", "#000000", curve.lambda, curve.r_true},
                   {"R_naive", "#d62728", curve.lambda, curve.r_naive},
                   {"R_SURE", "#1f77b4", curve.lambda, curve.r_sure}};
    write_svg_plot(out / "risk.svg", plot);
}

void run_two_step(const json& cfg, const fs::path& out) {
    const auto n = cfg.at("n").get<Eigen::Index>();
    const auto p = cfg.at("p").get<Eigen::Index>();
    const auto s0 = cfg.at("s0").get<Eigen::Index>();
    const double amplitude = cfg.at("amplitude").get<double>();
    const double sigma = cfg.at("sigma").get<double>();
    const int replicates = cfg.at("replicates").get<int>();
    const double kappa = cfg.at("lambda_kappa").get<double>();
    const auto seed = cfg.at("seed").get<std::uint64_t>();
    const CovarianceModel model = parse_cov_spec(cfg.at("cov").get<std::string>(), p);

    const Eigen::MatrixXd sigma_mat = build_covariance(model);
    const Eigen::MatrixXd omega = precision_matrix(sigma_mat);
    const double lambda = default_lasso_lambda(n, p, sigma, kappa);

    std::vector<double> risks(static_cast<std::size_t>(replicates));
    std::vector<double> bounds(static_cast<std::size_t>(replicates));
    parallel_for(0, replicates, 0, [&](Eigen::Index rep) {
        const auto stream = static_cast<std::uint64_t>(rep);
        RngStream support_rng(seed, stream, RngRole::Support);
        RngStream design_rng(seed, stream, RngRole::Design);
        RngStream noise_rng(seed, stream, RngRole::Noise);
        const SparseSignal signal = make_sparse_signal(p, s0, amplitude, support_rng);
        const Eigen::MatrixXd X = sample_design(sigma_mat, n, design_rng);
        auto [y, w] = sample_response(X, signal.theta, sigma, noise_rng);
        const LassoFit fit = lasso_fit(X, y, lambda);
        const DebiasResult res = debias(X, y, fit, omega, sigma);
        const TwoStepEstimate two = two_step_estimate(res, omega, sigma, s0);
        risks[static_cast<std::size_t>(rep)] = (two.theta2 - signal.theta).squaredNorm();
        double omega_mean = 0.0;
        for (auto i : signal.support) omega_mean += omega(i, i);
        omega_mean /= static_cast<double>(s0);
        bounds[static_cast<std::size_t>(rep)] =
            (2.0 * static_cast<double>(s0) * sigma * sigma / static_cast<double>(n)) *
            std::log(static_cast<double>(p) / static_cast<double>(s0)) * omega_mean;
    });

    std::vector<std::vector<double>> rows;
    int within = 0;
    for (int r = 0; r < replicates; ++r) {
        rows.push_back({static_cast<double>(r), risks[static_cast<std::size_t>(r)],
                        bounds[static_cast<std::size_t>(r)]});
        if (risks[static_cast<std::size_t>(r)] <= 1.3 * bounds[static_cast<std::size_t>(r)])
            ++within;
    }
    write_table_csv(out / "results.csv", {"replicate", "risk", "bound"}, rows);
    json extra;
    extra["fraction_within_1.3x_bound"] = static_cast<double>(within) / replicates;
    write_json(out / "summary.json", extra);
}

void run_denoiser_check(const json& cfg, const fs::path& out) {
    DenoiserCheckConfig c;
    c.n = cfg.at("n").get<Eigen::Index>();
    c.p = cfg.at("p").get<Eigen::Index>();
    c.s0 = cfg.at("s0").get<Eigen::Index>();
    c.amplitude = cfg.at("amplitude").get<double>();
    c.sigma = cfg.at("sigma").get<double>();
    c.replicates = cfg.at("replicates").get<int>();
    c.cov_model = parse_cov_spec(cfg.at("cov").get<std::string>(), c.p);
    c.lambda_kappa = cfg.at("lambda_kappa").get<double>();
    c.seed = cfg.at("seed").get<std::uint64_t>();

    const DenoiserCheckReport report = denoiser_approximation_check(c);
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < report.ratios.size(); ++r)
        rows.push_back({static_cast<double>(r), report.ratios[r], report.lasso_errs[r]});
    write_table_csv(out / "results.csv", {"replicate", "gap_ratio", "lasso_err"}, rows);
    json extra;
    extra["median_ratio"] = report.median_ratio;
    extra["mean_lasso_err"] = report.mean_lasso_err;
    if (report.quadrature_prediction)
        extra["quadrature_prediction"] = *report.quadrature_prediction;
    write_json(out / "summary.json", extra);
}

int run_experiment(const ExperimentArgs& a) {
    std::string kind = a.kind;
    json cfg;
    if (!a.from_meta.empty()) {
        const json meta = read_json(a.from_meta);
        kind = meta.at("kind").get<std::string>();
        cfg = meta.at("config");
    } else {
        if (kind == "kurtosis")
            cfg = kurtosis_defaults(a.paper_scale);
        else if (kind == "coverage")
            cfg = coverage_defaults();
        else if (kind == "risk-curve")
            cfg = risk_curve_defaults(a.paper_scale);
        else if (kind == "two-step")
            cfg = two_step_defaults();
        else if (kind == "denoiser-check")
            cfg = denoiser_defaults();
        else
            throw BadConfig("unknown experiment kind '" + kind + "'");
        if (a.paper_scale && kind != "kurtosis" && kind != "risk-curve")
            throw BadConfig("--paper-scale applies to kurtosis and risk-curve only");

        std::vector<std::string> known;
        for (auto it = cfg.begin(); it != cfg.end(); ++it) known.push_back(it.key());
        if (!a.config_file.empty()) {
            const json file_cfg = read_json(a.config_file);
            reject_unknown(file_cfg, known);
            for (auto it = file_cfg.begin(); it != file_cfg.end(); ++it)
                cfg[it.key()] = it.value();
        }
        reject_unknown(a.flags, known);
        for (auto it = a.flags.begin(); it != a.flags.end(); ++it)
            cfg[it.key()] = it.value();
    }

    const fs::path out = a.out;
    fs::create_directories(out);
    if (kind == "kurtosis")
        run_kurtosis(cfg, out);
    else if (kind == "coverage")
        run_coverage(cfg, out);
    else if (kind == "risk-curve")
        run_risk_curve(cfg, out);
    else if (kind == "two-step")
        run_two_step(cfg, out);
    else if (kind == "denoiser-check")
        run_denoiser_check(cfg, out);
    else
        throw BadConfig("unknown experiment kind '" + kind + "'");

    json meta;
    meta["kind"] = kind;
    meta["config"] = cfg;
    meta["version"] = kVersion;
    write_json(out / "meta.json", meta);
    return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Debiased-Lasso inference toolkit"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker pool cap (0 = auto)");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "sample a dataset from the linear model");
    c_sim->add_option("--cov", sim.cov, "identity | circulant:<r> | dense:<csv> | block:<csv>:<k>");
    c_sim->add_option("--p", sim.p)->required();
    c_sim->add_option("--n", sim.n)->required();
    c_sim->add_option("--s0", sim.s0);
    c_sim->add_option("--amp", sim.amp);
    c_sim->add_option("--sigma", sim.sigma);
    c_sim->add_option("--seed", sim.seed);
    c_sim->add_option("--out", sim.out)->required();

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Lasso fit on a dataset directory");
    c_fit->add_option("--data", fit.data)->required();
    c_fit->add_option("--lambda", fit.lambda, "explicit lambda (overrides --kappa)");
    c_fit->add_option("--kappa", fit.kappa, "lambda = kappa sigma_hat sqrt(log p/n)");
    double fit_sigma = -1.0;
    c_fit->add_option("--sigma", fit_sigma, "known noise level");
    c_fit->add_option("--out", fit.out)->required();

    InferArgs inf;
    auto* c_inf = app.add_subcommand("infer", "confidence intervals and p-values");
    c_inf->add_option("--data", inf.data)->required();
    c_inf->add_option("--mode", inf.mode, "known-omega | nodewise | split");
    c_inf->add_option("--sigma-file", inf.sigma_file, "population covariance CSV (known-omega)");
    c_inf->add_option("--alpha", inf.alpha);
    c_inf->add_option("--kappa", inf.kappa);
    c_inf->add_option("--lambda", inf.lambda);
    c_inf->add_option("--lambda-tilde-k", inf.lambda_tilde_k);
    double inf_sigma = -1.0;
    c_inf->add_option("--sigma", inf_sigma, "known noise level");
    c_inf->add_option("--split-seed", inf.split_seed);
    c_inf->add_option("--out", inf.out)->required();

    ExperimentArgs exp;
    auto* c_exp = app.add_subcommand("experiment", "run a simulation protocol");
    c_exp->add_option("kind", exp.kind,
                      "kurtosis | coverage | risk-curve | two-step | denoiser-check");
    c_exp->add_option("--config", exp.config_file, "JSON config file");
    c_exp->add_option("--from-meta", exp.from_meta, "re-run exactly from a meta.json");
    c_exp->add_option("--out", exp.out)->required();
    c_exp->add_flag("--paper-scale", exp.paper_scale, "paper-size configuration");
    // Frequently swept knobs, forwarded into the config JSON.
    double f_epsilon = 0, f_amp = 0, f_sigma = 0, f_alpha = 0, f_kappa = 0, f_r = -1,
           f_nodewise_k = 0;
    long long f_p = 0, f_n = 0, f_s0 = 0, f_reps = 0, f_seed = -1;
    auto* o_eps = c_exp->add_option("--epsilon", f_epsilon);
    auto* o_p = c_exp->add_option("--p", f_p);
    auto* o_n = c_exp->add_option("--n", f_n);
    auto* o_s0 = c_exp->add_option("--s0", f_s0);
    auto* o_amp = c_exp->add_option("--amp", f_amp);
    auto* o_sig = c_exp->add_option("--sigma", f_sigma);
    auto* o_alpha = c_exp->add_option("--alpha", f_alpha);
    auto* o_reps = c_exp->add_option("--replicates", f_reps);
    auto* o_seed = c_exp->add_option("--seed", f_seed);
    auto* o_kappa = c_exp->add_option("--lambda-kappa", f_kappa);
    auto* o_ntk = c_exp->add_option("--lambda-tilde-k", f_nodewise_k);
    auto* o_r = c_exp->add_option("--r", f_r, "circulant correlation (sets cov)");
    std::string f_cov, f_mmode;
    auto* o_cov = c_exp->add_option("--cov", f_cov);
    auto* o_mmode = c_exp->add_option("--m-mode", f_mmode);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (threads > 0) set_default_threads(threads);
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_fit->parsed()) {
            if (fit_sigma > 0.0) fit.sigma = fit_sigma;
            return run_fit(fit);
        }
        if (c_inf->parsed()) {
            if (inf_sigma > 0.0) inf.sigma = inf_sigma;
            return run_infer(inf);
        }
        if (c_exp->parsed()) {
            if (o_eps->count()) exp.flags["epsilon"] = f_epsilon;
            if (o_p->count()) exp.flags["p"] = f_p;
            if (o_n->count()) exp.flags["n"] = f_n;
            if (o_s0->count()) exp.flags["s0"] = f_s0;
            if (o_amp->count()) exp.flags["amplitude"] = f_amp;
            if (o_sig->count()) exp.flags["sigma"] = f_sigma;
            if (o_alpha->count()) exp.flags["alpha"] = f_alpha;
            if (o_reps->count()) exp.flags["replicates"] = f_reps;
            if (o_seed->count()) exp.flags["seed"] = f_seed;
            if (o_kappa->count()) exp.flags["lambda_kappa"] = f_kappa;
            if (o_ntk->count()) exp.flags["nodewise_k"] = f_nodewise_k;
            if (o_cov->count()) exp.flags["cov"] = f_cov;
            if (o_r->count()) exp.flags["cov"] = "circulant:" + format_double(f_r);
            if (o_mmode->count()) exp.flags["m_mode"] = f_mmode;
            if (exp.kind.empty() && exp.from_meta.empty())
                throw BadConfig("experiment needs a kind or --from-meta");
            return run_experiment(exp);
        }
        throw BadConfig("no subcommand given");
    } catch (const BadConfig& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const BadSparsity& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const BadAlpha& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "Error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace dlasso::cli
