#include "svarma/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "svarma/error.hpp"
#include "svarma/optimizer.hpp"
#include "svarma/parallel.hpp"
#include "svarma/random.hpp"

namespace svarma {

namespace {

Eigen::MatrixXd least_squares(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const char* stage) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (X.rows() < X.cols() || qr.rank() < X.cols()) {
        throw Error(ErrorKind::rank_deficient, std::string("initial_estimate: rank-deficient regressors in ") + stage);
    }
    return qr.solve(Y);
}

// Row t of the result: [y_{t-1}', ..., y_{t-p}', v_{t-1}', ..., v_{t-q}'] for t in [t0, T).
Eigen::MatrixXd lag_matrix(const Eigen::MatrixXd& y, int p, const Eigen::MatrixXd& v, int q, Eigen::Index t0) {
    const auto n = y.cols();
    const auto rows = y.rows() - t0;
    Eigen::MatrixXd X(rows, n * (p + q));
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto t = t0 + r;
        for (int i = 1; i <= p; ++i) X.block(r, (i - 1) * n, 1, n) = y.row(t - i);
        for (int j = 1; j <= q; ++j) X.block(r, (p + j - 1) * n, 1, n) = v.row(t - j);
    }
    return X;
}

// Rescales lag i by rho^i, moving every determinantal root outward by 1/rho.
MatrixPolynomial shrink_into_disk_complement(const MatrixPolynomial& poly) {
    const double r = min_root_modulus(poly);
    if (r > 1.0 + 1e-3) return poly;
    const double rho = r / 1.02;
    std::vector<Eigen::MatrixXd> c = poly.coeffs();
    double scale = 1.0;
    for (auto& m : c) {
        scale *= rho;
        m *= scale;
    }
    return MatrixPolynomial(poly.dim(), poly.sign(), std::move(c));
}

void unit_diagonal_cholesky(const Eigen::MatrixXd& cov, Eigen::MatrixXd& B, Eigen::VectorXd& sigma) {
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::rank_deficient, "initial_estimate: innovation covariance is not positive definite");
    }
    const Eigen::MatrixXd L = llt.matrixL();
    sigma = L.diagonal();
    B = L * sigma.cwiseInverse().asDiagonal();
    B.diagonal().setOnes();
}

bool has_kink(const SvarmaSpec& spec) {
    return std::any_of(spec.families.begin(), spec.families.end(),
                       [](Family f) { return ComponentDensity(f).has_kink(); });
}

double stall_tolerance(const SvarmaSpec& spec, const EstimateOptions& options, Eigen::Index T) {
    if (options.stall_grad_tol >= 0.0) return options.stall_grad_tol;
    if (!has_kink(spec)) return options.grad_tol;
    return std::max(options.grad_tol, 10.0 * std::sqrt(static_cast<double>(spec.dim_theta())) /
                                          static_cast<double>(T));
}

}  // namespace

ThetaVector initial_estimate(const Eigen::MatrixXd& y, const SvarmaSpec& spec) {
    const int n = spec.n;
    const auto T = y.rows();
    if (y.cols() != n) throw Error(ErrorKind::invalid_argument, "initial_estimate: data width does not match n");
    if (T < 2) throw Error(ErrorKind::rank_deficient, "initial_estimate: need at least two observations");
    for (int c = 0; c < n; ++c) {
        const double mean = y.col(c).mean();
        if (!((y.col(c).array() - mean).abs().maxCoeff() > 0.0)) {
            throw Error(ErrorKind::rank_deficient,
                        "initial_estimate: column " + std::to_string(c + 1) + " is constant");
        }
    }
    if (!y.allFinite()) throw Error(ErrorKind::invalid_argument, "initial_estimate: data contain non-finite values");

    std::vector<Eigen::MatrixXd> ar(spec.p, Eigen::MatrixXd::Zero(n, n));
    std::vector<Eigen::MatrixXd> ma(spec.q, Eigen::MatrixXd::Zero(n, n));
    Eigen::MatrixXd cov;

    if (spec.p == 0 && spec.q == 0) {
        cov = y.transpose() * y / static_cast<double>(T);
    } else {
        Eigen::MatrixXd proxy = Eigen::MatrixXd::Zero(T, n);
        Eigen::Index t0 = spec.p;
        if (spec.q > 0) {
            const int L = static_cast<int>(std::ceil(1.5 * std::log(static_cast<double>(T))));
            const Eigen::MatrixXd X = lag_matrix(y, L, proxy, 0, L);
            const Eigen::MatrixXd C = least_squares(X, y.bottomRows(T - L), "the long autoregression");
            proxy.bottomRows(T - L) = y.bottomRows(T - L) - X * C;
            t0 = L + spec.q;
        }
        if (t0 >= T) throw Error(ErrorKind::rank_deficient, "initial_estimate: sample too short");
        const Eigen::MatrixXd X = lag_matrix(y, spec.p, proxy, spec.q, t0);
        const Eigen::MatrixXd target = y.bottomRows(T - t0);
        const Eigen::MatrixXd C = least_squares(X, target, "the lag regression");
        const Eigen::MatrixXd resid = target - X * C;
        cov = resid.transpose() * resid / static_cast<double>(resid.rows());
        const Eigen::MatrixXd Ct = C.transpose();
        for (int i = 0; i < spec.p; ++i) ar[i] = Ct.middleCols(i * n, n);
        for (int j = 0; j < spec.q; ++j) ma[j] = Ct.middleCols((spec.p + j) * n, n);
    }

    MatrixPolynomial a(n, Sign::ar, ar);
    a = shrink_into_disk_complement(a);
    MatrixPolynomial b(n, Sign::ma, ma);
    if (spec.q > 0 && !is_invertible(b, 1e-3)) {
        try {
            auto mirrored = mirror_noninvertible_roots(b, cov);
            b = std::move(mirrored.first);
            cov = std::move(mirrored.second);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::not_factorizable) throw;
        }
        b = shrink_into_disk_complement(b);
    }

    Eigen::MatrixXd B;
    Eigen::VectorXd sigma;
    unit_diagonal_cholesky(0.5 * (cov + cov.transpose()), B, sigma);
    return ThetaVector::from_parts(spec, a.coeffs(), b.coeffs(), B, sigma);
}

EstimationResult fit(const Eigen::MatrixXd& y, const SvarmaSpec& spec, const EstimateOptions& options,
                     const std::optional<ThetaVector>& start) {
    const ThetaVector theta0 = start ? *start : initial_estimate(y, spec);
    check_shape(spec, theta0);
    const auto dim = spec.dim_theta();
    const double inf = std::numeric_limits<double>::infinity();

    Eigen::VectorXd lower = Eigen::VectorXd::Constant(dim, -inf);
    const Eigen::VectorXd upper = Eigen::VectorXd::Constant(dim, inf);
    lower.segment(spec.offset_sigma(), spec.n).setConstant(options.sigma_min);
    for (int i = 0; i < spec.n; ++i) {
        const auto lb = ComponentDensity::lambda_lower_bound(spec.families[i]);
        lower.segment(spec.offset_lambda() + spec.lambda_offset(i), lb.size()) = lb;
    }

    const Objective objective = [&](const Eigen::VectorXd& x) -> std::optional<ValueGrad> {
        const ThetaVector th = ThetaVector::unpack(spec, x);
        if (!in_parameter_space(spec, th)) return std::nullopt;
        LoglikEval e = loglik_and_score(spec, th, y);
        if (!std::isfinite(e.value) || !e.score.allFinite()) return std::nullopt;
        return ValueGrad{-e.value, -e.score};
    };

    QuasiNewtonOptions qn;
    qn.max_iter = options.max_iter;
    qn.grad_tol = options.grad_tol;
    qn.stall_grad_tol = stall_tolerance(spec, options, y.rows());
    qn.kinked = has_kink(spec);

    const Eigen::VectorXd x0 = theta0.pack();
    if (!objective(x0)) {
        throw Error(ErrorKind::validation, "fit: starting point is outside the parameter space");
    }
    QuasiNewtonResult best = minimize_box_bfgs(objective, x0, lower, upper, qn);

    Rng rng(options.seed);
    for (int r = 0; r < options.restarts; ++r) {
        Eigen::VectorXd noise(dim);
        for (Eigen::Index k = 0; k < dim; ++k) noise[k] = rng.normal();
        Eigen::VectorXd xs = x0;
        for (double scale = 0.1; scale > 1e-4; scale *= 0.5) {
            xs = x0;
            xs.head(spec.offset_sigma()) += scale * noise.head(spec.offset_sigma());
            xs.segment(spec.offset_sigma(), spec.n).array() *=
                (scale * noise.segment(spec.offset_sigma(), spec.n)).array().exp();
            if (objective(xs)) break;
        }
        if (!objective(xs)) continue;
        QuasiNewtonResult cand = minimize_box_bfgs(objective, xs, lower, upper, qn);
        if (cand.value < best.value) best = std::move(cand);
    }

    EstimationResult res;
    res.T = y.rows();
    res.iterations = best.iterations;
    res.evaluations = best.evaluations;
    res.converged = best.converged;
    res.termination = best.reason;

    const ThetaVector raw = ThetaVector::unpack(spec, best.x);
    try {
        NormalizedModel nm = normalize_theta(spec, raw);
        res.spec = std::move(nm.spec);
        res.theta = std::move(nm.theta);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::not_normalizable) throw;
        res.spec = spec;
        res.theta = raw;
        res.violations.push_back({"not_normalizable", e.what()});
    }

    const LoglikEval at = loglik_and_score(res.spec, res.theta, y);
    res.loglik_value = at.value;
    res.score_norm = at.score.norm();

    if (options.covariance) {
        try {
            const AsyCov c = asy_cov(res.spec, res.theta, y, CovMethod::opg);
            res.cov_opg = c.cov;
            res.se = c.se;
        } catch (const Error& e) {
            res.cov_error += std::string("opg: ") + e.what();
        }
        try {
            const AsyCov c = asy_cov(res.spec, res.theta, y, CovMethod::hessian, options.hessian);
            res.cov_hessian = c.cov;
            res.se_hessian = c.se;
        } catch (const Error& e) {
            if (!res.cov_error.empty()) res.cov_error += "; ";
            res.cov_error += std::string("hessian: ") + e.what();
        }
    }

    res.scheme = options.scheme;
    const Eigen::MatrixXd B = b_matrix(res.spec, res.theta);
    try {
        const Normalized s = normalize(options.scheme, B, res.theta.sigma);
        res.b_scheme = s.B;
        res.sigma_scheme = s.sigma;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::not_normalizable) throw;
        res.b_scheme = B;
        res.sigma_scheme = res.theta.sigma;
        res.violations.push_back({"not_normalizable", e.what()});
    }
    for (auto& v : validate(res.spec, res.theta)) res.violations.push_back(std::move(v));
    return res;
}

OrderSelection select_order(const Eigen::MatrixXd& y, const SvarmaSpec& tmpl, int p_max, int q_max,
                            const EstimateOptions& options, unsigned threads) {
    if (p_max < 0 || q_max < 0) throw Error(ErrorKind::invalid_argument, "select_order: orders must be >= 0");
    OrderSelection out;
    out.table.resize(static_cast<std::size_t>(p_max + 1) * (q_max + 1));
    EstimateOptions opts = options;
    opts.covariance = false;
    const double T = static_cast<double>(y.rows());
    parallel_for(out.table.size(), threads, [&](std::size_t idx) {
        OrderRow& row = out.table[idx];
        row.p = static_cast<int>(idx) / (q_max + 1);
        row.q = static_cast<int>(idx) % (q_max + 1);
        const SvarmaSpec spec(tmpl.n, row.p, row.q, tmpl.families);
        row.dim = spec.dim_theta();
        row.aic = std::numeric_limits<double>::infinity();
        row.loglik = -std::numeric_limits<double>::infinity();
        try {
            const EstimationResult r = fit(y, spec, opts);
            row.loglik = r.loglik_value;
            row.converged = r.converged;
            if (r.converged) row.aic = -2.0 * T * r.loglik_value + 2.0 * row.dim;
            else row.error = "not converged: " + r.termination;
        } catch (const Error& e) {
            row.error = e.what();
        }
    });
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : out.table) {
        if (row.aic < best) {
            best = row.aic;
            out.p = row.p;
            out.q = row.q;
        }
    }
    if (!std::isfinite(best)) throw Error(ErrorKind::validation, "select_order: no (p, q) cell could be fitted");
    return out;
}

}  // namespace svarma
