#include "svarma/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "svarma/error.hpp"
#include "svarma/filter.hpp"

namespace svarma {

namespace {

enum class Want { value, score, contributions };

struct Pass {
    double value = 0.0;
    Eigen::VectorXd score;
    Eigen::MatrixXd contributions;
};

// One sweep over t. The derivative of u_t with respect to pi = (pi2, pi3) is
// carried as an n x n^2(p+q) matrix obeying
//   D_t = -[x_{t-1}' (x) I_n, w_{t-1}' (x) I_n] - sum_j b_j D_{t-j}
// with zero presample, i.e. D_t = -b(z)^{-1}[...] realized recursively.
// u_t does not depend on beta, so the beta block only picks up the terms
// from eps_t = B^{-1} u_t and from log|det B|; this is what the
// finite-difference check confirms.
Pass sweep(const SvarmaSpec& spec, const ThetaVector& theta, const Eigen::MatrixXd& y, Want want) {
    check_shape(spec, theta);
    const int n = spec.n;
    const auto T = y.rows();
    if (y.cols() != n) throw Error(ErrorKind::invalid_argument, "likelihood: data width does not match n");
    if (T < 1) throw Error(ErrorKind::invalid_argument, "likelihood: empty sample");

    const Eigen::MatrixXd B = b_from_beta(theta.beta, n);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    Pass out;
    if (!lu.isInvertible()) {
        if (want != Want::value) throw Error(ErrorKind::singular_matrix, "likelihood: B(beta) is singular");
        out.value = -std::numeric_limits<double>::infinity();
        return out;
    }
    const Eigen::MatrixXd Binv = lu.inverse();
    const Eigen::MatrixXd BinvT = Binv.transpose();
    const double log_abs_det = std::log(std::abs(lu.determinant()));
    const auto dens = densities(spec, theta);
    const Eigen::MatrixXd u = residuals_u(spec, theta, y);
    const auto ma = ma_coeffs(spec, theta);
    const double log_sigma_sum = theta.sigma.array().log().sum();

    const int dim = spec.dim_theta();
    const int m_pi = spec.dim_pi2() + spec.dim_pi3();
    const int nn = n * n;
    const bool grad = want != Want::value;
    const bool contrib = want == Want::contributions;

    if (grad) out.score = Eigen::VectorXd::Zero(dim);
    if (contrib) out.contributions.resize(T, dim);

    // Ring buffer of the last q derivative matrices.
    std::vector<Eigen::MatrixXd> ring(std::max(spec.q, 1), Eigen::MatrixXd::Zero(n, m_pi));
    Eigen::MatrixXd D(n, m_pi);
    Eigen::VectorXd st(dim);
    Eigen::VectorXd eps(n);
    Eigen::VectorXd z(n);
    Eigen::VectorXd ex(n);

    double total = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
        eps.noalias() = Binv * u.row(t).transpose();
        double lt = -log_abs_det - log_sigma_sum;
        for (int i = 0; i < n; ++i) {
            z[i] = eps[i] / theta.sigma[i];
            lt += dens[i].log_density(z[i]);
        }
        total += lt;
        if (!grad) continue;

        for (int i = 0; i < n; ++i) ex[i] = dens[i].e_x(z[i]);
        // dl_t/du_t = B'^{-1} Sigma^{-1} e_x
        const Eigen::VectorXd g = BinvT * ex.cwiseQuotient(theta.sigma);

        if (m_pi > 0) {
            D.setZero();
            for (int i = 1; i <= spec.p && i <= t; ++i) {
                for (int c = 0; c < n; ++c) {
                    const double v = y(t - i, c);
                    for (int r = 0; r < n; ++r) D(r, (i - 1) * nn + c * n + r) -= v;
                }
            }
            for (int j = 1; j <= spec.q && j <= t; ++j) {
                for (int c = 0; c < n; ++c) {
                    const double v = u(t - j, c);
                    for (int r = 0; r < n; ++r) D(r, spec.dim_pi2() + (j - 1) * nn + c * n + r) -= v;
                }
                D.noalias() -= ma[j - 1] * ring[(t - j) % spec.q];
            }
            st.head(m_pi).noalias() = D.transpose() * g;
            if (spec.q > 0) ring[t % spec.q] = D;
        }

        int k = spec.offset_beta();
        for (int c = 0; c < n; ++c) {
            for (int r = 0; r < n; ++r) {
                if (r != c) st[k++] = -g[r] * eps[c] - Binv(c, r);
            }
        }
        for (int i = 0; i < n; ++i) {
            st[spec.offset_sigma() + i] = -(ex[i] * z[i] + 1.0) / theta.sigma[i];
        }
        for (int i = 0; i < n; ++i) {
            const int d = dens[i].lambda_dim();
            if (d > 0) st.segment(spec.offset_lambda() + spec.lambda_offset(i), d) = dens[i].e_lambda(z[i]);
        }

        out.score += st;
        if (contrib) out.contributions.row(t) = st.transpose();
    }
    const double inv_T = 1.0 / static_cast<double>(T);
    out.value = total * inv_T;
    if (grad) out.score *= inv_T;
    return out;
}

}  // namespace

double loglik(const SvarmaSpec& spec, const ThetaVector& theta, const Eigen::MatrixXd& y) {
    return sweep(spec, theta, y, Want::value).value;
}

LoglikEval loglik_and_score(const SvarmaSpec& spec, const ThetaVector& theta, const Eigen::MatrixXd& y) {
    Pass p = sweep(spec, theta, y, Want::score);
    return {p.value, std::move(p.score)};
}

Eigen::VectorXd score(const SvarmaSpec& spec, const ThetaVector& theta, const Eigen::MatrixXd& y) {
    return sweep(spec, theta, y, Want::score).score;
}

Eigen::MatrixXd score_contributions(const SvarmaSpec& spec, const ThetaVector& theta,
                                    const Eigen::MatrixXd& y) {
    return sweep(spec, theta, y, Want::contributions).contributions;
}

double default_hessian_step(const SvarmaSpec& spec, Eigen::Index T) {
    const bool kinked = std::any_of(spec.families.begin(), spec.families.end(),
                                    [](Family f) { return ComponentDensity(f).has_kink(); });
    if (!kinked) return 1e-5;
    // The averaged score jumps whenever a standardized shock crosses a kink,
    // so the difference quotient has to span many crossings to estimate the
    // derivative of its expectation. The density itself has a corner at the
    // kink, so the window bias is O(h); against noise O((T h)^{-1/2}) this
    // balances at h ~ T^{-1/3}.
    return 0.5 * std::cbrt(1.0 / static_cast<double>(std::max<Eigen::Index>(T, 1)));
}

Eigen::MatrixXd hessian_raw(const SvarmaSpec& spec, const ThetaVector& theta, const Eigen::MatrixXd& y,
                            HessianOptions options) {
    const double rel = options.rel_step > 0.0 ? options.rel_step : default_hessian_step(spec, y.rows());
    const Eigen::VectorXd x = theta.pack();
    const auto dim = x.size();
    Eigen::MatrixXd M(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        double h = rel * std::max(std::abs(x[k]), 1.0);
        // Keep scale parameters inside their domain.
        if (k >= spec.offset_sigma() && k < spec.offset_lambda()) h = std::min(h, 0.5 * x[k]);
        if (k >= spec.offset_lambda()) h = std::min(h, 0.5 * (x[k] - 2.0));
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp[k] += h;
        xm[k] -= h;
        const Eigen::VectorXd sp = score(spec, ThetaVector::unpack(spec, xp), y);
        const Eigen::VectorXd sm = score(spec, ThetaVector::unpack(spec, xm), y);
        M.col(k) = (sp - sm) / (xp[k] - xm[k]);
    }
    return M;
}

Eigen::MatrixXd hessian(const SvarmaSpec& spec, const ThetaVector& theta, const Eigen::MatrixXd& y,
                        HessianOptions options) {
    const Eigen::MatrixXd M = hessian_raw(spec, theta, y, options);
    return 0.5 * (M + M.transpose());
}

Eigen::MatrixXd opg(const SvarmaSpec& spec, const ThetaVector& theta, const Eigen::MatrixXd& y) {
    const Eigen::MatrixXd S = score_contributions(spec, theta, y);
    Eigen::MatrixXd out = S.transpose() * S / static_cast<double>(S.rows());
    return 0.5 * (out + out.transpose());
}

AsyCov covariance_from_information(const Eigen::MatrixXd& information, Eigen::Index T) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(information);
    const auto& ev = eig.eigenvalues();
    AsyCov out;
    out.condition = ev.size() > 0 ? ev.maxCoeff() / ev.minCoeff() : 1.0;
    if (ev.size() > 0 && (!(ev.minCoeff() > 0.0) || !(out.condition < 1e14))) {
        std::ostringstream msg;
        msg << "asy_cov: information matrix is singular or indefinite (condition number "
            << out.condition << ")";
        throw Error(ErrorKind::singular_matrix, msg.str());
    }
    out.cov = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose() /
              static_cast<double>(T);
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    out.se = out.cov.diagonal().cwiseSqrt();
    return out;
}

AsyCov asy_cov(const SvarmaSpec& spec, const ThetaVector& theta, const Eigen::MatrixXd& y, CovMethod method,
               HessianOptions options) {
    if (method == CovMethod::opg) return covariance_from_information(opg(spec, theta, y), y.rows());
    return covariance_from_information(-hessian(spec, theta, y, options), y.rows());
}

}  // namespace svarma
