#include "svarma/filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "svarma/error.hpp"

namespace svarma {

Eigen::MatrixXd residuals_u(const SvarmaSpec& spec, const ThetaVector& theta, const Eigen::MatrixXd& y) {
    if (y.cols() != spec.n) {
        throw Error(ErrorKind::invalid_argument, "residuals_u: data has " + std::to_string(y.cols()) +
                                                     " columns, model has n = " + std::to_string(spec.n));
    }
    const auto ar = ar_coeffs(spec, theta);
    const auto ma = ma_coeffs(spec, theta);
    const auto T = y.rows();
    Eigen::MatrixXd u(T, spec.n);
    for (Eigen::Index t = 0; t < T; ++t) {
        Eigen::VectorXd ut = y.row(t).transpose();
        for (int i = 1; i <= spec.p && i <= t; ++i) ut.noalias() -= ar[i - 1] * y.row(t - i).transpose();
        for (int j = 1; j <= spec.q && j <= t; ++j) ut.noalias() -= ma[j - 1] * u.row(t - j).transpose();
        u.row(t) = ut.transpose();
    }
    return u;
}

StructuralShocks structural_shocks(const SvarmaSpec& spec, const ThetaVector& theta,
                                   const Eigen::MatrixXd& y) {
    const Eigen::MatrixXd B = b_matrix(spec, theta);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (!lu.isInvertible()) {
        throw Error(ErrorKind::singular_matrix, "structural_shocks: B(beta) is singular");
    }
    StructuralShocks out;
    out.eps = lu.solve(residuals_u(spec, theta, y).transpose()).transpose();
    out.standardized = out.eps * theta.sigma.cwiseInverse().asDiagonal();
    return out;
}

Eigen::MatrixXd simulate_from_shocks(const SvarmaSpec& spec, const ThetaVector& theta,
                                     const Eigen::MatrixXd& eps) {
    if (eps.cols() != spec.n) {
        throw Error(ErrorKind::invalid_argument, "simulate_from_shocks: shock panel has wrong width");
    }
    const auto ar = ar_coeffs(spec, theta);
    const auto ma = ma_coeffs(spec, theta);
    const Eigen::MatrixXd B = b_matrix(spec, theta);
    const auto T = eps.rows();
    const Eigen::MatrixXd u = eps * B.transpose();
    Eigen::MatrixXd y(T, spec.n);
    for (Eigen::Index t = 0; t < T; ++t) {
        Eigen::VectorXd yt = u.row(t).transpose();
        for (int i = 1; i <= spec.p && i <= t; ++i) yt.noalias() += ar[i - 1] * y.row(t - i).transpose();
        for (int j = 1; j <= spec.q && j <= t; ++j) yt.noalias() += ma[j - 1] * u.row(t - j).transpose();
        y.row(t) = yt.transpose();
    }
    return y;
}

SamplePath simulate(const SvarmaSpec& spec, const ThetaVector& theta, int T, Rng& rng, int burnin) {
    if (T < 1 || burnin < 0) {
        throw Error(ErrorKind::invalid_argument, "simulate: need T >= 1 and burnin >= 0");
    }
    const auto violations = validate(spec, theta);
    if (!violations.empty()) {
        throw Error(ErrorKind::validation, "simulate: " + violations.front().message);
    }
    const auto dens = densities(spec, theta);
    const int total = T + burnin;
    Eigen::MatrixXd eps(total, spec.n);
    for (int t = 0; t < total; ++t) {
        for (int i = 0; i < spec.n; ++i) eps(t, i) = theta.sigma[i] * dens[i].sample(rng);
    }
    const Eigen::MatrixXd y = simulate_from_shocks(spec, theta, eps);
    return {y.bottomRows(T), eps.bottomRows(T)};
}

std::vector<Eigen::MatrixXd> truncated_transfer(const SvarmaSpec& spec, const ThetaVector& theta,
                                                int extra, double tol, int cap) {
    const auto a = ar_poly(spec, theta);
    const auto b = ma_poly(spec, theta);
    if (!is_stable(a)) throw Error(ErrorKind::domain, "transfer: AR polynomial is not stable");
    const int n = spec.n;
    const int run = std::max(spec.p, 1);
    std::vector<Eigen::MatrixXd> k;
    k.push_back(Eigen::MatrixXd::Identity(n, n));
    auto next = [&] {
        const int j = static_cast<int>(k.size());
        Eigen::MatrixXd kj = b.term(j);
        for (int i = 1; i <= std::min(j, spec.p); ++i) kj -= a.term(i) * k[j - i];
        k.push_back(std::move(kj));
        return j > spec.q && k.back().cwiseAbs().maxCoeff() < tol;
    };
    // Past lag q the recursion only looks back p terms, so p consecutive
    // negligible terms mean every later term is negligible too.
    int small = 0;
    while (static_cast<int>(k.size()) < cap && small < run) small = next() ? small + 1 : 0;
    for (int e = 0; e < extra; ++e) next();
    return k;
}

std::vector<Eigen::MatrixXd> autocovariance(const SvarmaSpec& spec, const ThetaVector& theta,
                                            int max_lag) {
    if (max_lag < 0) throw Error(ErrorKind::invalid_argument, "autocovariance: max_lag must be >= 0");
    const auto k = truncated_transfer(spec, theta, max_lag);
    const Eigen::MatrixXd B = b_matrix(spec, theta);
    const Eigen::MatrixXd Bs = B * theta.sigma.asDiagonal();
    const Eigen::MatrixXd M = Bs * Bs.transpose();
    std::vector<Eigen::MatrixXd> gamma;
    gamma.reserve(max_lag + 1);
    const int J = static_cast<int>(k.size());
    for (int s = 0; s <= max_lag; ++s) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(spec.n, spec.n);
        for (int j = 0; j + s < J; ++j) acc.noalias() += k[j + s] * M * k[j].transpose();
        gamma.push_back(std::move(acc));
    }
    return gamma;
}

std::vector<Eigen::MatrixXcd> spectral_density(const SvarmaSpec& spec, const ThetaVector& theta,
                                               std::span<const double> freqs) {
    const auto a = ar_poly(spec, theta);
    const auto b = ma_poly(spec, theta);
    const Eigen::MatrixXd Bs = b_matrix(spec, theta) * theta.sigma.asDiagonal();
    const Eigen::MatrixXcd M = (Bs * Bs.transpose()).cast<cplx>();
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(freqs.size());
    for (double lambda : freqs) {
        const cplx z = std::polar(1.0, -lambda);
        const Eigen::MatrixXcd k = a.eval(z).partialPivLu().solve(b.eval(z));
        Eigen::MatrixXcd f = k * M * k.adjoint();
        out.push_back(0.5 * (f + f.adjoint()));
    }
    return out;
}

}  // namespace svarma
