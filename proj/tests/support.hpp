#pragma once

// Shared fixtures and reference implementations for the test suites. The
// oracles here deliberately avoid the library code paths they check.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "svarma/filter.hpp"
#include "svarma/model.hpp"
#include "svarma/random.hpp"

namespace svarma::testing {

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * (2.0 * rng.uniform() - 1.0);
    return m;
}

inline double spectral_radius(const Eigen::MatrixXd& m) {
    return m.eigenvalues().cwiseAbs().maxCoeff();
}

// Companion matrix of x_t = sum_i c_i x_{t-i}; its eigenvalues are the inverse
// determinantal roots of I - c_1 z - ... - c_d z^d.
inline Eigen::MatrixXd companion(const std::vector<Eigen::MatrixXd>& c) {
    const auto n = c.empty() ? 0 : c.front().rows();
    const auto d = static_cast<Eigen::Index>(c.size());
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n * d, n * d);
    for (Eigen::Index i = 0; i < d; ++i) F.block(0, i * n, n, n) = c[static_cast<std::size_t>(i)];
    if (d > 1) F.bottomLeftCorner(n * (d - 1), n * (d - 1)).setIdentity();
    return F;
}

// Coefficients drawn at random and rescaled until the companion spectral
// radius is at most `radius` (stability for AR, invertibility for MA with
// the sign flipped).
inline std::vector<Eigen::MatrixXd> random_lag_coeffs(Rng& rng, int n, int d, double radius) {
    std::vector<Eigen::MatrixXd> c;
    for (int i = 0; i < d; ++i) c.push_back(random_matrix(rng, n, n, 0.6));
    if (d == 0) return c;
    const double r = spectral_radius(companion(c));
    if (r > radius) {
        double f = radius / r;
        double g = f;
        for (auto& m : c) {
            m *= g;
            g *= f;
        }
    }
    return c;
}

// Unit-diagonal B whose unit-norm columns satisfy scheme A with a clear margin.
inline Eigen::MatrixXd random_unit_diagonal_b(Rng& rng, int n, double scale = 0.4) {
    Eigen::MatrixXd B = random_matrix(rng, n, n, scale);
    B.diagonal().setOnes();
    return B;
}

inline Eigen::VectorXd random_sigma(Rng& rng, int n) {
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s[i] = 0.5 + rng.uniform();
    return s;
}

// A random admissible theta for the spec (redrawn until validate() passes).
inline ThetaVector random_theta(const SvarmaSpec& spec, Rng& rng, double radius = 0.8) {
    for (;;) {
        std::vector<Eigen::MatrixXd> ar = random_lag_coeffs(rng, spec.n, spec.p, radius);
        std::vector<Eigen::MatrixXd> ma = random_lag_coeffs(rng, spec.n, spec.q, radius);
        Eigen::VectorXd lambda(spec.dim_lambda());
        for (int i = 0; i < spec.n; ++i) {
            if (spec.families[static_cast<std::size_t>(i)] == Family::student_t) {
                lambda[spec.lambda_offset(i)] = 5.0 + 4.0 * rng.uniform();
            }
        }
        ThetaVector th = ThetaVector::from_parts(spec, ar, ma, random_unit_diagonal_b(rng, spec.n),
                                                 random_sigma(rng, spec.n), lambda);
        if (validate(spec, th).empty()) return th;
    }
}

// Reference fixture used by several Monte Carlo checks: bivariate
// VARMA(1,1) with Laplace shocks, scheme-A normalized with a clear margin.
inline SvarmaSpec laplace_varma11_spec() { return SvarmaSpec(2, 1, 1, {Family::laplace, Family::laplace}); }

inline ThetaVector laplace_varma11_theta() {
    const SvarmaSpec spec = laplace_varma11_spec();
    Eigen::MatrixXd a1(2, 2), b1(2, 2), B(2, 2);
    a1 << 0.5, 0.1, 0.2, 0.3;
    b1 << 0.3, 0.0, 0.1, 0.2;
    B << 1.0, 0.3, -0.2, 1.0;
    Eigen::VectorXd sigma(2);
    sigma << 1.0, 0.5;
    return ThetaVector::from_parts(spec, {a1}, {b1}, B, sigma);
}

// State-space oracle for k_j: stack (y_t, ..., y_{t-p+1}, u_t, ..., u_{t-q+1});
// k_j is the response of y_{t+j} to a unit u_t.
inline std::vector<Eigen::MatrixXd> state_space_transfer(const std::vector<Eigen::MatrixXd>& ar,
                                                         const std::vector<Eigen::MatrixXd>& ma, int n, int K) {
    const int p = static_cast<int>(ar.size());
    const int q = static_cast<int>(ma.size());
    const int m = n * (std::max(p, 1) + std::max(q, 1));
    const int uoff = n * std::max(p, 1);
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, n);
    for (int i = 0; i < p; ++i) F.block(0, i * n, n, n) = ar[static_cast<std::size_t>(i)];
    for (int j = 0; j < q; ++j) F.block(0, uoff + j * n, n, n) = ma[static_cast<std::size_t>(j)];
    for (int i = 1; i < std::max(p, 1); ++i) F.block(i * n, (i - 1) * n, n, n).setIdentity();
    for (int j = 1; j < std::max(q, 1); ++j) F.block(uoff + j * n, uoff + (j - 1) * n, n, n).setIdentity();
    G.topRows(n).setIdentity();
    G.block(uoff, 0, n, n).setIdentity();
    std::vector<Eigen::MatrixXd> k;
    Eigen::MatrixXd state = G;
    for (int j = 0; j <= K; ++j) {
        k.push_back(state.topRows(n));
        state = F * state;
    }
    return k;
}

// gamma_s = sum_j b_j cov b_{j+s}' with b_0 = I and MA sign convention.
inline std::vector<Eigen::MatrixXd> direct_ma_autocov(const std::vector<Eigen::MatrixXd>& b, const Eigen::MatrixXd& cov) {
    const auto n = cov.rows();
    std::vector<Eigen::MatrixXd> full{Eigen::MatrixXd::Identity(n, n)};
    full.insert(full.end(), b.begin(), b.end());
    std::vector<Eigen::MatrixXd> g;
    for (std::size_t s = 0; s < full.size(); ++s) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t j = 0; j + s < full.size(); ++j) acc += full[j + s] * cov * full[j].transpose();
        g.push_back(acc);
    }
    return g;
}

inline double max_rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    }
    return worst;
}

// Kolmogorov-Smirnov distance of a sample from U(0, 1).
inline double ks_uniform(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    const auto n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max(d, std::max(static_cast<double>(i + 1) / n - u[i], u[i] - static_cast<double>(i) / n));
    }
    return d;
}

}  // namespace svarma::testing
