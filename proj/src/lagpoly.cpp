#include "svarma/lagpoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "svarma/error.hpp"

namespace svarma {

namespace {

constexpr double kCoeffTrim = 1e-13;

void require_invertible(const MatrixPolynomial& poly, std::string_view what) {
    if (!(min_root_modulus(poly) > 1.0 + kRootMargin)) {
        throw Error(ErrorKind::domain,
                    std::string(what) + ": polynomial has a determinantal root in the closed unit disk");
    }
}

// Newton steps on det(poly(z)) using d/dz log det = tr(poly(z)^{-1} poly'(z));
// a step is kept only if it lowers |det|.
cplx polish_root(const MatrixPolynomial& poly, cplx z) {
    double best = std::abs(poly.eval(z).determinant());
    for (int it = 0; it < 8 && best > 0.0; ++it) {
        Eigen::MatrixXcd deriv = Eigen::MatrixXcd::Zero(poly.dim(), poly.dim());
        for (int j = poly.degree(); j >= 1; --j) deriv = deriv * z + static_cast<double>(j) * poly.term(j).cast<cplx>();
        const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(poly.eval(z));
        const cplx step = 1.0 / lu.solve(deriv).trace();
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        const cplx next = z - step;
        const double val = std::abs(poly.eval(next).determinant());
        if (!(val < best)) break;
        z = next;
        best = val;
    }
    return z;
}

}  // namespace

MatrixPolynomial::MatrixPolynomial(Eigen::Index dim, Sign sign, std::vector<Eigen::MatrixXd> coeffs)
    : dim_(dim), sign_(sign), coeffs_(std::move(coeffs)) {
    if (dim_ < 1) {
        throw Error(ErrorKind::invalid_argument, "MatrixPolynomial: dimension must be positive");
    }
    for (const auto& c : coeffs_) {
        if (c.rows() != dim_ || c.cols() != dim_) {
            throw Error(ErrorKind::invalid_argument,
                        "MatrixPolynomial: coefficient matrices must be square of the common dimension");
        }
    }
}

Eigen::MatrixXd MatrixPolynomial::term(int j) const {
    if (j == 0) return Eigen::MatrixXd::Identity(dim_, dim_);
    if (j < 0 || j > degree()) return Eigen::MatrixXd::Zero(dim_, dim_);
    return sign_ == Sign::ar ? Eigen::MatrixXd(-coeffs_[j - 1]) : coeffs_[j - 1];
}

Eigen::MatrixXcd MatrixPolynomial::eval(cplx z) const {
    // Horner from the top coefficient down.
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (int j = degree(); j >= 1; --j) {
        acc = (acc + term(j).cast<cplx>()) * z;
    }
    acc += Eigen::MatrixXcd::Identity(dim_, dim_);
    return acc;
}

std::vector<double> det_coefficients(const MatrixPolynomial& poly) {
    const auto N = static_cast<int>(poly.dim()) * poly.degree();
    const int M = N + 1;
    std::vector<cplx> values(M);
    for (int k = 0; k < M; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / M;
        values[k] = poly.eval(std::polar(1.0, angle)).determinant();
    }
    std::vector<double> coeffs(M);
    for (int m = 0; m < M; ++m) {
        cplx acc{0.0, 0.0};
        for (int k = 0; k < M; ++k) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) * m / M;
            acc += values[k] * std::polar(1.0, angle);
        }
        coeffs[m] = acc.real() / M;
    }
    // det(poly(0)) = det(I) = 1 exactly.
    coeffs[0] = 1.0;
    return coeffs;
}

std::vector<cplx> det_roots(const MatrixPolynomial& poly) {
    std::vector<double> c = det_coefficients(poly);
    const double scale = std::max(1.0, std::abs(*std::max_element(
                                           c.begin(), c.end(), [](double x, double y) {
                                               return std::abs(x) < std::abs(y);
                                           })));
    while (c.size() > 1 && std::abs(c.back()) <= kCoeffTrim * scale) c.pop_back();
    const auto N = static_cast<Eigen::Index>(c.size()) - 1;
    if (N == 0) {
        if (c[0] == 0.0) {
            throw Error(ErrorKind::singular_polynomial, "det_roots: determinant is identically zero");
        }
        return {};
    }
    // Roots w = 1/z solve the reversed monic polynomial w^N + c_1 w^{N-1} + ... + c_N.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(N, N);
    for (Eigen::Index j = 0; j < N; ++j) companion(0, j) = -c[j + 1] / c[0];
    for (Eigen::Index i = 1; i < N; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    std::vector<cplx> roots;
    roots.reserve(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const cplx w = solver.eigenvalues()[i];
        if (std::abs(w) > 0.0) roots.push_back(polish_root(poly, 1.0 / w));
    }
    return roots;
}

double min_root_modulus(const MatrixPolynomial& poly) {
    double m = std::numeric_limits<double>::infinity();
    for (const cplx& z : det_roots(poly)) m = std::min(m, std::abs(z));
    return m;
}

bool is_stable(const MatrixPolynomial& a, double margin) {
    return min_root_modulus(a) > 1.0 + margin;
}

bool is_invertible(const MatrixPolynomial& b, double margin) {
    return min_root_modulus(b) > 1.0 + margin;
}

std::vector<Eigen::MatrixXd> power_series_inverse(const MatrixPolynomial& poly, int K) {
    require_invertible(poly, "power_series_inverse");
    const auto n = poly.dim();
    std::vector<Eigen::MatrixXd> psi;
    psi.reserve(K + 1);
    psi.push_back(Eigen::MatrixXd::Identity(n, n));
    for (int j = 1; j <= K; ++j) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i <= std::min(j, poly.degree()); ++i) acc -= poly.term(i) * psi[j - i];
        psi.push_back(std::move(acc));
    }
    return psi;
}

std::vector<Eigen::MatrixXd> transfer_coeffs(const MatrixPolynomial& a, const MatrixPolynomial& b,
                                             int K) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::invalid_argument, "transfer_coeffs: dimension mismatch");
    }
    if (!is_stable(a)) {
        throw Error(ErrorKind::domain, "transfer_coeffs: AR polynomial is not stable");
    }
    const auto n = a.dim();
    std::vector<Eigen::MatrixXd> k;
    k.reserve(K + 1);
    k.push_back(Eigen::MatrixXd::Identity(n, n));
    for (int j = 1; j <= K; ++j) {
        Eigen::MatrixXd acc = b.term(j);
        for (int i = 1; i <= std::min(j, a.degree()); ++i) acc -= a.term(i) * k[j - i];
        k.push_back(std::move(acc));
    }
    return k;
}

bool left_coprime_check(const MatrixPolynomial& a, const MatrixPolynomial& b, double tol) {
    const auto n = a.dim();
    for (const cplx& z : det_roots(a)) {
        Eigen::MatrixXcd stacked(n, 2 * n);
        stacked << a.eval(z), b.eval(z);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
        if (!(svd.singularValues()(n - 1) > tol)) return false;
    }
    return true;
}

std::vector<Eigen::MatrixXd> ma_autocovariances(const MatrixPolynomial& b, const Eigen::MatrixXd& cov) {
    const int q = b.degree();
    std::vector<Eigen::MatrixXd> gamma;
    gamma.reserve(q + 1);
    for (int s = 0; s <= q; ++s) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(b.dim(), b.dim());
        for (int j = 0; j + s <= q; ++j) acc += b.term(j) * cov * b.term(j + s).transpose();
        gamma.push_back(std::move(acc));
    }
    return gamma;
}

std::pair<MatrixPolynomial, Eigen::MatrixXd> mirror_noninvertible_roots(const MatrixPolynomial& b,
                                                                       const Eigen::MatrixXd& cov,
                                                                       double margin) {
    const auto roots = det_roots(b);
    bool inside = false;
    for (const cplx& z : roots) {
        const double r = std::abs(z);
        if (std::abs(r - 1.0) <= margin) {
            throw Error(ErrorKind::not_factorizable,
                        "mirror_noninvertible_roots: determinantal root on the unit circle");
        }
        inside = inside || r < 1.0;
    }
    if (!inside) return {b, cov};

    // Steady-state Kalman predictor for the MA(q) state space
    //   s_{t+1} = F s_t + G u_t,  v_t = H s_t + u_t,  s_t = (u_{t-1}; ...; u_{t-q}).
    // Started from the stationary state covariance, the Riccati recursion
    // converges to the stabilizing solution whose innovations representation
    // is the minimum-phase factor.
    const auto n = b.dim();
    const int q = b.degree();
    const Eigen::Index m = n * q;
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(m, m);
    if (q > 1) F.bottomLeftCorner(m - n, m - n).setIdentity();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, n);
    G.topRows(n).setIdentity();
    Eigen::MatrixXd H(n, m);
    for (int j = 1; j <= q; ++j) H.middleCols((j - 1) * n, n) = b.term(j);

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < q; ++j) P.block(j * n, j * n, n, n) = cov;
    const Eigen::MatrixXd GS = G * cov;
    const Eigen::MatrixXd GSG = GS * G.transpose();

    Eigen::MatrixXd omega;
    Eigen::MatrixXd gain;
    constexpr int kMaxIter = 1'000'000;
    bool converged = false;
    for (int it = 0; it < kMaxIter; ++it) {
        omega = H * P * H.transpose() + cov;
        const Eigen::MatrixXd cross = F * P * H.transpose() + GS;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(omega);
        gain = ldlt.solve(cross.transpose()).transpose();
        Eigen::MatrixXd next = F * P * F.transpose() + GSG - gain * cross.transpose();
        next = 0.5 * (next + next.transpose());
        const double change = (next - P).cwiseAbs().maxCoeff();
        P = std::move(next);
        if (change <= 1e-15 * (1.0 + P.cwiseAbs().maxCoeff())) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw Error(ErrorKind::not_factorizable,
                    "mirror_noninvertible_roots: Riccati iteration did not converge");
    }
    omega = H * P * H.transpose() + cov;
    const Eigen::MatrixXd cross = F * P * H.transpose() + GS;
    gain = Eigen::LDLT<Eigen::MatrixXd>(omega).solve(cross.transpose()).transpose();

    std::vector<Eigen::MatrixXd> coeffs;
    coeffs.reserve(q);
    Eigen::MatrixXd propagated = gain;
    for (int j = 1; j <= q; ++j) {
        coeffs.push_back(H * propagated);
        propagated = F * propagated;
    }
    return {MatrixPolynomial(n, Sign::ma, std::move(coeffs)), 0.5 * (omega + omega.transpose())};
}

}  // namespace svarma
