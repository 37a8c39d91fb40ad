#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace svarma {

using cplx = std::complex<double>;

/// Sign convention of a matrix lag polynomial.
///   ar: I - c_1 z - ... - c_d z^d
///   ma: I + c_1 z + ... + c_d z^d
enum class Sign { ar, ma };

/// Matrix polynomial in the lag operator with identity leading term.
class MatrixPolynomial {
public:
    MatrixPolynomial(Eigen::Index dim, Sign sign, std::vector<Eigen::MatrixXd> coeffs = {});

    static MatrixPolynomial identity(Eigen::Index dim, Sign sign = Sign::ma) {
        return MatrixPolynomial(dim, sign);
    }

    [[nodiscard]] Eigen::Index dim() const noexcept { return dim_; }
    [[nodiscard]] Sign sign() const noexcept { return sign_; }
    [[nodiscard]] int degree() const noexcept { return static_cast<int>(coeffs_.size()); }
    /// c_1..c_d as stored (before applying the sign convention).
    [[nodiscard]] const std::vector<Eigen::MatrixXd>& coeffs() const noexcept { return coeffs_; }

    /// Coefficient of z^j in the expanded polynomial, signs applied; j = 0 gives I.
    [[nodiscard]] Eigen::MatrixXd term(int j) const;

    [[nodiscard]] Eigen::MatrixXcd eval(cplx z) const;

private:
    Eigen::Index dim_;
    Sign sign_;
    std::vector<Eigen::MatrixXd> coeffs_;
};

/// Default margin by which determinantal roots must exceed the unit circle.
inline constexpr double kRootMargin = 1e-8;

/// Coefficients d_0..d_{n*deg} of det(poly(z)), obtained by evaluating the
/// determinant on a circle and inverting the discrete Fourier transform.
[[nodiscard]] std::vector<double> det_coefficients(const MatrixPolynomial& poly);

/// All roots of det(poly(z)) with multiplicity.
[[nodiscard]] std::vector<cplx> det_roots(const MatrixPolynomial& poly);

/// Smallest modulus among the determinantal roots; +inf when det is constant.
[[nodiscard]] double min_root_modulus(const MatrixPolynomial& poly);

[[nodiscard]] bool is_stable(const MatrixPolynomial& a, double margin = kRootMargin);
[[nodiscard]] bool is_invertible(const MatrixPolynomial& b, double margin = kRootMargin);

/// psi_0..psi_K of poly(z)^{-1}. Throws ErrorKind::domain unless poly has no
/// determinantal roots in the closed unit disk.
[[nodiscard]] std::vector<Eigen::MatrixXd> power_series_inverse(const MatrixPolynomial& poly, int K);

/// k_0..k_K of k(z) = a(z)^{-1} b(z). Throws ErrorKind::domain if a is unstable.
[[nodiscard]] std::vector<Eigen::MatrixXd> transfer_coeffs(const MatrixPolynomial& a,
                                                           const MatrixPolynomial& b, int K);

/// Numerical surrogate for left coprimeness: [a(z), b(z)] keeps rank n (smallest
/// singular value above tol) at every root of det a(z). Roots of det b that
/// are not roots of det a leave a(z) nonsingular, so they need no check.
[[nodiscard]] bool left_coprime_check(const MatrixPolynomial& a, const MatrixPolynomial& b,
                                      double tol = 1e-8);

/// Replaces the MA factor b with the minimum-phase factor that has the same
/// spectral density b(z) cov b'(1/z). Returned unchanged when b is already
/// invertible. Throws ErrorKind::not_factorizable for roots on the unit circle.
[[nodiscard]] std::pair<MatrixPolynomial, Eigen::MatrixXd> mirror_noninvertible_roots(
    const MatrixPolynomial& b, const Eigen::MatrixXd& cov, double margin = kRootMargin);

/// gamma_s = sum_j b_j cov b_{j+s}' for s = 0..degree, with b_0 = I.
[[nodiscard]] std::vector<Eigen::MatrixXd> ma_autocovariances(const MatrixPolynomial& b,
                                                              const Eigen::MatrixXd& cov);

}  // namespace svarma
