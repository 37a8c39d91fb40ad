#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svarma/lagpoly.hpp"
#include "svarma/shockdist.hpp"

namespace svarma {

/// Orders and shock families of a structural VARMA(p, q):
///   a(z) y_t = b(z) B eps_t,  eps_{i,t} = sigma_i * (draw from family i).
struct SvarmaSpec {
    int n = 1;
    int p = 0;
    int q = 0;
    std::vector<Family> families;

    SvarmaSpec() = default;
    SvarmaSpec(int n_, int p_, int q_, std::vector<Family> families_);

    [[nodiscard]] int dim_pi2() const { return n * n * p; }
    [[nodiscard]] int dim_pi3() const { return n * n * q; }
    [[nodiscard]] int dim_beta() const { return n * (n - 1); }
    [[nodiscard]] int dim_sigma() const { return n; }
    [[nodiscard]] int dim_lambda() const;
    [[nodiscard]] int dim_theta() const {
        return dim_pi2() + dim_pi3() + dim_beta() + dim_sigma() + dim_lambda();
    }

    /// Offsets of the blocks inside the packed vector.
    [[nodiscard]] int offset_pi3() const { return dim_pi2(); }
    [[nodiscard]] int offset_beta() const { return dim_pi2() + dim_pi3(); }
    [[nodiscard]] int offset_sigma() const { return offset_beta() + dim_beta(); }
    [[nodiscard]] int offset_lambda() const { return offset_sigma() + dim_sigma(); }
    /// Offset of shock i's parameters within the lambda block.
    [[nodiscard]] int lambda_offset(int i) const;
};

/// Parameter point theta = (pi2, pi3, beta, sigma, lambda).
///   pi2 = vec(a_1, ..., a_p), pi3 = vec(b_1, ..., b_q) (column-major),
///   beta = off-diagonal entries of B in column-major order.
struct ThetaVector {
    Eigen::VectorXd pi2;
    Eigen::VectorXd pi3;
    Eigen::VectorXd beta;
    Eigen::VectorXd sigma;
    Eigen::VectorXd lambda;

    [[nodiscard]] Eigen::VectorXd pack() const;
    static ThetaVector unpack(const SvarmaSpec& spec, const Eigen::VectorXd& packed);

    /// Builds theta from structured coefficients.
    static ThetaVector from_parts(const SvarmaSpec& spec, const std::vector<Eigen::MatrixXd>& ar,
                                  const std::vector<Eigen::MatrixXd>& ma, const Eigen::MatrixXd& B,
                                  const Eigen::VectorXd& sigma, const Eigen::VectorXd& lambda);
    /// Same, with family-default lambda.
    static ThetaVector from_parts(const SvarmaSpec& spec, const std::vector<Eigen::MatrixXd>& ar,
                                  const std::vector<Eigen::MatrixXd>& ma, const Eigen::MatrixXd& B,
                                  const Eigen::VectorXd& sigma);
};

/// Throws ErrorKind::invalid_argument if the block sizes do not match the spec.
void check_shape(const SvarmaSpec& spec, const ThetaVector& theta);

[[nodiscard]] std::vector<Eigen::MatrixXd> ar_coeffs(const SvarmaSpec& spec, const ThetaVector& theta);
[[nodiscard]] std::vector<Eigen::MatrixXd> ma_coeffs(const SvarmaSpec& spec, const ThetaVector& theta);
[[nodiscard]] MatrixPolynomial ar_poly(const SvarmaSpec& spec, const ThetaVector& theta);
[[nodiscard]] MatrixPolynomial ma_poly(const SvarmaSpec& spec, const ThetaVector& theta);
[[nodiscard]] Eigen::MatrixXd b_matrix(const SvarmaSpec& spec, const ThetaVector& theta);
/// Shock densities with their lambda slices taken from theta.
[[nodiscard]] std::vector<ComponentDensity> densities(const SvarmaSpec& spec, const ThetaVector& theta);

/// Zero-one matrix with vec(B) = H beta + vec(I).
[[nodiscard]] Eigen::MatrixXd build_H(int n);
[[nodiscard]] Eigen::MatrixXd b_from_beta(const Eigen::VectorXd& beta, int n);
/// Throws ErrorKind::invalid_argument unless B has an exactly unit diagonal.
[[nodiscard]] Eigen::VectorXd beta_from_b(const Eigen::MatrixXd& B);

struct Violation {
    std::string code;
    std::string message;
};

/// Restrictions defining the parameter space. Empty result means theta is admissible.
[[nodiscard]] std::vector<Violation> validate(const SvarmaSpec& spec, const ThetaVector& theta,
                                              double tol = 1e-8);

/// Cheap subset of validate() used inside the optimizer: stability,
/// invertibility, positive sigma, lambda domain and nonsingular B.
[[nodiscard]] bool in_parameter_space(const SvarmaSpec& spec, const ThetaVector& theta);

enum class Scheme { A, B, C };

[[nodiscard]] Scheme scheme_from_string(std::string_view name);
[[nodiscard]] std::string_view to_string(Scheme scheme);

/// Representative of the class {B P D} together with the matching shock scales:
///   B* = B P D,  column j of B P is column perm[j] of B,
///   sigma*_j = sigma_{perm[j]} / |d_j|, so B* diag(sigma*)^2 B*' = B diag(sigma)^2 B'.
struct Normalized {
    Eigen::MatrixXd B;
    Eigen::VectorXd sigma;
    std::vector<int> perm;
    Eigen::VectorXd d;
};

inline constexpr double kNormalizeTol = 1e-10;

// Scheme A: dominant diagonal, unit diagonal. Scheme B: as A with unit-norm
// columns and positive diagonal. Scheme C: unit-norm columns, largest entry
// positive, columns in decreasing lexicographic order (I stays I).

[[nodiscard]] Normalized normalize_scheme_a(const Eigen::MatrixXd& B, const Eigen::VectorXd& sigma,
                                            double tol = kNormalizeTol);
[[nodiscard]] Normalized normalize_scheme_b(const Eigen::MatrixXd& B, const Eigen::VectorXd& sigma,
                                            double tol = kNormalizeTol);
[[nodiscard]] Normalized normalize_scheme_c(const Eigen::MatrixXd& B, const Eigen::VectorXd& sigma,
                                            double tol = kNormalizeTol);
[[nodiscard]] Normalized normalize(Scheme scheme, const Eigen::MatrixXd& B, const Eigen::VectorXd& sigma,
                                   double tol = kNormalizeTol);

struct NormalizedModel {
    SvarmaSpec spec;
    ThetaVector theta;
    std::vector<int> perm;
};

/// Applies scheme A to B(beta) and relabels sigma, lambda and the shock
/// families consistently, so the likelihood is unchanged.
[[nodiscard]] NormalizedModel normalize_theta(const SvarmaSpec& spec, const ThetaVector& theta);

/// Spec whose families are permuted as perm (family j of the result is family perm[j]).
[[nodiscard]] SvarmaSpec permute_families(const SvarmaSpec& spec, const std::vector<int>& perm);

}  // namespace svarma
