#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "svarma/model.hpp"
#include "svarma/random.hpp"

namespace svarma {

/// Observations y_1..y_T stored one row per period. Presample values of y
/// and u are zero throughout (conditional-likelihood convention).
struct SamplePath {
    Eigen::MatrixXd y;
    /// Structural shocks eps_t that generated y (rows aligned with y).
    Eigen::MatrixXd shocks;
};

/// u_t = y_t - sum_i a_i y_{t-i} - sum_j b_j u_{t-j}, zero presample.
[[nodiscard]] Eigen::MatrixXd residuals_u(const SvarmaSpec& spec, const ThetaVector& theta,
                                          const Eigen::MatrixXd& y);

struct StructuralShocks {
    Eigen::MatrixXd eps;           ///< B^{-1} u_t
    Eigen::MatrixXd standardized;  ///< Sigma^{-1} B^{-1} u_t
};

/// Throws ErrorKind::singular_matrix when B(beta) is singular.
[[nodiscard]] StructuralShocks structural_shocks(const SvarmaSpec& spec, const ThetaVector& theta,
                                                 const Eigen::MatrixXd& y);

/// Runs the model forward from zero presample values with the given
/// structural shocks (one row per period).
[[nodiscard]] Eigen::MatrixXd simulate_from_shocks(const SvarmaSpec& spec, const ThetaVector& theta,
                                                   const Eigen::MatrixXd& eps);

/// Draws shocks from the model densities, discards `burnin` leading periods.
/// Throws ErrorKind::validation for theta outside the parameter space.
[[nodiscard]] SamplePath simulate(const SvarmaSpec& spec, const ThetaVector& theta, int T, Rng& rng,
                                  int burnin = 500);

/// gamma(s) = E[y_t y_{t-s}'] for s = 0..max_lag.
[[nodiscard]] std::vector<Eigen::MatrixXd> autocovariance(const SvarmaSpec& spec,
                                                          const ThetaVector& theta, int max_lag);

/// f(lambda) = k(z) B Sigma^2 B' k(z)^H at z = exp(-i lambda); no 1/(2 pi) factor.
[[nodiscard]] std::vector<Eigen::MatrixXcd> spectral_density(const SvarmaSpec& spec,
                                                             const ThetaVector& theta,
                                                             std::span<const double> freqs);

/// Transfer coefficients k_0, k_1, ... until p consecutive terms fall below
/// `tol` in max norm (at most `cap` terms), plus `extra` further terms.
[[nodiscard]] std::vector<Eigen::MatrixXd> truncated_transfer(const SvarmaSpec& spec,
                                                              const ThetaVector& theta, int extra = 0,
                                                              double tol = 1e-14, int cap = 10000);

}  // namespace svarma
