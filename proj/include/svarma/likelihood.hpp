#pragma once

#include <Eigen/Dense>

#include "svarma/model.hpp"

namespace svarma {

/// L_T(theta) = (1/T) sum_t l_t with
///   l_t = sum_i log f_i(eps_{i,t} / sigma_i) - log|det B| - sum_i log sigma_i.
/// Returns -inf when B(beta) is singular.
[[nodiscard]] double loglik(const SvarmaSpec& spec, const ThetaVector& theta, const Eigen::MatrixXd& y);

struct LoglikEval {
    double value = 0.0;
    Eigen::VectorXd score;
};

/// Value and analytic gradient in one pass over the data.
[[nodiscard]] LoglikEval loglik_and_score(const SvarmaSpec& spec, const ThetaVector& theta,
                                          const Eigen::MatrixXd& y);

/// Gradient of loglik, blocks ordered (pi2, pi3, beta, sigma, lambda).
/// Throws ErrorKind::singular_matrix when B(beta) is singular.
[[nodiscard]] Eigen::VectorXd score(const SvarmaSpec& spec, const ThetaVector& theta,
                                    const Eigen::MatrixXd& y);

/// Per-period score contributions l_{theta,t}, one row per t.
[[nodiscard]] Eigen::MatrixXd score_contributions(const SvarmaSpec& spec, const ThetaVector& theta,
                                                  const Eigen::MatrixXd& y);

struct HessianOptions {
    /// Central-difference step relative to max(|theta_k|, 1). Zero selects
    /// 1e-5 for smooth densities and a sample-size dependent step when a
    /// shock density has a kink (see default_hessian_step).
    double rel_step = 0.0;
};

/// Step used when HessianOptions::rel_step is zero.
[[nodiscard]] double default_hessian_step(const SvarmaSpec& spec, Eigen::Index T);

/// Central differences of the analytic score, before symmetrization.
[[nodiscard]] Eigen::MatrixXd hessian_raw(const SvarmaSpec& spec, const ThetaVector& theta,
                                          const Eigen::MatrixXd& y, HessianOptions options = {});

/// A_T: (M + M') / 2 with M = hessian_raw.
[[nodiscard]] Eigen::MatrixXd hessian(const SvarmaSpec& spec, const ThetaVector& theta,
                                      const Eigen::MatrixXd& y, HessianOptions options = {});

/// B_T = (1/T) sum_t l_{theta,t} l_{theta,t}'.
[[nodiscard]] Eigen::MatrixXd opg(const SvarmaSpec& spec, const ThetaVector& theta,
                                  const Eigen::MatrixXd& y);

enum class CovMethod { opg, hessian };

struct AsyCov {
    Eigen::MatrixXd cov;  ///< covariance of theta-hat (already divided by T)
    Eigen::VectorXd se;
    double condition = 0.0;
};

/// Inverts an information matrix estimate. Throws ErrorKind::singular_matrix
/// (message carries the condition number) when it is not safely positive definite.
[[nodiscard]] AsyCov covariance_from_information(const Eigen::MatrixXd& information, Eigen::Index T);

[[nodiscard]] AsyCov asy_cov(const SvarmaSpec& spec, const ThetaVector& theta, const Eigen::MatrixXd& y,
                             CovMethod method, HessianOptions options = {});

}  // namespace svarma
