#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svarma/likelihood.hpp"
#include "svarma/model.hpp"

namespace svarma {

struct EstimateOptions {
    int max_iter = 500;
    double grad_tol = 1e-6;
    double sigma_min = 1e-8;
    std::uint64_t seed = 0;
    /// Scheme used for the reported (B, sigma); theta-hat itself is always
    /// stored in scheme A since beta only parameterizes unit-diagonal B.
    Scheme scheme = Scheme::A;
    /// Extra optimizer runs from randomly perturbed starting points.
    int restarts = 0;
    bool covariance = true;
    /// Projected-gradient level accepted as stationary when the line search
    /// stalls. Negative selects the default: grad_tol for smooth densities,
    /// sqrt(dim) * 10 / T when a density has a kink (the sample likelihood is
    /// then only piecewise smooth and its maximizer sits on a kink).
    double stall_grad_tol = -1.0;
    HessianOptions hessian{};
};

struct EstimationResult {
    /// Families in the order of the normalized shocks.
    SvarmaSpec spec;
    /// Scheme-A normalized estimate.
    ThetaVector theta;
    double loglik_value = 0.0;
    double score_norm = 0.0;
    Eigen::MatrixXd cov_opg;
    Eigen::MatrixXd cov_hessian;
    Eigen::VectorXd se;          ///< from cov_opg
    Eigen::VectorXd se_hessian;  ///< from cov_hessian
    std::string cov_error;       ///< non-empty when a covariance could not be formed
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string termination;
    /// (B, sigma) under the requested scheme.
    Scheme scheme = Scheme::A;
    Eigen::MatrixXd b_scheme;
    Eigen::VectorXd sigma_scheme;
    std::vector<Violation> violations;
    Eigen::Index T = 0;
};

/// Two-stage starting value: long autoregression for innovation proxies,
/// least squares on lagged y and proxies, unit-diagonal Cholesky factor for
/// (B, sigma), then MA root mirroring and AR shrinkage into the parameter space.
/// Throws ErrorKind::rank_deficient for degenerate data.
[[nodiscard]] ThetaVector initial_estimate(const Eigen::MatrixXd& y, const SvarmaSpec& spec);

/// Local conditional ML. Non-convergence is reported in the result, not thrown.
[[nodiscard]] EstimationResult fit(const Eigen::MatrixXd& y, const SvarmaSpec& spec,
                                   const EstimateOptions& options = {},
                                   const std::optional<ThetaVector>& start = std::nullopt);

struct OrderRow {
    int p = 0;
    int q = 0;
    int dim = 0;
    double loglik = 0.0;
    double aic = 0.0;
    bool converged = false;
    std::string error;
};

struct OrderSelection {
    int p = 0;
    int q = 0;
    std::vector<OrderRow> table;
};

/// Fits every (p, q) in [0, p_max] x [0, q_max]; AIC = -2 T L_T + 2 dim(theta),
/// +inf for cells that fail. `tmpl` supplies n and the shock families.
[[nodiscard]] OrderSelection select_order(const Eigen::MatrixXd& y, const SvarmaSpec& tmpl, int p_max,
                                          int q_max, const EstimateOptions& options = {},
                                          unsigned threads = 1);

}  // namespace svarma
