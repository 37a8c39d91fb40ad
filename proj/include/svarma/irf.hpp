#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "svarma/estimate.hpp"
#include "svarma/model.hpp"

namespace svarma {

/// unit: Phi_j = k_j B (so Phi_0 = B).  one_sd: Phi_j = k_j B Sigma.
enum class ShockSize { unit, one_sd };

[[nodiscard]] std::string_view to_string(ShockSize size);
[[nodiscard]] ShockSize shock_size_from_string(std::string_view name);

struct IrfBands {
    std::vector<Eigen::MatrixXd> lower;
    std::vector<Eigen::MatrixXd> upper;
    double level = 0.95;
    int replications = 0;  ///< replicates kept
    int dropped = 0;       ///< replicates whose re-fit did not converge
    /// Bootstrap standard deviations of the normalized B and sigma.
    Eigen::MatrixXd sd_b;
    Eigen::VectorXd sd_sigma;
};

struct IrfResult {
    /// phi[j](r, c): response of variable r at horizon j to shock c.
    std::vector<Eigen::MatrixXd> phi;
    /// fevd[h](r, c): share of the h-step forecast error variance of r due to c.
    std::vector<Eigen::MatrixXd> fevd;
    std::optional<IrfBands> bands;
    int horizon = 0;
    ShockSize shock_size = ShockSize::one_sd;
};

[[nodiscard]] std::vector<Eigen::MatrixXd> irf_coefficients(const SvarmaSpec& spec, const ThetaVector& theta,
                                                            int H, ShockSize size);

/// Shares sum_{j<=h} (Phi_j Sigma)_{rc}^2 / sum_c sum_{j<=h} (Phi_j Sigma)_{rc}^2 with Phi_j = k_j B.
/// Throws ErrorKind::degenerate if a variable has zero forecast error variance.
[[nodiscard]] std::vector<Eigen::MatrixXd> fevd(const SvarmaSpec& spec, const ThetaVector& theta, int H);

/// Point impulse responses and variance decomposition.
[[nodiscard]] IrfResult irf(const SvarmaSpec& spec, const ThetaVector& theta, int H,
                            ShockSize size = ShockSize::one_sd);

struct BootstrapOptions {
    int replications = 1000;
    double level = 0.95;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    ShockSize shock_size = ShockSize::one_sd;
    /// Maximum share of non-converged replicates before giving up.
    double max_dropped = 0.2;
    EstimateOptions estimate{};
};

/// Residual recursive bootstrap: resample centered structural residuals,
/// regenerate paths from theta-hat with zero presample, re-fit (started at
/// theta-hat, scheme-A normalized) and take percentile bands per entry.
[[nodiscard]] IrfResult bootstrap_irf(const SvarmaSpec& spec, const ThetaVector& theta_hat,
                                      const Eigen::MatrixXd& y, int H, const BootstrapOptions& options = {});

/// Empirical (inverted-CDF) quantile of sorted values; prob in [0, 1].
[[nodiscard]] double empirical_quantile(const std::vector<double>& sorted, double prob);

}  // namespace svarma
