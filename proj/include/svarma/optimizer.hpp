#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace svarma {

/// Value and gradient of a function to minimize; std::nullopt marks a point
/// outside the feasible region, which the line search treats as a rejected step.
struct ValueGrad {
    double value;
    Eigen::VectorXd grad;
};
using Objective = std::function<std::optional<ValueGrad>(const Eigen::VectorXd&)>;

struct QuasiNewtonOptions {
    int max_iter = 500;
    /// Converged once the Euclidean norm of the projected gradient is below this.
    double grad_tol = 1e-6;
    /// When progress stalls, accept the point as stationary if the projected
    /// gradient is below this (used for objectives with kinks).
    double stall_grad_tol = 0.0;
    /// The objective has kinks: also stop once the smallest convex combination
    /// of recent gradients taken within hull_radius * max(1, |x|) of the
    /// current point is below stall_grad_tol (an epsilon-subgradient test).
    bool kinked = false;
    double hull_radius = 1e-4;
    int max_backtracks = 60;
};

struct QuasiNewtonResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd grad;
    double proj_grad_norm = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string reason;
};

/// Projected BFGS for min f(x) subject to lower <= x <= upper (use +-inf for
/// free coordinates). Coordinates at an active bound whose gradient points
/// outward are frozen for the step; the inverse-Hessian approximation is
/// updated only under positive curvature. Throws ErrorKind::domain if x0 is
/// infeasible.
[[nodiscard]] QuasiNewtonResult minimize_box_bfgs(const Objective& f, const Eigen::VectorXd& x0,
                                                  const Eigen::VectorXd& lower,
                                                  const Eigen::VectorXd& upper,
                                                  const QuasiNewtonOptions& options = {});

}  // namespace svarma
