#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "svarma/random.hpp"

namespace svarma {

enum class Family { laplace, student_t, gaussian };

[[nodiscard]] std::string_view to_string(Family family);
/// Throws ErrorKind::parse for unknown names.
[[nodiscard]] Family family_from_string(std::string_view name);

/// Number of shape parameters carried by a family (1 for student_t: nu).
[[nodiscard]] int lambda_dim(Family family);

/// Lower bound on nu enforced by the optimizer.
inline constexpr double kStudentNuMin = 2.1;

/// A zero-mean, unit-variance density f(x; lambda) for one structural shock.
///
/// laplace    f(x) = exp(-sqrt2 |x|) / sqrt2
/// student_t  t(nu) rescaled by sqrt((nu - 2) / nu), nu > 2
/// gaussian   standard normal
///
/// The e_* members are derivatives of log f. The Laplace log-density has a
/// kink at 0, where e_x and e_xx are defined as 0.
class ComponentDensity {
public:
    explicit ComponentDensity(Family family);
    ComponentDensity(Family family, Eigen::VectorXd lambda);

    [[nodiscard]] Family family() const noexcept { return family_; }
    [[nodiscard]] const Eigen::VectorXd& lambda() const noexcept { return lambda_; }
    [[nodiscard]] int lambda_dim() const noexcept { return static_cast<int>(lambda_.size()); }

    /// Family defaults used for starting values (student_t: nu = 8).
    [[nodiscard]] static Eigen::VectorXd default_lambda(Family family);
    /// Componentwise lower bounds of the admissible lambda region.
    [[nodiscard]] static Eigen::VectorXd lambda_lower_bound(Family family);
    [[nodiscard]] static bool lambda_admissible(Family family, const Eigen::VectorXd& lambda);

    [[nodiscard]] double log_density(double x) const;
    [[nodiscard]] double e_x(double x) const;
    [[nodiscard]] double e_xx(double x) const;
    [[nodiscard]] Eigen::VectorXd e_lambda(double x) const;
    [[nodiscard]] Eigen::VectorXd e_xlambda(double x) const;
    [[nodiscard]] Eigen::MatrixXd e_lambdalambda(double x) const;

    /// True where log f is not twice differentiable.
    [[nodiscard]] bool is_kink(double x) const { return family_ == Family::laplace && x == 0.0; }
    [[nodiscard]] bool has_kink() const { return family_ == Family::laplace; }

    [[nodiscard]] double sample(Rng& rng) const;

private:
    Family family_;
    Eigen::VectorXd lambda_;
};

}  // namespace svarma
