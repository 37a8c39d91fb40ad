#include "svarma/shockdist.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "svarma/error.hpp"

namespace svarma {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

}  // namespace

std::string_view to_string(Family family) {
    switch (family) {
        case Family::laplace:
            return "laplace";
        case Family::student_t:
            return "student_t";
        case Family::gaussian:
            return "gaussian";
    }
    return "unknown";
}

Family family_from_string(std::string_view name) {
    if (name == "laplace") return Family::laplace;
    if (name == "student_t" || name == "t") return Family::student_t;
    if (name == "gaussian" || name == "normal") return Family::gaussian;
    throw Error(ErrorKind::parse, "unknown density family '" + std::string(name) + "'");
}

int lambda_dim(Family family) { return family == Family::student_t ? 1 : 0; }

ComponentDensity::ComponentDensity(Family family)
    : ComponentDensity(family, default_lambda(family)) {}

ComponentDensity::ComponentDensity(Family family, Eigen::VectorXd lambda)
    : family_(family), lambda_(std::move(lambda)) {
    if (lambda_.size() != svarma::lambda_dim(family_)) {
        throw Error(ErrorKind::invalid_argument, "ComponentDensity: wrong number of parameters for " +
                                                     std::string(to_string(family_)));
    }
    if (!lambda_admissible(family_, lambda_)) {
        throw Error(ErrorKind::domain, "ComponentDensity: parameter outside the admissible region");
    }
}

Eigen::VectorXd ComponentDensity::default_lambda(Family family) {
    if (family == Family::student_t) return Eigen::VectorXd::Constant(1, 8.0);
    return Eigen::VectorXd(0);
}

Eigen::VectorXd ComponentDensity::lambda_lower_bound(Family family) {
    if (family == Family::student_t) return Eigen::VectorXd::Constant(1, kStudentNuMin);
    return Eigen::VectorXd(0);
}

bool ComponentDensity::lambda_admissible(Family family, const Eigen::VectorXd& lambda) {
    if (lambda.size() != svarma::lambda_dim(family)) return false;
    if (family == Family::student_t) return std::isfinite(lambda[0]) && lambda[0] > 2.0;
    return true;
}

double ComponentDensity::log_density(double x) const {
    switch (family_) {
        case Family::laplace:
            return -kSqrt2 * std::abs(x) - 0.5 * std::log(2.0);
        case Family::gaussian:
            return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
        case Family::student_t: {
            const double nu = lambda_[0];
            return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                   0.5 * std::log(std::numbers::pi * (nu - 2.0)) -
                   0.5 * (nu + 1.0) * std::log1p(x * x / (nu - 2.0));
        }
    }
    return 0.0;
}

double ComponentDensity::e_x(double x) const {
    switch (family_) {
        case Family::laplace:
            return x > 0.0 ? -kSqrt2 : (x < 0.0 ? kSqrt2 : 0.0);
        case Family::gaussian:
            return -x;
        case Family::student_t: {
            const double nu = lambda_[0];
            return -(nu + 1.0) * x / (nu - 2.0 + x * x);
        }
    }
    return 0.0;
}

double ComponentDensity::e_xx(double x) const {
    switch (family_) {
        case Family::laplace:
            return 0.0;
        case Family::gaussian:
            return -1.0;
        case Family::student_t: {
            const double nu = lambda_[0];
            const double r = nu - 2.0 + x * x;
            return -(nu + 1.0) * (nu - 2.0 - x * x) / (r * r);
        }
    }
    return 0.0;
}

Eigen::VectorXd ComponentDensity::e_lambda(double x) const {
    Eigen::VectorXd out(lambda_dim());
    if (family_ == Family::student_t) {
        using boost::math::digamma;
        const double nu = lambda_[0];
        const double m = nu - 2.0;
        const double r = m + x * x;
        out[0] = 0.5 * digamma(0.5 * (nu + 1.0)) - 0.5 * digamma(0.5 * nu) - 0.5 / m -
                 0.5 * std::log1p(x * x / m) + 0.5 * (nu + 1.0) * x * x / (m * r);
    }
    return out;
}

Eigen::VectorXd ComponentDensity::e_xlambda(double x) const {
    Eigen::VectorXd out(lambda_dim());
    if (family_ == Family::student_t) {
        const double r = lambda_[0] - 2.0 + x * x;
        out[0] = x * (3.0 - x * x) / (r * r);
    }
    return out;
}

Eigen::MatrixXd ComponentDensity::e_lambdalambda(double x) const {
    Eigen::MatrixXd out(lambda_dim(), lambda_dim());
    if (family_ == Family::student_t) {
        using boost::math::trigamma;
        const double nu = lambda_[0];
        const double m = nu - 2.0;
        const double x2 = x * x;
        const double r = m + x2;
        // d/dnu of (nu + 1) x^2 / (2 m r)
        const double dg = (m * r - (nu + 1.0) * (r + m)) / (m * r * m * r);
        out(0, 0) = 0.25 * trigamma(0.5 * (nu + 1.0)) - 0.25 * trigamma(0.5 * nu) +
                    0.5 / (m * m) + 0.5 * x2 / (m * r) + 0.5 * x2 * dg;
    }
    return out;
}

double ComponentDensity::sample(Rng& rng) const {
    switch (family_) {
        case Family::laplace: {
            const double u = rng.uniform() - 0.5;
            const double mag = -std::log1p(-2.0 * std::abs(u)) / kSqrt2;
            return u < 0.0 ? -mag : mag;
        }
        case Family::gaussian:
            return rng.normal();
        case Family::student_t: {
            const double nu = lambda_[0];
            const double z = rng.normal();
            const double chi2 = 2.0 * rng.gamma(0.5 * nu);
            return z / std::sqrt(chi2 / nu) * std::sqrt((nu - 2.0) / nu);
        }
    }
    return 0.0;
}

}  // namespace svarma
