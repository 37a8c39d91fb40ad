#include "svarma/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "svarma/error.hpp"

namespace svarma {

namespace {

constexpr double kArmijo = 1e-4;

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

// Coordinates pinned at a bound with the gradient pushing further out.
Eigen::Array<bool, Eigen::Dynamic, 1> active_set(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                                 const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    Eigen::Array<bool, Eigen::Dynamic, 1> active(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        active[i] = (x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0);
    }
    return active;
}

Eigen::VectorXd projected_gradient(const Eigen::VectorXd& g, const Eigen::Array<bool, Eigen::Dynamic, 1>& active) {
    return active.select(Eigen::VectorXd::Zero(g.size()), g);
}

// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    Eigen::VectorXd u = v;
    std::sort(u.data(), u.data() + u.size(), std::greater<>());
    double cum = 0.0, tau = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        cum += u[i];
        const double t = (cum - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) tau = t;
    }
    return (v.array() - tau).cwiseMax(0.0);
}

// Norm of the minimum-norm point in the convex hull of the columns of G,
// by projected gradient descent on the simplex.
double min_norm_hull(const Eigen::MatrixXd& G) {
    const Eigen::MatrixXd Q = G.transpose() * G;
    const double L = Q.diagonal().sum();
    if (!(L > 0.0)) return 0.0;
    Eigen::VectorXd w = Eigen::VectorXd::Constant(G.cols(), 1.0 / static_cast<double>(G.cols()));
    for (int it = 0; it < 500; ++it) w = project_simplex(w - (Q * w) / L);
    return std::sqrt(std::max(w.dot(Q * w), 0.0));
}

}  // namespace

QuasiNewtonResult minimize_box_bfgs(const Objective& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper, const QuasiNewtonOptions& options) {
    const auto dim = x0.size();
    QuasiNewtonResult res;
    res.x = project(x0, lower, upper);
    auto current = f(res.x);
    ++res.evaluations;
    if (!current) throw Error(ErrorKind::domain, "minimize_box_bfgs: starting point is infeasible");
    res.value = current->value;
    res.grad = current->grad;

    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(dim, dim);
    bool fresh = true;
    int stalls = 0;
    std::vector<Eigen::VectorXd> hist_x, hist_g;
    const std::size_t hist_max = static_cast<std::size_t>(dim) + 1;

    auto finish = [&](bool converged, const char* reason) {
        res.converged = converged;
        res.reason = reason;
        return res;
    };

    for (res.iterations = 0; res.iterations < options.max_iter; ++res.iterations) {
        const auto active = active_set(res.x, res.grad, lower, upper);
        const Eigen::VectorXd pg = projected_gradient(res.grad, active);
        res.proj_grad_norm = pg.norm();
        if (res.proj_grad_norm <= options.grad_tol) return finish(true, "gradient");
        if (options.kinked && options.stall_grad_tol > 0.0) {
            hist_x.push_back(res.x);
            hist_g.push_back(pg);
            if (hist_x.size() > hist_max) {
                hist_x.erase(hist_x.begin());
                hist_g.erase(hist_g.begin());
            }
            const double radius = options.hull_radius * std::max(1.0, res.x.norm());
            std::vector<Eigen::Index> near;
            for (std::size_t k = 0; k < hist_x.size(); ++k)
                if ((hist_x[k] - res.x).norm() <= radius) near.push_back(static_cast<Eigen::Index>(k));
            if (near.size() >= 2) {
                Eigen::MatrixXd G(dim, static_cast<Eigen::Index>(near.size()));
                for (std::size_t k = 0; k < near.size(); ++k) G.col(static_cast<Eigen::Index>(k)) = hist_g[near[k]];
                if (min_norm_hull(G) <= options.stall_grad_tol) return finish(true, "stationary");
            }
        }

        Eigen::VectorXd dir = -(Hinv * pg);
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (active[i]) dir[i] = 0.0;
        }
        if (!(pg.dot(dir) < 0.0)) {
            Hinv.setIdentity();
            fresh = true;
            dir = -pg;
        }
        // Unscaled first steps can be far too long; cap the initial trial length.
        double alpha = fresh ? std::min(1.0, 1.0 / std::max(dir.cwiseAbs().maxCoeff(), 1e-300)) : 1.0;

        bool accepted = false;
        Eigen::VectorXd x_new;
        ValueGrad trial{0.0, {}};
        for (int bt = 0; bt < options.max_backtracks; ++bt, alpha *= 0.5) {
            x_new = project(res.x + alpha * dir, lower, upper);
            auto eval = f(x_new);
            ++res.evaluations;
            if (!eval || !std::isfinite(eval->value)) continue;
            if (eval->value <= res.value + kArmijo * res.grad.dot(x_new - res.x)) {
                trial = std::move(*eval);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!fresh) {
                Hinv.setIdentity();
                fresh = true;
                continue;
            }
            const bool ok = options.stall_grad_tol > 0.0 && res.proj_grad_norm <= options.stall_grad_tol;
            return finish(ok, ok ? "stationary" : "line_search");
        }

        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd yv = trial.grad - res.grad;
        const double improvement = res.value - trial.value;
        res.x = x_new;
        res.value = trial.value;
        res.grad = trial.grad;

        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            if (fresh) {
                Hinv *= sy / yv.squaredNorm();
                fresh = false;
            }
            const double rho = 1.0 / sy;
            const Eigen::VectorXd Hy = Hinv * yv;
            // H <- (I - rho s y') H (I - rho y s') + rho s s'
            Hinv += (rho * rho * yv.dot(Hy) + rho) * (s * s.transpose()) -
                    rho * (Hy * s.transpose() + s * Hy.transpose());
        }

        stalls = improvement <= 1e-15 * (1.0 + std::abs(res.value)) ? stalls + 1 : 0;
        if (stalls >= 5) {
            const auto act = active_set(res.x, res.grad, lower, upper);
            res.proj_grad_norm = projected_gradient(res.grad, act).norm();
            if (res.proj_grad_norm <= options.grad_tol) return finish(true, "gradient");
            const bool ok = options.stall_grad_tol > 0.0 && res.proj_grad_norm <= options.stall_grad_tol;
            return finish(ok, ok ? "stationary" : "no_progress");
        }
    }
    const auto act = active_set(res.x, res.grad, lower, upper);
    res.proj_grad_norm = projected_gradient(res.grad, act).norm();
    if (res.proj_grad_norm <= options.grad_tol) return finish(true, "gradient");
    return finish(false, "max_iter");
}

}  // namespace svarma
