#include "svarma/irf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "svarma/error.hpp"
#include "svarma/filter.hpp"
#include "svarma/parallel.hpp"
#include "svarma/random.hpp"

namespace svarma {

std::string_view to_string(ShockSize size) { return size == ShockSize::unit ? "unit" : "one-sd"; }

ShockSize shock_size_from_string(std::string_view name) {
    if (name == "unit") return ShockSize::unit;
    if (name == "one-sd" || name == "one_sd" || name == "sd") return ShockSize::one_sd;
    throw Error(ErrorKind::parse, "unknown shock size '" + std::string(name) + "'");
}

std::vector<Eigen::MatrixXd> irf_coefficients(const SvarmaSpec& spec, const ThetaVector& theta, int H,
                                              ShockSize size) {
    if (H < 0) throw Error(ErrorKind::invalid_argument, "irf: horizon must be >= 0");
    Eigen::MatrixXd impact = b_matrix(spec, theta);
    if (size == ShockSize::one_sd) impact = impact * theta.sigma.asDiagonal();
    auto k = transfer_coeffs(ar_poly(spec, theta), ma_poly(spec, theta), H);
    for (auto& m : k) m = m * impact;
    if (size == ShockSize::unit) k[0] = impact;
    return k;
}

std::vector<Eigen::MatrixXd> fevd(const SvarmaSpec& spec, const ThetaVector& theta, int H) {
    const auto phi = irf_coefficients(spec, theta, H, ShockSize::one_sd);
    std::vector<Eigen::MatrixXd> out;
    out.reserve(H + 1);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(spec.n, spec.n);
    for (int h = 0; h <= H; ++h) {
        acc += phi[h].cwiseAbs2();
        const Eigen::VectorXd total = acc.rowwise().sum();
        if (!(total.array() > 0.0).all()) {
            throw Error(ErrorKind::degenerate, "fevd: a variable has zero forecast error variance");
        }
        out.push_back(total.cwiseInverse().asDiagonal() * acc);
    }
    return out;
}

IrfResult irf(const SvarmaSpec& spec, const ThetaVector& theta, int H, ShockSize size) {
    IrfResult out;
    out.horizon = H;
    out.shock_size = size;
    out.phi = irf_coefficients(spec, theta, H, size);
    out.fevd = fevd(spec, theta, H);
    return out;
}

double empirical_quantile(const std::vector<double>& sorted, double prob) {
    if (sorted.empty()) throw Error(ErrorKind::invalid_argument, "empirical_quantile: no values");
    const auto R = static_cast<double>(sorted.size());
    auto idx = static_cast<long>(std::ceil(prob * R - 1e-9)) - 1;
    idx = std::clamp<long>(idx, 0, static_cast<long>(sorted.size()) - 1);
    return sorted[static_cast<std::size_t>(idx)];
}

IrfResult bootstrap_irf(const SvarmaSpec& spec, const ThetaVector& theta_hat, const Eigen::MatrixXd& y, int H,
                        const BootstrapOptions& options) {
    if (options.replications < 2) {
        throw Error(ErrorKind::invalid_argument, "bootstrap_irf: need at least 2 replications");
    }
    if (!(options.level > 0.0 && options.level < 1.0)) {
        throw Error(ErrorKind::invalid_argument, "bootstrap_irf: level must lie in (0, 1)");
    }
    IrfResult out = irf(spec, theta_hat, H, options.shock_size);

    Eigen::MatrixXd eps = structural_shocks(spec, theta_hat, y).eps;
    eps.rowwise() -= eps.colwise().mean();
    const auto T = eps.rows();
    const int n = spec.n;
    const auto R = static_cast<std::size_t>(options.replications);

    struct Replicate {
        bool ok = false;
        std::vector<Eigen::MatrixXd> phi;
        Eigen::MatrixXd B;
        Eigen::VectorXd sigma;
    };
    std::vector<Replicate> reps(R);
    EstimateOptions est = options.estimate;
    est.covariance = false;

    parallel_for(R, options.threads, [&](std::size_t r) {
        Rng rng(derive_seed(options.seed, r));
        Eigen::MatrixXd draw(T, n);
        for (Eigen::Index t = 0; t < T; ++t) draw.row(t) = eps.row(static_cast<Eigen::Index>(rng.below(T)));
        const Eigen::MatrixXd y_star = simulate_from_shocks(spec, theta_hat, draw);
        try {
            const EstimationResult fr = fit(y_star, spec, est, theta_hat);
            if (!fr.converged) return;
            reps[r].phi = irf_coefficients(fr.spec, fr.theta, H, options.shock_size);
            reps[r].B = b_matrix(fr.spec, fr.theta);
            reps[r].sigma = fr.theta.sigma;
            reps[r].ok = true;
        } catch (const Error&) {
            // counted as dropped below
        }
    });

    IrfBands bands;
    bands.level = options.level;
    std::vector<const Replicate*> kept;
    for (const auto& rep : reps) {
        if (rep.ok) kept.push_back(&rep);
    }
    bands.replications = static_cast<int>(kept.size());
    bands.dropped = static_cast<int>(R - kept.size());
    if (kept.empty() || static_cast<double>(bands.dropped) > options.max_dropped * static_cast<double>(R)) {
        throw Error(ErrorKind::degenerate, "bootstrap_irf: " + std::to_string(bands.dropped) + " of " +
                                               std::to_string(R) + " replicates failed to converge");
    }

    const double alpha = 1.0 - options.level;
    std::vector<double> values(kept.size());
    for (int j = 0; j <= H; ++j) {
        Eigen::MatrixXd lo(n, n), hi(n, n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                for (std::size_t k = 0; k < kept.size(); ++k) values[k] = kept[k]->phi[j](r, c);
                std::sort(values.begin(), values.end());
                lo(r, c) = empirical_quantile(values, 0.5 * alpha);
                hi(r, c) = empirical_quantile(values, 1.0 - 0.5 * alpha);
            }
        }
        bands.lower.push_back(std::move(lo));
        bands.upper.push_back(std::move(hi));
    }

    const auto K = static_cast<double>(kept.size());
    Eigen::MatrixXd mean_b = Eigen::MatrixXd::Zero(n, n), sq_b = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd mean_s = Eigen::VectorXd::Zero(n), sq_s = Eigen::VectorXd::Zero(n);
    for (const auto* rep : kept) {
        mean_b += rep->B;
        sq_b += rep->B.cwiseAbs2();
        mean_s += rep->sigma;
        sq_s += rep->sigma.cwiseAbs2();
    }
    mean_b /= K;
    mean_s /= K;
    const double denom = std::max(K - 1.0, 1.0);
    bands.sd_b = ((sq_b - K * mean_b.cwiseAbs2()) / denom).cwiseMax(0.0).cwiseSqrt();
    bands.sd_sigma = ((sq_s - K * mean_s.cwiseAbs2()) / denom).cwiseMax(0.0).cwiseSqrt();
    out.bands = std::move(bands);
    return out;
}

}  // namespace svarma
