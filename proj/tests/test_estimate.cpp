#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "svarma/error.hpp"
#include "svarma/estimate.hpp"
#include "svarma/likelihood.hpp"

using namespace svarma;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("initial estimate on white noise reproduces the Cholesky factor") {
    SvarmaSpec spec(3, 0, 0, {Family::laplace, Family::laplace, Family::student_t});
    Rng rng(1);
    MatrixXd y = svarma::testing::random_matrix(rng, 400, 3);
    y.col(1) += 0.5 * y.col(0);
    const ThetaVector th = initial_estimate(y, spec);
    const MatrixXd S = y.transpose() * y / 400.0;
    const MatrixXd L = S.llt().matrixL();
    const VectorXd d = L.diagonal();
    const MatrixXd B0 = L * d.cwiseInverse().asDiagonal();
    CHECK((b_matrix(spec, th) - B0).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((th.sigma - d).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(th.lambda[0] == 8.0);
}

TEST_CASE("initial estimate rejects degenerate data") {
    SvarmaSpec spec(2, 1, 0, {Family::laplace, Family::laplace});
    MatrixXd y = MatrixXd::Ones(100, 2);
    CHECK_THROWS_AS((void)initial_estimate(y, spec), Error);
}

TEST_CASE("initial estimate lands in the parameter space") {
    const SvarmaSpec spec = svarma::testing::laplace_varma11_spec();
    const ThetaVector th = svarma::testing::laplace_varma11_theta();
    Rng rng(4);
    const MatrixXd y = simulate(spec, th, 5000, rng).y;
    const ThetaVector t0 = initial_estimate(y, spec);
    CHECK(validate(spec, t0).empty());
    CHECK((t0.pi2 - th.pi2).norm() < 0.3);
}

TEST_CASE("fit recovers a bivariate VARMA(1,1)") {
    const SvarmaSpec spec = svarma::testing::laplace_varma11_spec();
    const ThetaVector th = svarma::testing::laplace_varma11_theta();
    Rng rng(8);
    const MatrixXd y = simulate(spec, th, 3000, rng).y;
    const EstimationResult r = fit(y, spec);
    CHECK(r.converged);
    CHECK(r.violations.empty());
    CHECK(r.T == 3000);
    CHECK((r.theta.pack() - th.pack()).norm() < 0.25);
    CHECK(r.loglik_value >= loglik(spec, th, y));
    CHECK(r.b_scheme.diagonal() == VectorXd::Ones(2));
    CHECK(r.se.size() == spec.dim_theta());
    CHECK(r.cov_error.empty());
    CHECK((r.se.array() > 0.0).all());
    // Hessian and OPG information estimates agree roughly at this sample size.
    // Standard errors are compared only loosely: the AR and MA blocks are
    // nearly collinear, so inversion amplifies the Hessian's kink noise.
    const MatrixXd A = hessian(spec, r.theta, y);
    const MatrixXd Bo = opg(spec, r.theta, y);
    CHECK((A + Bo).norm() < 0.25 * Bo.norm());
    const auto ratio = (r.se_hessian.array() / r.se.array()).eval();
    CHECK(ratio.maxCoeff() < 2.5);
    CHECK(ratio.minCoeff() > 0.4);
    // Deterministic given the data.
    const EstimationResult again = fit(y, spec);
    CHECK(again.theta.pack() == r.theta.pack());
    CHECK(again.loglik_value == r.loglik_value);
}

TEST_CASE("fit with a smooth density meets the gradient tolerance") {
    SvarmaSpec spec(2, 1, 0, {Family::student_t, Family::student_t});
    MatrixXd a1(2, 2), B(2, 2);
    a1 << 0.4, 0.1, -0.1, 0.3;
    B << 1.0, 0.2, 0.3, 1.0;
    const ThetaVector th = ThetaVector::from_parts(spec, {a1}, {}, B, Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(5.0, 7.0));
    Rng rng(12);
    const MatrixXd y = simulate(spec, th, 2000, rng).y;
    const EstimationResult r = fit(y, spec);
    CHECK(r.converged);
    CHECK(r.termination == "gradient");
    CHECK(r.score_norm < 1e-6);
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(hessian(r.spec, r.theta, y));
    CHECK(eig.eigenvalues().maxCoeff() <= 1e-6 * eig.eigenvalues().cwiseAbs().maxCoeff());
}

TEST_CASE("fit reports the requested scheme") {
    SvarmaSpec spec(2, 0, 0, {Family::laplace, Family::laplace});
    MatrixXd B(2, 2);
    B << 1.0, 0.4, -0.3, 1.0;
    const ThetaVector th = ThetaVector::from_parts(spec, {}, {}, B, Eigen::Vector2d(1.0, 2.0));
    Rng rng(2);
    const MatrixXd y = simulate(spec, th, 1500, rng).y;
    EstimateOptions o;
    o.scheme = Scheme::C;
    const EstimationResult r = fit(y, spec, o);
    const Normalized c = normalize_scheme_c(b_matrix(r.spec, r.theta), r.theta.sigma);
    CHECK((r.b_scheme - c.B).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.b_scheme.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("standard error of sigma scales with the data") {
    SvarmaSpec spec(1, 1, 0, {Family::laplace});
    const ThetaVector th = ThetaVector::from_parts(spec, {MatrixXd::Constant(1, 1, 0.5)}, {}, MatrixXd::Identity(1, 1),
                                                   VectorXd::Ones(1));
    Rng rng(6);
    const MatrixXd y = simulate(spec, th, 2000, rng).y;
    const EstimationResult r1 = fit(y, spec);
    const EstimationResult r3 = fit(3.0 * y, spec);
    const int k = spec.offset_sigma();
    // The optimizer path is not scale-free, so equivariance holds up to an
    // optimization error that must be negligible against sampling error.
    CHECK(std::abs(r3.theta.sigma[0] - 3.0 * r1.theta.sigma[0]) < 0.05 * r3.se[k]);
    CHECK(r3.se[k] == doctest::Approx(3.0 * r1.se[k]).epsilon(0.02));
}

TEST_CASE("order selection") {
    SvarmaSpec tmpl(1, 0, 0, {Family::laplace});
    SvarmaSpec ar1(1, 1, 0, {Family::laplace});
    const ThetaVector th = ThetaVector::from_parts(ar1, {MatrixXd::Constant(1, 1, 0.7)}, {}, MatrixXd::Identity(1, 1),
                                                   VectorXd::Ones(1));
    Rng rng(14);
    const MatrixXd y = simulate(ar1, th, 1000, rng).y;
    const OrderSelection sel = select_order(y, tmpl, 1, 0);
    CHECK(sel.table.size() == 2);
    CHECK(sel.p == 1);
    CHECK(sel.q == 0);

    const OrderSelection grid = select_order(y, tmpl, 2, 1, {}, 2);
    CHECK(grid.table.size() == 6);
    for (const auto& row : grid.table) {
        if (row.converged) CHECK(row.aic == doctest::Approx(-2.0 * 1000.0 * row.loglik + 2.0 * row.dim));
    }
}
