#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "svarma/diagnostics.hpp"
#include "svarma/error.hpp"

using namespace svarma;

TEST_CASE("Ljung-Box on a constructed uncorrelated series") {
    const std::vector<double> x{1.0, 0.0, 0.0, 0.0, 0.0, -1.0};
    const TestStatistic lb = ljung_box(x, 4);
    CHECK(lb.statistic == doctest::Approx(0.0).scale(1.0));
    CHECK(lb.p_value == doctest::Approx(1.0));
    CHECK(lb.dof == 4);
    CHECK_THROWS_AS((void)ljung_box(x, 6), Error);
    CHECK_THROWS_AS((void)ljung_box(x, 0), Error);
}

TEST_CASE("Ljung-Box against a hand computation") {
    const std::vector<double> x{1.0, 2.0, 0.5, -1.0, 0.0, 1.5, -0.5};
    const double T = 7.0;
    double mean = 0.0;
    for (double v : x) mean += v / T;
    double c0 = 0.0;
    for (double v : x) c0 += (v - mean) * (v - mean);
    double q = 0.0;
    for (int k = 1; k <= 2; ++k) {
        double ck = 0.0;
        for (int t = k; t < 7; ++t) ck += (x[t] - mean) * (x[t - k] - mean);
        q += (ck / c0) * (ck / c0) / (T - k);
    }
    q *= T * (T + 2.0);
    CHECK(ljung_box(x, 2).statistic == doctest::Approx(q).epsilon(1e-13));

    std::vector<double> sq;
    for (double v : x) sq.push_back(v * v);
    CHECK(mcleod_li(x, 2).statistic == doctest::Approx(ljung_box(sq, 2).statistic).epsilon(1e-14));
}

TEST_CASE("Jarque-Bera") {
    const std::vector<double> x{0.0, 0.0, 0.0, 0.0, 1.0, -1.0};
    const TestStatistic jb = jarque_bera(x);
    CHECK(std::abs(jb.statistic) < 1e-12);
    CHECK(jb.p_value == doctest::Approx(1.0));
    CHECK(jb.dof == 2);

    // Skewed two-point sample: S^2 = (1-2p)^2/(p(1-p)), K = ... for p = 1/4.
    const std::vector<double> y{1.0, 0.0, 0.0, 0.0};
    const double p = 0.25;
    const double S2 = (1 - 2 * p) * (1 - 2 * p) / (p * (1 - p));
    const double K = (1 - 3 * p + 3 * p * p) / (p * (1 - p));
    CHECK(jarque_bera(y).statistic == doctest::Approx(4.0 / 6.0 * (S2 + (K - 3) * (K - 3) / 4.0)).epsilon(1e-13));
}

TEST_CASE("per-column diagnostics") {
    Rng rng(3);
    Eigen::MatrixXd e(200, 3);
    for (Eigen::Index t = 0; t < 200; ++t)
        for (int i = 0; i < 3; ++i) e(t, i) = rng.normal();
    const auto d = diagnostics(e, 10);
    REQUIRE(d.size() == 3);
    const Eigen::VectorXd c1 = e.col(1);
    CHECK(d[1].ljung_box.statistic == ljung_box(std::span<const double>(c1.data(), 200), 10).statistic);
    CHECK(d[2].jarque_bera.dof == 2);
    CHECK(d[0].mcleod_li.dof == 10);
}

TEST_CASE("null p-values are roughly uniform") {
    Rng rng(10);
    std::vector<double> lb, ml, jb;
    std::vector<double> x(500);
    for (int rep = 0; rep < 2000; ++rep) {
        for (auto& v : x) v = rng.normal();
        lb.push_back(ljung_box(x, 10).p_value);
        ml.push_back(mcleod_li(x, 10).p_value);
        jb.push_back(jarque_bera(x).p_value);
    }
    // Coarse check; the calibration criterion with 10^4 replications lives in the acceptance suite.
    CHECK(svarma::testing::ks_uniform(lb) < 0.06);
    CHECK(svarma::testing::ks_uniform(ml) < 0.06);
    CHECK(svarma::testing::ks_uniform(jb) < 0.08);
}
