#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace svarma {

struct TestStatistic {
    double statistic = 0.0;
    double p_value = 1.0;
    int dof = 0;
};

/// Q = T (T + 2) sum_{k=1..lags} rho_k^2 / (T - k), chi-square(lags) p-value.
/// Throws ErrorKind::invalid_argument unless 1 <= lags < T.
[[nodiscard]] TestStatistic ljung_box(std::span<const double> x, int lags);
/// Ljung-Box statistic on the squared series.
[[nodiscard]] TestStatistic mcleod_li(std::span<const double> x, int lags);
/// JB = T / 6 (S^2 + (K - 3)^2 / 4), chi-square(2) p-value; moments use 1/T.
[[nodiscard]] TestStatistic jarque_bera(std::span<const double> x);

struct ComponentDiagnostics {
    TestStatistic ljung_box;
    TestStatistic mcleod_li;
    TestStatistic jarque_bera;
};

/// One entry per column of `residuals` (rows are periods).
[[nodiscard]] std::vector<ComponentDiagnostics> diagnostics(const Eigen::MatrixXd& residuals, int lags);

}  // namespace svarma
