#include "svarma/diagnostics.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "svarma/error.hpp"

namespace svarma {

namespace {

double chi2_upper_tail(double statistic, int dof) {
    const boost::math::chi_squared_distribution<double> chi(dof);
    return boost::math::cdf(boost::math::complement(chi, std::max(statistic, 0.0)));
}

}  // namespace

TestStatistic ljung_box(std::span<const double> x, int lags) {
    const auto T = static_cast<int>(x.size());
    if (lags < 1 || lags >= T) throw Error(ErrorKind::invalid_argument, "ljung_box: need 1 <= lags < T");
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / T;
    std::vector<double> c(x.size());
    for (int t = 0; t < T; ++t) c[t] = x[t] - mean;
    double c0 = 0.0;
    for (double v : c) c0 += v * v;
    TestStatistic out;
    out.dof = lags;
    if (!(c0 > 0.0)) return out;
    double q = 0.0;
    for (int k = 1; k <= lags; ++k) {
        double ck = 0.0;
        for (int t = k; t < T; ++t) ck += c[t] * c[t - k];
        const double rho = ck / c0;
        q += rho * rho / (T - k);
    }
    out.statistic = static_cast<double>(T) * (T + 2.0) * q;
    out.p_value = chi2_upper_tail(out.statistic, lags);
    return out;
}

TestStatistic mcleod_li(std::span<const double> x, int lags) {
    std::vector<double> sq(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) sq[t] = x[t] * x[t];
    return ljung_box(sq, lags);
}

TestStatistic jarque_bera(std::span<const double> x) {
    const auto T = static_cast<double>(x.size());
    if (x.size() < 2) throw Error(ErrorKind::invalid_argument, "jarque_bera: need at least two observations");
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / T;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= T;
    m3 /= T;
    m4 /= T;
    TestStatistic out;
    out.dof = 2;
    if (!(m2 > 0.0)) return out;
    const double S = m3 / std::pow(m2, 1.5);
    const double K = m4 / (m2 * m2);
    out.statistic = T / 6.0 * (S * S + (K - 3.0) * (K - 3.0) / 4.0);
    out.p_value = chi2_upper_tail(out.statistic, 2);
    return out;
}

std::vector<ComponentDiagnostics> diagnostics(const Eigen::MatrixXd& residuals, int lags) {
    std::vector<ComponentDiagnostics> out;
    out.reserve(residuals.cols());
    for (Eigen::Index c = 0; c < residuals.cols(); ++c) {
        const Eigen::VectorXd col = residuals.col(c);
        const std::span<const double> s(col.data(), static_cast<std::size_t>(col.size()));
        out.push_back({ljung_box(s, lags), mcleod_li(s, lags), jarque_bera(s)});
    }
    return out;
}

}  // namespace svarma
