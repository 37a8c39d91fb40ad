#include "svarma/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "svarma/error.hpp"

namespace svarma {

SvarmaSpec::SvarmaSpec(int n_, int p_, int q_, std::vector<Family> families_)
    : n(n_), p(p_), q(q_), families(std::move(families_)) {
    if (n < 1 || p < 0 || q < 0) {
        throw Error(ErrorKind::invalid_argument, "SvarmaSpec: need n >= 1, p >= 0, q >= 0");
    }
    if (static_cast<int>(families.size()) != n) {
        throw Error(ErrorKind::invalid_argument, "SvarmaSpec: need one density family per shock");
    }
}

int SvarmaSpec::dim_lambda() const {
    int d = 0;
    for (Family f : families) d += svarma::lambda_dim(f);
    return d;
}

int SvarmaSpec::lambda_offset(int i) const {
    int d = 0;
    for (int k = 0; k < i; ++k) d += svarma::lambda_dim(families[k]);
    return d;
}

Eigen::VectorXd ThetaVector::pack() const {
    Eigen::VectorXd out(pi2.size() + pi3.size() + beta.size() + sigma.size() + lambda.size());
    out << pi2, pi3, beta, sigma, lambda;
    return out;
}

ThetaVector ThetaVector::unpack(const SvarmaSpec& spec, const Eigen::VectorXd& packed) {
    if (packed.size() != spec.dim_theta()) {
        throw Error(ErrorKind::invalid_argument, "ThetaVector::unpack: length does not match the spec");
    }
    ThetaVector t;
    t.pi2 = packed.segment(0, spec.dim_pi2());
    t.pi3 = packed.segment(spec.offset_pi3(), spec.dim_pi3());
    t.beta = packed.segment(spec.offset_beta(), spec.dim_beta());
    t.sigma = packed.segment(spec.offset_sigma(), spec.dim_sigma());
    t.lambda = packed.segment(spec.offset_lambda(), spec.dim_lambda());
    return t;
}

namespace {

Eigen::VectorXd vec_blocks(const std::vector<Eigen::MatrixXd>& blocks, int n, int count,
                           const char* what) {
    if (static_cast<int>(blocks.size()) != count) {
        throw Error(ErrorKind::invalid_argument, std::string("wrong number of ") + what + " coefficients");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(n) * n * count);
    for (int i = 0; i < count; ++i) {
        if (blocks[i].rows() != n || blocks[i].cols() != n) {
            throw Error(ErrorKind::invalid_argument, std::string(what) + " coefficient has wrong shape");
        }
        out.segment(static_cast<Eigen::Index>(i) * n * n, n * n) =
            Eigen::Map<const Eigen::VectorXd>(blocks[i].data(), n * n);
    }
    return out;
}

std::vector<Eigen::MatrixXd> unvec_blocks(const Eigen::VectorXd& v, int n, int count) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        out.emplace_back(Eigen::Map<const Eigen::MatrixXd>(v.data() + static_cast<Eigen::Index>(i) * n * n, n, n));
    }
    return out;
}

}  // namespace

ThetaVector ThetaVector::from_parts(const SvarmaSpec& spec, const std::vector<Eigen::MatrixXd>& ar,
                                    const std::vector<Eigen::MatrixXd>& ma, const Eigen::MatrixXd& B,
                                    const Eigen::VectorXd& sigma, const Eigen::VectorXd& lambda) {
    ThetaVector t;
    t.pi2 = vec_blocks(ar, spec.n, spec.p, "AR");
    t.pi3 = vec_blocks(ma, spec.n, spec.q, "MA");
    t.beta = beta_from_b(B);
    t.sigma = sigma;
    t.lambda = lambda;
    check_shape(spec, t);
    return t;
}

ThetaVector ThetaVector::from_parts(const SvarmaSpec& spec, const std::vector<Eigen::MatrixXd>& ar,
                                    const std::vector<Eigen::MatrixXd>& ma, const Eigen::MatrixXd& B,
                                    const Eigen::VectorXd& sigma) {
    Eigen::VectorXd lambda(spec.dim_lambda());
    for (int i = 0; i < spec.n; ++i) {
        const auto def = ComponentDensity::default_lambda(spec.families[i]);
        lambda.segment(spec.lambda_offset(i), def.size()) = def;
    }
    return from_parts(spec, ar, ma, B, sigma, lambda);
}

void check_shape(const SvarmaSpec& spec, const ThetaVector& theta) {
    if (theta.pi2.size() != spec.dim_pi2() || theta.pi3.size() != spec.dim_pi3() ||
        theta.beta.size() != spec.dim_beta() || theta.sigma.size() != spec.dim_sigma() ||
        theta.lambda.size() != spec.dim_lambda()) {
        throw Error(ErrorKind::invalid_argument, "theta block sizes do not match (n, p, q, families)");
    }
}

std::vector<Eigen::MatrixXd> ar_coeffs(const SvarmaSpec& spec, const ThetaVector& theta) {
    check_shape(spec, theta);
    return unvec_blocks(theta.pi2, spec.n, spec.p);
}

std::vector<Eigen::MatrixXd> ma_coeffs(const SvarmaSpec& spec, const ThetaVector& theta) {
    check_shape(spec, theta);
    return unvec_blocks(theta.pi3, spec.n, spec.q);
}

MatrixPolynomial ar_poly(const SvarmaSpec& spec, const ThetaVector& theta) {
    return MatrixPolynomial(spec.n, Sign::ar, ar_coeffs(spec, theta));
}

MatrixPolynomial ma_poly(const SvarmaSpec& spec, const ThetaVector& theta) {
    return MatrixPolynomial(spec.n, Sign::ma, ma_coeffs(spec, theta));
}

Eigen::MatrixXd b_matrix(const SvarmaSpec& spec, const ThetaVector& theta) {
    check_shape(spec, theta);
    return b_from_beta(theta.beta, spec.n);
}

std::vector<ComponentDensity> densities(const SvarmaSpec& spec, const ThetaVector& theta) {
    check_shape(spec, theta);
    std::vector<ComponentDensity> out;
    out.reserve(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        const int d = lambda_dim(spec.families[i]);
        out.emplace_back(spec.families[i], theta.lambda.segment(spec.lambda_offset(i), d));
    }
    return out;
}

Eigen::MatrixXd build_H(int n) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * n, n * (n - 1));
    int col = 0;
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) {
            if (r != c) H(c * n + r, col++) = 1.0;
        }
    }
    return H;
}

Eigen::MatrixXd b_from_beta(const Eigen::VectorXd& beta, int n) {
    if (beta.size() != n * (n - 1)) {
        throw Error(ErrorKind::invalid_argument, "b_from_beta: beta must have n(n-1) entries");
    }
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
    int k = 0;
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) {
            if (r != c) B(r, c) = beta[k++];
        }
    }
    return B;
}

Eigen::VectorXd beta_from_b(const Eigen::MatrixXd& B) {
    const auto n = B.rows();
    if (B.cols() != n) throw Error(ErrorKind::invalid_argument, "beta_from_b: B must be square");
    Eigen::VectorXd beta(n * (n - 1));
    int k = 0;
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == c) {
                if (B(r, c) != 1.0) {
                    throw Error(ErrorKind::invalid_argument, "beta_from_b: B must have a unit diagonal");
                }
            } else {
                beta[k++] = B(r, c);
            }
        }
    }
    return beta;
}

std::vector<Violation> validate(const SvarmaSpec& spec, const ThetaVector& theta, double tol) {
    std::vector<Violation> out;
    try {
        check_shape(spec, theta);
    } catch (const Error& e) {
        out.push_back({"shape", e.what()});
        return out;
    }
    const int gaussians = static_cast<int>(
        std::count(spec.families.begin(), spec.families.end(), Family::gaussian));
    if (gaussians > 1) {
        out.push_back({"gaussian_count", "at most one shock may have a Gaussian density"});
    }
    if (!theta.pack().allFinite()) {
        out.push_back({"nonfinite", "theta contains non-finite values"});
        return out;
    }
    const auto a = ar_poly(spec, theta);
    const auto b = ma_poly(spec, theta);
    if (!is_stable(a)) out.push_back({"ar_unstable", "det a(z) has a root in the closed unit disk"});
    if (!is_invertible(b)) {
        out.push_back({"ma_noninvertible", "det b(z) has a root in the closed unit disk"});
    }
    if (spec.p > 0 || spec.q > 0) {
        const int n = spec.n;
        Eigen::MatrixXd lead = Eigen::MatrixXd::Zero(n, 2 * n);
        if (spec.p > 0) lead.leftCols(n) = a.coeffs().back();
        if (spec.q > 0) lead.rightCols(n) = b.coeffs().back();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(lead);
        if (!(svd.singularValues()(n - 1) > tol)) {
            out.push_back({"leading_rank", "[a_p, b_q] does not have full row rank"});
        }
        if (!left_coprime_check(a, b, std::sqrt(tol))) {
            out.push_back({"not_coprime", "a(z) and b(z) share a common root"});
        }
    }
    if (!(theta.sigma.array() > 0.0).all()) {
        out.push_back({"sigma_nonpositive", "all sigma_i must be positive"});
    }
    for (int i = 0; i < spec.n; ++i) {
        const int d = lambda_dim(spec.families[i]);
        if (!ComponentDensity::lambda_admissible(spec.families[i],
                                                 theta.lambda.segment(spec.lambda_offset(i), d))) {
            out.push_back({"lambda_domain", "lambda of shock " + std::to_string(i + 1) +
                                                " outside the admissible region"});
        }
    }
    const Eigen::MatrixXd B = b_from_beta(theta.beta, spec.n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    const auto& sv = svd.singularValues();
    if (!(sv(spec.n - 1) > tol * sv(0))) out.push_back({"b_singular", "B(beta) is singular"});
    return out;
}

bool in_parameter_space(const SvarmaSpec& spec, const ThetaVector& theta) {
    if (!theta.pack().allFinite()) return false;
    if (!(theta.sigma.array() > 0.0).all()) return false;
    for (int i = 0; i < spec.n; ++i) {
        const int d = lambda_dim(spec.families[i]);
        if (!ComponentDensity::lambda_admissible(spec.families[i],
                                                 theta.lambda.segment(spec.lambda_offset(i), d))) {
            return false;
        }
    }
    const Eigen::MatrixXd B = b_from_beta(theta.beta, spec.n);
    if (!(std::abs(B.determinant()) > 1e-12)) return false;
    return is_stable(ar_poly(spec, theta)) && is_invertible(ma_poly(spec, theta));
}

Scheme scheme_from_string(std::string_view name) {
    if (name == "A" || name == "a") return Scheme::A;
    if (name == "B" || name == "b") return Scheme::B;
    if (name == "C" || name == "c") return Scheme::C;
    throw Error(ErrorKind::parse, "unknown identification scheme '" + std::string(name) + "'");
}

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::A:
            return "A";
        case Scheme::B:
            return "B";
        case Scheme::C:
            return "C";
    }
    return "?";
}

namespace {

void check_normalize_input(const Eigen::MatrixXd& B, const Eigen::VectorXd& sigma) {
    if (B.rows() != B.cols() || sigma.size() != B.rows()) {
        throw Error(ErrorKind::invalid_argument, "normalize: B must be square and match sigma");
    }
    if (!(sigma.array() > 0.0).all()) {
        throw Error(ErrorKind::invalid_argument, "normalize: sigma must be positive");
    }
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
        if (!(B.col(j).norm() > 0.0)) {
            throw Error(ErrorKind::singular_matrix, "normalize: B has a zero column");
        }
    }
}

// Row-by-row greedy choice shared by schemes A and B: after unit-norm column
// scaling, column j of the result is the remaining column with the largest
// absolute entry in row j. This is the only ordering in which every diagonal
// entry dominates the entries to its right.
std::vector<int> dominance_permutation(const Eigen::MatrixXd& unit, double tol) {
    const auto n = static_cast<int>(unit.cols());
    std::vector<int> remaining(n);
    std::iota(remaining.begin(), remaining.end(), 0);
    std::vector<int> perm;
    perm.reserve(n);
    for (int row = 0; row < n; ++row) {
        auto best = remaining.begin();
        double best_val = -1.0;
        double second = -1.0;
        for (auto it = remaining.begin(); it != remaining.end(); ++it) {
            const double v = std::abs(unit(row, *it));
            if (v > best_val) {
                second = best_val;
                best_val = v;
                best = it;
            } else if (v > second) {
                second = v;
            }
        }
        if (!(best_val > tol) || (second >= 0.0 && best_val - second <= tol)) {
            throw Error(ErrorKind::not_normalizable,
                        "normalize: no strictly dominant entry in row " + std::to_string(row + 1));
        }
        perm.push_back(*best);
        remaining.erase(best);
    }
    return perm;
}

Normalized assemble(const Eigen::MatrixXd& B, const Eigen::VectorXd& sigma, std::vector<int> perm,
                    Eigen::VectorXd d) {
    const auto n = B.cols();
    Normalized out;
    out.B.resize(n, n);
    out.sigma.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.B.col(j) = B.col(perm[j]) * d[j];
        out.sigma[j] = sigma[perm[j]] / std::abs(d[j]);
    }
    out.perm = std::move(perm);
    out.d = std::move(d);
    return out;
}

// c precedes d iff at the first coordinate where they differ (beyond tol), c is smaller.
int lex_compare(const Eigen::VectorXd& c, const Eigen::VectorXd& d, double tol) {
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        if (c[k] < d[k] - tol) return -1;
        if (c[k] > d[k] + tol) return 1;
    }
    return 0;
}

}  // namespace

Normalized normalize_scheme_a(const Eigen::MatrixXd& B, const Eigen::VectorXd& sigma, double tol) {
    check_normalize_input(B, sigma);
    const Eigen::MatrixXd unit = B * B.colwise().norm().cwiseInverse().asDiagonal();
    auto perm = dominance_permutation(unit, tol);
    Eigen::VectorXd d(B.cols());
    for (Eigen::Index j = 0; j < B.cols(); ++j) d[j] = 1.0 / B(j, perm[j]);
    Normalized out = assemble(B, sigma, std::move(perm), std::move(d));
    out.B.diagonal().setOnes();
    return out;
}

Normalized normalize_scheme_b(const Eigen::MatrixXd& B, const Eigen::VectorXd& sigma, double tol) {
    check_normalize_input(B, sigma);
    const Eigen::VectorXd norms = B.colwise().norm().transpose();
    const Eigen::MatrixXd unit = B * norms.cwiseInverse().asDiagonal();
    auto perm = dominance_permutation(unit, tol);
    Eigen::VectorXd d(B.cols());
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
        d[j] = (B(j, perm[j]) < 0.0 ? -1.0 : 1.0) / norms[perm[j]];
    }
    return assemble(B, sigma, std::move(perm), std::move(d));
}

Normalized normalize_scheme_c(const Eigen::MatrixXd& B, const Eigen::VectorXd& sigma, double tol) {
    check_normalize_input(B, sigma);
    const auto n = static_cast<int>(B.cols());
    const Eigen::VectorXd norms = B.colwise().norm().transpose();
    Eigen::VectorXd signs(n);
    std::vector<Eigen::VectorXd> columns;
    columns.reserve(n);
    for (int j = 0; j < n; ++j) {
        Eigen::Index arg = 0;
        const double top = B.col(j).cwiseAbs().maxCoeff(&arg);
        for (int k = 0; k < n; ++k) {
            if (k != arg && std::abs(B(k, j)) >= top - tol * top && B(k, j) * B(arg, j) < 0.0) {
                throw Error(ErrorKind::not_normalizable,
                            "normalize: largest entries of a column tie with opposite signs");
            }
        }
        signs[j] = B(arg, j) < 0.0 ? -1.0 : 1.0;
        columns.push_back(B.col(j) * (signs[j] / norms[j]));
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](int x, int y) { return lex_compare(columns[x], columns[y], tol) > 0; });
    for (int j = 0; j + 1 < n; ++j) {
        if (lex_compare(columns[perm[j]], columns[perm[j + 1]], tol) == 0) {
            throw Error(ErrorKind::not_normalizable, "normalize: two columns tie in the lexicographic order");
        }
    }
    Eigen::VectorXd d(n);
    for (int j = 0; j < n; ++j) d[j] = signs[perm[j]] / norms[perm[j]];
    return assemble(B, sigma, std::move(perm), std::move(d));
}

Normalized normalize(Scheme scheme, const Eigen::MatrixXd& B, const Eigen::VectorXd& sigma, double tol) {
    switch (scheme) {
        case Scheme::A:
            return normalize_scheme_a(B, sigma, tol);
        case Scheme::B:
            return normalize_scheme_b(B, sigma, tol);
        case Scheme::C:
            return normalize_scheme_c(B, sigma, tol);
    }
    throw Error(ErrorKind::invalid_argument, "normalize: unknown scheme");
}

SvarmaSpec permute_families(const SvarmaSpec& spec, const std::vector<int>& perm) {
    SvarmaSpec out = spec;
    for (int j = 0; j < spec.n; ++j) out.families[j] = spec.families[perm[j]];
    return out;
}

NormalizedModel normalize_theta(const SvarmaSpec& spec, const ThetaVector& theta) {
    const Normalized norm = normalize_scheme_a(b_matrix(spec, theta), theta.sigma);
    NormalizedModel out;
    out.spec = permute_families(spec, norm.perm);
    out.theta = theta;
    out.theta.beta = beta_from_b(norm.B);
    out.theta.sigma = norm.sigma;
    for (int j = 0; j < spec.n; ++j) {
        const int d = lambda_dim(out.spec.families[j]);
        out.theta.lambda.segment(out.spec.lambda_offset(j), d) =
            theta.lambda.segment(spec.lambda_offset(norm.perm[j]), d);
    }
    out.perm = norm.perm;
    return out;
}

}  // namespace svarma
