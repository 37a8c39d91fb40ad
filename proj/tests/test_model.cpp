#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "support.hpp"
#include "svarma/error.hpp"
#include "svarma/model.hpp"

using namespace svarma;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// The six off-diagonals of the published 3x3 estimate, column-major.
VectorXd published_beta() {
    VectorXd b(6);
    b << -0.0168, 0.0280, 0.1224, 0.175, -0.1282, 0.0107;
    return b;
}

MatrixXd published_b() {
    MatrixXd B(3, 3);
    B << 1.0, 0.1224, -0.1282, -0.0168, 1.0, 0.0107, 0.0280, 0.175, 1.0;
    return B;
}

MatrixXd unit_columns(const MatrixXd& B) { return B * B.colwise().norm().cwiseInverse().asDiagonal(); }

MatrixXd permute_columns(const MatrixXd& B, const std::vector<int>& perm) {
    MatrixXd out(B.rows(), B.cols());
    for (std::size_t j = 0; j < perm.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = B.col(perm[j]);
    return out;
}

// Enumerates every column permutation; returns those whose unit-norm form has
// each diagonal entry strictly dominating the later entries of its row.
std::vector<std::vector<int>> dominant_permutations(const MatrixXd& B) {
    std::vector<int> perm(static_cast<std::size_t>(B.cols()));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> hits;
    do {
        const MatrixXd C = unit_columns(permute_columns(B, perm));
        bool ok = true;
        for (Eigen::Index i = 0; i < C.rows() && ok; ++i)
            for (Eigen::Index j = i + 1; j < C.cols() && ok; ++j) ok = std::abs(C(i, i)) > std::abs(C(i, j));
        if (ok) hits.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return hits;
}

// Enumerates every signed permutation of unit-norm columns; returns the
// matrices with positive column-max entries sorted strictly decreasing in
// lexicographic order.
std::vector<MatrixXd> lexicographic_representatives(const MatrixXd& B) {
    const auto n = B.cols();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<MatrixXd> hits;
    do {
        for (int signs = 0; signs < (1 << n); ++signs) {
            MatrixXd C = unit_columns(permute_columns(B, perm));
            for (Eigen::Index j = 0; j < n; ++j)
                if (signs & (1 << j)) C.col(j) *= -1.0;
            bool ok = true;
            for (Eigen::Index j = 0; j < n && ok; ++j) {
                Eigen::Index arg = 0;
                C.col(j).cwiseAbs().maxCoeff(&arg);
                ok = C(arg, j) > 0.0;
            }
            for (Eigen::Index j = 0; j + 1 < n && ok; ++j) {
                const VectorXd a = C.col(j), b = C.col(j + 1);
                ok = std::lexicographical_compare(b.data(), b.data() + b.size(), a.data(), a.data() + a.size());
            }
            if (ok) hits.push_back(C);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return hits;
}

MatrixXd innovation_cov(const MatrixXd& B, const VectorXd& s) {
    return B * s.cwiseAbs2().asDiagonal() * B.transpose();
}

}  // namespace

TEST_CASE("spec dimensions and offsets") {
    SvarmaSpec spec(3, 2, 1, {Family::laplace, Family::student_t, Family::gaussian});
    CHECK(spec.dim_pi2() == 18);
    CHECK(spec.dim_pi3() == 9);
    CHECK(spec.dim_beta() == 6);
    CHECK(spec.dim_lambda() == 1);
    CHECK(spec.dim_theta() == 18 + 9 + 6 + 3 + 1);
    CHECK(spec.lambda_offset(2) == 1);
    CHECK_THROWS_AS(SvarmaSpec(2, 1, 0, {Family::laplace}), Error);
}

TEST_CASE("build_H") {
    CHECK(build_H(1).rows() == 1);
    CHECK(build_H(1).cols() == 0);
    const MatrixXd H2 = build_H(2);
    VectorXd beta(2);
    beta << 0.3, -0.7;
    VectorXd vecB = H2 * beta;
    vecB[0] += 1.0;
    vecB[3] += 1.0;
    VectorXd expected(4);
    expected << 1.0, 0.3, -0.7, 1.0;
    CHECK(vecB == expected);

    const MatrixXd H3 = build_H(3);
    CHECK(H3.cols() == 6);
    CHECK(H3.colwise().sum() == Eigen::RowVectorXd::Ones(6));
    for (int k = 0; k < 9; ++k) CHECK(H3.row(k).sum() == ((k % 4 == 0) ? 0.0 : 1.0));
}

TEST_CASE("b_from_beta and beta_from_b") {
    CHECK(b_from_beta(VectorXd::Zero(6), 3) == MatrixXd::Identity(3, 3));
    CHECK(b_from_beta(published_beta(), 3) == published_b());
    CHECK(beta_from_b(published_b()) == published_beta());
    Rng rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        const VectorXd beta = svarma::testing::random_matrix(rng, 12, 1);
        CHECK(beta_from_b(b_from_beta(beta, 4)) == beta);
        // vec(B) = H beta + vec(I)
        MatrixXd B = b_from_beta(beta, 4);
        const VectorXd vecB = Eigen::Map<const VectorXd>(B.data(), 16);
        VectorXd rhs = build_H(4) * beta;
        for (int i = 0; i < 4; ++i) rhs[5 * i] += 1.0;
        CHECK(vecB == rhs);
    }
    MatrixXd bad = MatrixXd::Identity(2, 2);
    bad(1, 1) = 2.0;
    CHECK_THROWS_AS((void)beta_from_b(bad), Error);
}

TEST_CASE("pack and unpack round trip exactly") {
    Rng rng(17);
    for (int n = 1; n <= 3; ++n) {
        SvarmaSpec spec(n, 2, 1, std::vector<Family>(static_cast<std::size_t>(n), Family::student_t));
        const ThetaVector th = svarma::testing::random_theta(spec, rng);
        const VectorXd packed = th.pack();
        CHECK(packed.size() == spec.dim_theta());
        const ThetaVector back = ThetaVector::unpack(spec, packed);
        CHECK(back.pack() == packed);
        CHECK(back.pi2 == th.pi2);
        CHECK(back.lambda == th.lambda);
    }
}

TEST_CASE("from_parts stores coefficients column-major") {
    SvarmaSpec spec(2, 1, 0, {Family::laplace, Family::laplace});
    MatrixXd a1(2, 2);
    a1 << 0.1, 0.2, 0.3, 0.4;
    const ThetaVector th = ThetaVector::from_parts(spec, {a1}, {}, MatrixXd::Identity(2, 2), VectorXd::Ones(2));
    VectorXd expected(4);
    expected << 0.1, 0.3, 0.2, 0.4;
    CHECK(th.pi2 == expected);
    CHECK(ar_coeffs(spec, th)[0] == a1);
}

TEST_CASE("validate") {
    SvarmaSpec s1(1, 1, 0, {Family::laplace});
    ThetaVector t1 = ThetaVector::from_parts(s1, {MatrixXd::Constant(1, 1, 0.5)}, {}, MatrixXd::Identity(1, 1), VectorXd::Ones(1));
    CHECK(validate(s1, t1).empty());

    auto has = [](const std::vector<Violation>& v, const std::string& code) {
        return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.code == code; });
    };
    ThetaVector unstable = t1;
    unstable.pi2[0] = 1.05;
    CHECK(has(validate(s1, unstable), "ar_unstable"));

    SvarmaSpec s2(1, 1, 1, {Family::laplace});
    ThetaVector common = ThetaVector::from_parts(s2, {MatrixXd::Constant(1, 1, 0.4)}, {MatrixXd::Constant(1, 1, -0.4)},
                                                 MatrixXd::Identity(1, 1), VectorXd::Ones(1));
    CHECK(has(validate(s2, common), "not_coprime"));

    SvarmaSpec g2(2, 0, 0, {Family::gaussian, Family::gaussian});
    ThetaVector tg = ThetaVector::from_parts(g2, {}, {}, MatrixXd::Identity(2, 2), VectorXd::Ones(2));
    CHECK(has(validate(g2, tg), "gaussian_count"));
}

TEST_CASE("validate accepts fixtures and rejects single-violation mutants") {
    const SvarmaSpec spec = svarma::testing::laplace_varma11_spec();
    const ThetaVector th = svarma::testing::laplace_varma11_theta();
    CHECK(validate(spec, th).empty());

    auto codes = [&](const SvarmaSpec& s, const ThetaVector& t) {
        std::vector<std::string> out;
        for (const auto& v : validate(s, t)) out.push_back(v.code);
        return out;
    };

    ThetaVector m = th;
    m.pi2 *= 3.0;
    CHECK(codes(spec, m) == std::vector<std::string>{"ar_unstable"});

    m = th;
    m.pi3 *= 6.0;
    CHECK(codes(spec, m) == std::vector<std::string>{"ma_noninvertible"});

    m = th;
    m.sigma[1] = -0.1;
    CHECK(codes(spec, m) == std::vector<std::string>{"sigma_nonpositive"});

    m = th;
    m.beta << 1.0, 1.0;
    CHECK(codes(spec, m) == std::vector<std::string>{"b_singular"});

    // a_1 and b_1 rank one and sharing a null vector: [a_p, b_q] loses rank.
    MatrixXd a1(2, 2), b1(2, 2);
    a1 << 0.5, 0.0, 0.0, 0.0;
    b1 << 0.2, 0.0, 0.0, 0.0;
    ThetaVector lr = ThetaVector::from_parts(spec, {a1}, {b1}, b_matrix(spec, th), th.sigma);
    CHECK(codes(spec, lr) == std::vector<std::string>{"leading_rank"});

    SvarmaSpec ts(1, 0, 0, {Family::student_t});
    ThetaVector tt = ThetaVector::from_parts(ts, {}, {}, MatrixXd::Identity(1, 1), VectorXd::Ones(1), VectorXd::Constant(1, 1.5));
    CHECK(codes(ts, tt) == std::vector<std::string>{"lambda_domain"});
}

TEST_CASE("scheme A examples") {
    VectorXd s(3);
    s << 0.0685, 0.0315, 0.14;
    const Normalized fixed = normalize_scheme_a(published_b(), s);
    CHECK((fixed.B - published_b()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((fixed.sigma - s).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(fixed.perm == std::vector<int>{0, 1, 2});

    MatrixXd D = MatrixXd::Zero(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 1.0;
    const Normalized a = normalize_scheme_a(D, VectorXd::Ones(2));
    CHECK(a.B == MatrixXd::Identity(2, 2));
    CHECK(a.sigma == Eigen::Vector2d(2.0, 1.0));

    MatrixXd tie(2, 2);
    tie << 1.0, 1.0, -1.0, 1.0;
    CHECK_THROWS_AS((void)normalize_scheme_a(tie, VectorXd::Ones(2)), Error);
}

TEST_CASE("scheme B and C examples") {
    const Normalized b = normalize_scheme_b(MatrixXd::Identity(2, 2), Eigen::Vector2d(0.3, 0.4));
    CHECK(b.B == MatrixXd::Identity(2, 2));
    CHECK(b.sigma == Eigen::Vector2d(0.3, 0.4));
    MatrixXd flip = MatrixXd::Identity(2, 2);
    flip(0, 0) = -1.0;
    const Normalized bf = normalize_scheme_b(flip, Eigen::Vector2d(0.3, 0.4));
    CHECK(bf.B == MatrixXd::Identity(2, 2));
    CHECK(bf.sigma == Eigen::Vector2d(0.3, 0.4));
    CHECK(bf.d[0] == -1.0);

    CHECK(normalize_scheme_c(MatrixXd::Identity(2, 2), VectorXd::Ones(2)).B == MatrixXd::Identity(2, 2));
    MatrixXd swap(2, 2);
    swap << 0.0, 1.0, 1.0, 0.0;
    // The lexicographically largest column comes first: (1, 0) before (0, 1).
    const Normalized c = normalize_scheme_c(swap, Eigen::Vector2d(2.0, 3.0));
    CHECK(c.B == MatrixXd::Identity(2, 2));
    CHECK(c.sigma == Eigen::Vector2d(3.0, 2.0));

    Rng rng(6);
    for (int rep = 0; rep < 50; ++rep) {
        const MatrixXd B = svarma::testing::random_matrix(rng, 4, 4);
        const Normalized nb = normalize_scheme_b(B, VectorXd::Ones(4));
        CHECK((nb.B.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK((nb.B.diagonal().array() > 0.0).all());
    }
}

TEST_CASE("normalization agrees with the signed-permutation enumeration") {
    Rng rng(31);
    int checked = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(rng.below(3));
        const MatrixXd B = svarma::testing::random_matrix(rng, n, n);
        const VectorXd s = svarma::testing::random_sigma(rng, n);

        const auto dom = dominant_permutations(B);
        REQUIRE(dom.size() == 1);
        MatrixXd expect_a = permute_columns(B, dom[0]);
        for (int j = 0; j < n; ++j) expect_a.col(j) /= expect_a(j, j);
        MatrixXd expect_b = unit_columns(permute_columns(B, dom[0]));
        for (int j = 0; j < n; ++j)
            if (expect_b(j, j) < 0.0) expect_b.col(j) *= -1.0;
        const auto lex = lexicographic_representatives(B);
        REQUIRE(lex.size() == 1);

        try {
            CHECK((normalize_scheme_a(B, s).B - expect_a).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((normalize_scheme_b(B, s).B - expect_b).cwiseAbs().maxCoeff() < 1e-12);
            ++checked;
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::not_normalizable);
        }
        CHECK((normalize_scheme_c(B, s).B - lex[0]).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK(checked > 190);
}

TEST_CASE("normalization is invariant to signed permutation and scaling") {
    Rng rng(77);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(rng.below(3));
        const MatrixXd B = svarma::testing::random_matrix(rng, n, n);
        const VectorXd s = svarma::testing::random_sigma(rng, n);
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i + 1))]);
        VectorXd d(n);
        for (int j = 0; j < n; ++j) d[j] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.2 + 3.0 * rng.uniform());
        const MatrixXd BPD = permute_columns(B, perm) * d.asDiagonal();
        VectorXd s2(n);
        for (int j = 0; j < n; ++j) s2[j] = s[perm[j]] / std::abs(d[j]);
        CHECK((innovation_cov(BPD, s2) - innovation_cov(B, s)).cwiseAbs().maxCoeff() < 1e-12);

        for (Scheme scheme : {Scheme::A, Scheme::B, Scheme::C}) {
            try {
                const Normalized x = normalize(scheme, B, s);
                const Normalized y = normalize(scheme, BPD, s2);
                CHECK((x.B - y.B).cwiseAbs().maxCoeff() < 1e-10);
                CHECK((x.sigma - y.sigma).cwiseAbs().maxCoeff() < 1e-10);
                CHECK((innovation_cov(x.B, x.sigma) - innovation_cov(B, s)).cwiseAbs().maxCoeff() < 1e-10);
            } catch (const Error& e) {
                CHECK(e.kind() == ErrorKind::not_normalizable);
                CHECK_THROWS_AS((void)normalize(scheme, BPD, s2), Error);
            }
        }
    }
}

TEST_CASE("normalize_theta relabels families with their shocks") {
    SvarmaSpec spec(2, 0, 0, {Family::laplace, Family::student_t});
    MatrixXd B(2, 2);
    B << 1.0, 5.0, 0.5, 1.0;
    const ThetaVector th = ThetaVector::from_parts(spec, {}, {}, B, Eigen::Vector2d(1.0, 2.0), VectorXd::Constant(1, 6.0));
    const NormalizedModel nm = normalize_theta(spec, th);
    CHECK(nm.perm == std::vector<int>{1, 0});
    CHECK(nm.spec.families == std::vector<Family>{Family::student_t, Family::laplace});
    MatrixXd expected(2, 2);
    expected << 1.0, 2.0, 0.2, 1.0;
    CHECK((b_matrix(nm.spec, nm.theta) - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((nm.theta.sigma - Eigen::Vector2d(10.0, 0.5)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(nm.theta.lambda[0] == 6.0);
    CHECK((innovation_cov(b_matrix(nm.spec, nm.theta), nm.theta.sigma) - innovation_cov(B, th.sigma)).norm() < 1e-12);
}

TEST_CASE("scheme names") {
    CHECK(scheme_from_string("A") == Scheme::A);
    CHECK(scheme_from_string("c") == Scheme::C);
    CHECK(to_string(Scheme::B) == "B");
    CHECK_THROWS_AS((void)scheme_from_string("D"), Error);
}
