#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace ltcn;
using namespace ltcn::test;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, CounterRng& rng)
{
    return Matrix(rows, cols, random_vector(rows * cols, rng));
}

// Classical two-sided cyclic Jacobi eigenvalue iteration for a symmetric matrix.
std::vector<double> symmetric_eigenvalues(Matrix a)
{
    const std::size_t n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += a(p, q) * a(p, q);
        if (off < 1e-30)
            break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0)
                    continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i)
        ev[i] = a(i, i);
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

double orthonormality_error(const Matrix& q)
{
    const Matrix g = q.transposed() * q;
    return (g - Matrix::identity(g.rows())).frobenius();
}

double rel_frobenius_error(const DenseTensor& a, const DenseTensor& b)
{
    return frobenius(a - b) / std::max(frobenius(a), 1e-300);
}

} // namespace

TEST(Svd, Identity)
{
    const SvdResult r = svd(Matrix::identity(2));
    EXPECT_EQ(r.s, (std::vector<double>{1.0, 1.0}));
}

TEST(Svd, Diagonal)
{
    const SvdResult r = svd(Matrix(2, 2, {3, 0, 0, 1}));
    EXPECT_EQ(r.s, (std::vector<double>{3.0, 1.0}));
    EXPECT_EQ(r.u, Matrix::identity(2));
    EXPECT_EQ(r.v, Matrix::identity(2));
}

TEST(Svd, RandomMatchesGramEigenvalues)
{
    CounterRng rng(30);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix a = random_matrix(4, 7, rng);
        const SvdResult r = svd(a);
        ASSERT_EQ(r.s.size(), 4u);
        EXPECT_LE((a - r.reconstruct()).frobenius() / a.frobenius(), 1e-10);
        EXPECT_LE(orthonormality_error(r.u), 1e-10);
        EXPECT_LE(orthonormality_error(r.v), 1e-10);
        const auto ev = symmetric_eigenvalues(a.transposed() * a);
        for (std::size_t i = 0; i < 4; ++i)
            EXPECT_NEAR(r.s[i], std::sqrt(ev[i]), 1e-8);
        for (std::size_t i = 4; i < ev.size(); ++i)
            EXPECT_NEAR(ev[i], 0.0, 1e-12);
        EXPECT_TRUE(std::is_sorted(r.s.rbegin(), r.s.rend()));
    }
}

TEST(Svd, TallAndRankDeficient)
{
    CounterRng rng(31);
    const auto u = random_vector(6, rng), v = random_vector(3, rng);
    Matrix a(6, 3);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            a(i, j) = u[i] * v[j];
    const SvdResult r = svd(a);
    EXPECT_EQ(r.u.rows(), 6u);
    EXPECT_EQ(r.u.cols(), 3u);
    EXPECT_LE((a - r.reconstruct()).frobenius() / a.frobenius(), 1e-12);
    EXPECT_LE(orthonormality_error(r.u), 1e-10);
    EXPECT_LE(orthonormality_error(r.v), 1e-10);
    EXPECT_LE(r.s[1], 1e-14);
}

TEST(Svd, SignConvention)
{
    CounterRng rng(32);
    const SvdResult r = svd(random_matrix(3, 5, rng));
    for (std::size_t j = 0; j < r.u.cols(); ++j) {
        const auto col = r.u.column(j);
        const auto it = std::max_element(col.begin(), col.end(),
                                         [](double a, double b) { return std::abs(a) < std::abs(b); });
        EXPECT_GE(*it, 0.0);
    }
}

TEST(Svd, RejectsNonFinite)
{
    EXPECT_THROW(svd(Matrix(1, 2, {1.0, std::numeric_limits<double>::infinity()})), InvalidArgument);
}

TEST(Hosvd, RankOneTensor)
{
    CounterRng rng(33);
    const auto u = random_vector(3, rng), v = random_vector(3, rng), w = random_vector(3, rng);
    const DenseTensor a = outer_product({w, v, u});
    const Spectrum s = spectrum(hosvd(a));
    EXPECT_LE(rel_diff(s.entries[0].magnitude, frobenius(a)), 1e-12);
    for (std::size_t i = 1; i < s.entries.size(); ++i)
        EXPECT_LE(s.entries[i].magnitude, 1e-12);
}

TEST(Hosvd, OrderTwoIsMatrixSvd)
{
    CounterRng rng(34);
    const DenseTensor a = random_tensor(4, 2, rng);
    const HosvdResult h = hosvd(a);
    const SvdResult r = svd(unfold(a, 1));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            const std::vector<std::size_t> idx{i, j};
            if (i == j)
                EXPECT_NEAR(std::abs(h.core.at(idx)), r.s[i], 1e-12);
            else
                EXPECT_NEAR(h.core.at(idx), 0.0, 1e-12);
        }
    const Spectrum s = spectrum(h);
    for (std::size_t i = 0; i < 4; ++i)
        EXPECT_NEAR(s.entries[i].magnitude, r.s[i], 1e-12);
}

TEST(Hosvd, ExponentialFilterIsRankOne)
{
    for (std::size_t l : {2u, 3u})
        for (std::size_t K = 1; K <= 5; ++K) {
            std::vector<double> rho(ipow(l, K));
            for (std::size_t s = 0; s < rho.size(); ++s)
                rho[s] = std::pow(0.9, static_cast<double>(s));
            const Spectrum s = spectrum(hosvd(tensorize(rho, l, K)));
            EXPECT_LE(s.squared_sum(2), 1e-24 * s.squared_sum(1));
        }
}

TEST(Hosvd, ContractOnRandomTensors)
{
    CounterRng rng(35);
    for (std::size_t l : {2u, 3u})
        for (std::size_t K = 2; K <= 4; ++K) {
            const DenseTensor a = random_tensor(l, K, rng);
            const HosvdResult h = hosvd(a);
            EXPECT_LE(rel_frobenius_error(a, reconstruct(h)), 1e-10);
            EXPECT_LE(rel_diff(frobenius(h.core), frobenius(a)), 1e-12);
            for (const auto& u : h.factors)
                EXPECT_LE(orthonormality_error(u), 1e-10);

            const double scale = frobenius(a) * frobenius(a);
            for (std::size_t mode = 1; mode <= K; ++mode) {
                const Matrix m = unfold(h.core, mode);
                std::vector<double> norms(l);
                for (std::size_t p = 0; p < l; ++p) {
                    for (std::size_t q = 0; q < l; ++q) {
                        double ip = 0.0;
                        for (std::size_t c = 0; c < m.cols(); ++c)
                            ip += m(p, c) * m(q, c);
                        if (p == q)
                            norms[p] = std::sqrt(ip);
                        else
                            EXPECT_LE(std::abs(ip), 1e-10 * scale);
                    }
                }
                for (std::size_t p = 1; p < l; ++p)
                    EXPECT_LE(norms[p], norms[p - 1] * (1 + 1e-12));
            }
        }
}

TEST(Hosvd, RankOneBasisIsOrthonormal)
{
    CounterRng rng(36);
    const HosvdResult h = hosvd(random_tensor(2, 3, rng));
    std::vector<DenseTensor> basis;
    for (std::size_t flat = 0; flat < 8; ++flat) {
        const auto idx = h.core.digits(flat);
        RankOneTerm t{1.0, {}};
        for (std::size_t k = 0; k < 3; ++k)
            t.factors.push_back(h.factors[k].column(idx[k]));
        basis.push_back(term_tensor(t));
    }
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
            EXPECT_NEAR(inner_product(basis[i], basis[j]), i == j ? 1.0 : 0.0, 1e-12);
}

TEST(Spectrum, SortedParsevalAndTieBreak)
{
    CounterRng rng(37);
    const DenseTensor a = random_tensor(3, 3, rng);
    const Spectrum s = spectrum(hosvd(a));
    for (std::size_t i = 1; i < s.entries.size(); ++i)
        EXPECT_GE(s.entries[i - 1].magnitude, s.entries[i].magnitude);
    EXPECT_LE(rel_diff(s.squared_sum(), frobenius(a) * frobenius(a)), 1e-12);

    // exact ties among zeros fall back to the multi-index
    const Spectrum z = spectrum(hosvd(DenseTensor(2, 2)));
    ASSERT_EQ(z.entries.size(), 4u);
    EXPECT_EQ(z.entries[0].index, (std::vector<std::size_t>{0, 0}));
    EXPECT_EQ(z.entries[1].index, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(z.entries[2].index, (std::vector<std::size_t>{1, 0}));
    EXPECT_EQ(z.entries[3].index, (std::vector<std::size_t>{1, 1}));
}

TEST(Spectrum, RankOneSpectrum)
{
    const DenseTensor a = outer_product({{1, 2}, {3, 4}, {0, 5}});
    const Spectrum s = spectrum(hosvd(a));
    EXPECT_LE(rel_diff(s.entries[0].magnitude, frobenius(a)), 1e-14);
    EXPECT_LE(s.squared_sum(2), 1e-26 * frobenius(a) * frobenius(a));
}

TEST(Spectrum, TailTableIsNonIncreasing)
{
    CounterRng rng(38);
    const auto tails = spectrum(hosvd(random_tensor(3, 3, rng))).tail_table();
    ASSERT_EQ(tails.size(), 28u);
    EXPECT_EQ(tails.back(), 0.0);
    for (std::size_t i = 1; i < tails.size(); ++i)
        EXPECT_LE(tails[i], tails[i - 1]);
}

TEST(Truncate, ErrorEqualsDroppedEnergy)
{
    CounterRng rng(39);
    for (int trial = 0; trial < 10; ++trial) {
        const DenseTensor a = random_tensor(2, 3, rng);
        const HosvdResult h = hosvd(a);
        const Spectrum s = spectrum(h);
        for (std::size_t M = 1; M <= 8; ++M) {
            const Truncation t = truncate(h, M);
            EXPECT_EQ(t.terms.size(), M);
            // brute-force: rebuild the approximant from its terms, then diff
            DenseTensor rebuilt(2, 3);
            for (const auto& term : t.terms)
                add_scaled(rebuilt, 1.0, term_tensor(term));
            EXPECT_LE(max_abs_diff(rebuilt.data(), t.approx.data()), 1e-15);
            const double err = frobenius(a - rebuilt);
            const double dropped = s.squared_sum(M + 1);
            if (M < 8)
                EXPECT_LE(rel_diff(err * err, dropped), 1e-10);
            else
                EXPECT_LE(err, 1e-12);
        }
    }
}

TEST(Truncate, EdgeCases)
{
    CounterRng rng(40);
    const DenseTensor a = random_tensor(3, 2, rng);
    const HosvdResult h = hosvd(a);
    EXPECT_THROW(truncate(h, 0), InvalidArgument);
    const Truncation full = truncate(h, 100);
    EXPECT_EQ(full.terms.size(), 9u);
    EXPECT_LE(rel_frobenius_error(a, full.approx), 1e-12);
    EXPECT_LE(max_abs_diff(full.approx.data(), reconstruct(h).data()), 1e-12);

    const DenseTensor r1 = outer_product({{1, -2, 1}, {0.5, 0.5, 1}});
    const Truncation one = truncate(hosvd(r1), 1);
    EXPECT_LE(frobenius(r1 - one.approx), 1e-13);

    const Truncation zero = truncate(hosvd(DenseTensor(2, 3)), 3);
    EXPECT_TRUE(zero.terms.empty());
    EXPECT_EQ(zero.approx, DenseTensor(2, 3));
}

TEST(Reconstruct, RankOneRoundTrip)
{
    const DenseTensor a = outer_product({{1, 2, 3}, {-1, 0.5, 2}});
    EXPECT_LE(max_abs_diff(reconstruct(hosvd(a)).data(), a.data()), 1e-12 * frobenius(a));
}
