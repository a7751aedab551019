#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "vortexlab/smalleig.hpp"

using namespace vortexlab;

namespace {

Matrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = g(rng);
    return a;
}

bool has_eigenvalue(const std::vector<std::complex<double>>& ev, std::complex<double> z, double tol) {
    return std::any_of(ev.begin(), ev.end(), [&](auto e) { return std::abs(e - z) < tol; });
}

}  // namespace

TEST(SmallEig, JacobiReconstructsMatrix) {
    std::mt19937_64 rng(7);
    for (std::size_t n : {1u, 2u, 5u, 12u, 30u}) {
        const Matrix a = random_symmetric(n, rng);
        const auto sp = sym_eig(a);
        ASSERT_EQ(sp.eigenvalues.size(), n);
        EXPECT_TRUE(std::is_sorted(sp.eigenvalues.begin(), sp.eigenvalues.end()));
        Matrix d(n, n);
        for (std::size_t i = 0; i < n; ++i) d(i, i) = sp.eigenvalues[i];
        const Matrix v = sp.eigenvectors;
        EXPECT_LT((v * d * v.transpose() - a).frobenius_norm(), 1e-12 * (1 + a.frobenius_norm())) << n;
        EXPECT_LT((v.transpose() * v - Matrix::identity(n)).frobenius_norm(), 1e-13) << n;
        EXPECT_NEAR(std::accumulate(sp.eigenvalues.begin(), sp.eigenvalues.end(), 0.0), a.trace(), 1e-12);
    }
}

TEST(SmallEig, JacobiKnownSpectrum) {
    // Second-difference matrix: eigenvalues 2 - 2 cos(k pi / (n + 1)).
    const std::size_t n = 9;
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = 2.0;
        if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = -1.0;
    }
    const auto sp = sym_eig(a);
    for (std::size_t k = 1; k <= n; ++k)
        EXPECT_NEAR(sp.eigenvalues[k - 1], 2.0 - 2.0 * std::cos(k * std::numbers::pi / (n + 1)), 1e-14);
}

TEST(SmallEig, JacobiRejectsAsymmetricOrLarge) {
    EXPECT_THROW(sym_eig(Matrix::from_rows({{1, 2}, {2.1, 1}})), std::invalid_argument);
    EXPECT_THROW(sym_eig(Matrix(65, 65)), std::invalid_argument);
    EXPECT_THROW(sym_eig(Matrix(2, 3)), std::invalid_argument);
}

TEST(SmallEig, SingularValuesOfDiagonalAndRankOne) {
    const auto sv = singular_values(Matrix::from_rows({{0, 3, 0}, {-4, 0, 0}, {0, 0, 1}}));
    ASSERT_EQ(sv.size(), 3u);
    EXPECT_NEAR(sv[0], 4.0, 1e-14);
    EXPECT_NEAR(sv[1], 3.0, 1e-14);
    EXPECT_NEAR(sv[2], 1.0, 1e-14);
    const auto r1 = singular_values(Matrix::from_rows({{1, 2}, {2, 4}}));
    EXPECT_NEAR(r1[0], 5.0, 1e-14);
    EXPECT_NEAR(r1[1], 0.0, 1e-14);
}

TEST(SmallEig, GeneralEigenvaluesOfCompanionAndRotation) {
    // Companion matrix of (x-1)(x-2)(x-3)(x^2+1).
    // x^5 - 6x^4 + 12x^3 - 12x^2 + 11x - 6
    const Matrix c = Matrix::from_rows(
        {{6, -12, 12, -11, 6}, {1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 1, 0, 0}, {0, 0, 0, 1, 0}});
    const auto sp = gen_eig(c);
    ASSERT_EQ(sp.eigenvalues.size(), 5u);
    for (std::complex<double> z : {std::complex<double>(1, 0), {2, 0}, {3, 0}, {0, 1}, {0, -1}})
        EXPECT_TRUE(has_eigenvalue(sp.eigenvalues, z, 1e-10)) << z;
    EXPECT_TRUE(sp.semisimple);
    for (double r : sp.residuals) EXPECT_LT(r, 1e-12);
}

TEST(SmallEig, DetectsJordanBlock) {
    const auto jordan = gen_eig(Matrix::from_rows({{0, 1}, {0, 0}}));
    EXPECT_FALSE(jordan.semisimple);
    const auto diag = gen_eig(Matrix::from_rows({{0, 0}, {0, 0}}));
    EXPECT_TRUE(diag.semisimple);
    // Symplectic shear: double eigenvalue 0 with one eigenvector.
    const auto shear = gen_eig(Matrix::from_rows({{0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}, {0, 0, 0, 0}}));
    EXPECT_FALSE(shear.semisimple);
    // Repeated imaginary pair from two identical oscillators is semisimple.
    const auto osc = gen_eig(Matrix::from_rows({{0, 2, 0, 0}, {-2, 0, 0, 0}, {0, 0, 0, 2}, {0, 0, -2, 0}}));
    EXPECT_TRUE(osc.semisimple);
    EXPECT_TRUE(has_eigenvalue(osc.eigenvalues, {0, 2}, 1e-12));
}

TEST(SmallEig, NullityAtShift) {
    const Matrix a = Matrix::from_rows({{2, 0, 0}, {0, 2, 0}, {0, 0, 5}});
    EXPECT_EQ(nullity_at(a, 2.0, 1e-10), 2u);
    EXPECT_EQ(nullity_at(a, 5.0, 1e-10), 1u);
    EXPECT_EQ(nullity_at(a, 3.0, 1e-10), 0u);
}

TEST(SmallEig, InverseAndProducts) {
    const Matrix a = Matrix::from_rows({{4, 1, 0}, {1, 3, 1}, {0, 1, 2}});
    EXPECT_LT((a * inverse(a) - Matrix::identity(3)).frobenius_norm(), 1e-14);
    EXPECT_THROW(inverse(Matrix::from_rows({{1, 2}, {2, 4}})), std::domain_error);
    EXPECT_THROW(a * Matrix(2, 2), std::invalid_argument);
    const auto v = a.apply({1, 0, -1});
    EXPECT_EQ(v, (std::vector<double>{4, 0, -2}));
    EXPECT_THROW(Matrix::from_rows({{1, 2}, {3}}), std::invalid_argument);
}

TEST(SmallEig, RandomGeneralMatricesHaveSmallResiduals) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (std::size_t n : {3u, 8u, 20u, 40u}) {
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = g(rng);
        const auto sp = gen_eig(a);
        std::complex<double> sum = 0;
        for (auto e : sp.eigenvalues) sum += e;
        EXPECT_NEAR(sum.real(), a.trace(), 1e-10 * n);
        EXPECT_NEAR(sum.imag(), 0.0, 1e-10 * n);
        for (double r : sp.residuals) EXPECT_LT(r, 1e-12) << n;
    }
}
