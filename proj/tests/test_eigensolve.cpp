#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "confspec/eigensolve.hpp"

using namespace confspec;

namespace {

Matrix random_symmetric(std::size_t n, std::mt19937& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = uni(rng);
    return a;
}

}  // namespace

TEST_CASE("ql path agrees with the jacobi reference") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + static_cast<std::size_t>(trial % 4) * 7;
        Matrix a = random_symmetric(n, rng);
        std::vector<double> w(n, 1.0);
        Spectrum ql = solve_symmetric(a, w);

        std::vector<double> jv;
        Matrix jz;
        kernels::jacobi_eigen(a, jv, jz);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(ql.eigenvalues[i] == doctest::Approx(jv[i]).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("eigen decomposition reconstructs the matrix") {
    std::mt19937 rng(11);
    Matrix a = random_symmetric(24, rng);
    std::vector<double> w(24, 1.0);
    Spectrum s = solve_symmetric(a, w);
    double worst = 0.0;
    for (std::size_t i = 0; i < 24; ++i) {
        std::vector<double> v = s.eigenvector(i);
        std::vector<double> av = matvec(a, v);
        for (std::size_t r = 0; r < 24; ++r)
            worst = std::max(worst, std::abs(av[r] - s.eigenvalues[i] * v[r]));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("repeat solves are bit-identical") {
    std::mt19937 rng(13);
    Matrix a = random_symmetric(40, rng);
    std::vector<double> w(40, 1.0);
    Spectrum s1 = solve_symmetric(a, w);
    Spectrum s2 = solve_symmetric(a, w);
    CHECK(s1.eigenvalues == s2.eigenvalues);
    CHECK(s1.eigenvectors == s2.eigenvectors);
}

TEST_CASE("weighted solve matches the explicit similarity reduction") {
    // A is weighted-symmetric: W A = (W A)^T with W = diag(w).
    std::mt19937 rng(17);
    const std::size_t n = 12;
    std::vector<double> w(n);
    std::uniform_real_distribution<double> uni(0.5, 2.0);
    for (double& x : w) x = uni(rng);
    Matrix sym = random_symmetric(n, rng);
    // A = W^{-1} * sym is weighted-symmetric.
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = sym(i, j) / w[i];
    Spectrum s = solve_symmetric(a, w);

    // Oracle: eigenvalues of B = W^{1/2} A W^{-1/2} via jacobi.
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b(i, j) = std::sqrt(w[i]) * a(i, j) / std::sqrt(w[j]);
    std::vector<double> jv;
    Matrix jz;
    kernels::jacobi_eigen(b, jv, jz);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(s.eigenvalues[i] == doctest::Approx(jv[i]).epsilon(1e-10).scale(1.0));

    // Eigenvectors orthonormal in the weighted inner product.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double ip = 0.0;
            for (std::size_t r = 0; r < n; ++r) ip += w[r] * s.eigenvectors(r, i) * s.eigenvectors(r, j);
            CHECK(ip == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-10));
        }
}

TEST_CASE("generalized solve matches direct reduction") {
    std::mt19937 rng(23);
    const std::size_t n = 10;
    Matrix k = random_symmetric(n, rng);
    std::vector<double> mass(n), w(n, 1.0);
    std::uniform_real_distribution<double> uni(0.25, 4.0);
    for (double& m : mass) m = uni(rng);
    Spectrum s = solve_generalized(k, mass, w);

    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b(i, j) = k(i, j) / std::sqrt(mass[i] * mass[j]);
    std::vector<double> jv;
    Matrix jz;
    kernels::jacobi_eigen(b, jv, jz);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(s.eigenvalues[i] == doctest::Approx(jv[i]).epsilon(1e-10).scale(1.0));

    // K v = lambda * M v residual.
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v = s.eigenvector(i);
        std::vector<double> kv = matvec(k, v);
        for (std::size_t r = 0; r < n; ++r)
            worst = std::max(worst, std::abs(kv[r] - s.eigenvalues[i] * mass[r] * v[r]));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("non-symmetric input is rejected") {
    Matrix a(3, 3);
    a(0, 1) = 1.0;
    a(1, 0) = 2.0;
    std::vector<double> w(3, 1.0);
    CHECK_THROWS_AS(solve_symmetric(a, w), std::invalid_argument);
}

TEST_CASE("clustering groups by relative gap") {
    Spectrum s;
    s.eigenvalues = {1.0, 1.0 + 5e-9, 2.0, 5.0, 5.0 + 2e-8, 5.0 + 4e-8};
    s.eigenvectors = Matrix::identity(6);
    s.weights.assign(6, 1.0);
    std::vector<Eigenspace> cs = cluster(s, 1e-8);
    REQUIRE(cs.size() == 3);
    CHECK(cs[0].multiplicity == 2);
    CHECK(cs[1].multiplicity == 1);
    CHECK(cs[2].multiplicity == 3);  // gap 2e-8 <= 1e-8 * max(1, 5)
    CHECK(cs[2].first_index == 3);
    CHECK(cs[0].value == doctest::Approx(1.0 + 2.5e-9));
}

TEST_CASE("eigenvector sign convention is stable") {
    Matrix a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 3.0;
    std::vector<double> w(2, 1.0);
    Spectrum s = solve_symmetric(a, w);
    CHECK(s.eigenvectors(0, 0) > 0.0);  // largest-|entry| component made positive
    CHECK(s.eigenvectors(1, 1) > 0.0);
}
