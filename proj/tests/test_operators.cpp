#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "confspec/eigensolve.hpp"
#include "confspec/operators.hpp"
#include "confspec/perturb.hpp"

using namespace confspec;
constexpr double pi = std::numbers::pi;

namespace {

ConformalFactor cos_factor(const Domain& d, int kx, double coef = 1.0) {
    FactorSpec spec;
    spec.terms.push_back({kx, 0, false, coef});
    return make_factor(d, spec);
}

std::vector<std::vector<double>> random_sections(std::size_t n, int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<std::vector<double>> out(count, std::vector<double>(n));
    for (auto& s : out)
        for (double& v : s) v = uni(rng);
    return out;
}

}  // namespace

TEST_CASE("bidegree constants") {
    Bidegree lap{0.0, 2.0};
    CHECK(lap.eta() == doctest::Approx(-0.5));
    CHECK(lap.c() == doctest::Approx(0.5));
    Bidegree dir{0.0, 1.0};
    CHECK(dir.eta() == doctest::Approx(-0.25));
}

TEST_CASE("torus laplacian has the lattice spectrum") {
    Domain d = make_domain(DomainKind::torus2, 8);
    CovariantOperator op = conformal_laplacian_torus(d);
    CHECK(asymmetry(op.background) < 1e-12);
    Spectrum s = solve_symmetric(op.background, op.entry_weights());

    std::vector<double> expected;
    for (int j = -3; j <= 4; ++j)
        for (int k = -3; k <= 4; ++k) expected.push_back(double(j * j + k * k));
    std::sort(expected.begin(), expected.end());
    REQUIRE(s.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(s.eigenvalues[i] == doctest::Approx(expected[i]).scale(1.0).epsilon(1e-10));
}

TEST_CASE("dirac circle spectra per spin structure") {
    Domain d = make_domain(DomainKind::circle, 32);
    {
        CovariantOperator op = dirac_circle(d, SpinStructure::antiperiodic);
        CHECK(op.rank == 2);
        Spectrum s = solve_symmetric(op.background, op.entry_weights());
        std::vector<double> expected;
        for (int k = -16; k <= 15; ++k) {
            expected.push_back(k + 0.5);
            expected.push_back(k + 0.5);
        }
        std::sort(expected.begin(), expected.end());
        REQUIRE(s.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i)
            CHECK(s.eigenvalues[i] == doctest::Approx(expected[i]).scale(1.0).epsilon(1e-10));
    }
    {
        CovariantOperator op = dirac_circle(d, SpinStructure::periodic);
        Spectrum s = solve_symmetric(op.background, op.entry_weights());
        CHECK(kernel_dimension(s) == 2);
    }
}

TEST_CASE("family matrix at eps 0 is the background, bitwise") {
    Domain d = make_domain(DomainKind::circle, 16);
    CovariantOperator op = dirac_circle(d, SpinStructure::antiperiodic);
    ConjugatedFamily family(op, cos_factor(d, 1));
    CHECK(family_matrix(family, 0.0) == op.background);
}

TEST_CASE("family semigroup under re-basing") {
    Domain d = make_domain(DomainKind::circle, 16);
    CovariantOperator op = dirac_circle(d, SpinStructure::antiperiodic);
    ConjugatedFamily family(op, cos_factor(d, 2, 0.7));
    const double e1 = 0.11, e2 = 0.06;
    Matrix direct = family_matrix(family, e1 + e2);
    // A(e1+e2) = E(e2) A(e1) E(e2)
    Matrix a1 = family_matrix(family, e1);
    std::vector<double> diag = family.exponential_diag(e2);
    Matrix rebased = scale_rows(scale_cols(a1, diag), diag);
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.rows(); ++i)
        for (std::size_t j = 0; j < direct.cols(); ++j)
            worst = std::max(worst, std::abs(direct(i, j) - rebased(i, j)));
    CHECK(worst < 1e-12 * std::max(1.0, direct.max_abs()));
}

TEST_CASE("constant shift of the factor rescales the family") {
    Domain d = make_domain(DomainKind::circle, 16);
    CovariantOperator op = dirac_circle(d, SpinStructure::antiperiodic);
    ConformalFactor f = cos_factor(d, 1, 0.5);
    FactorSpec shifted_spec;
    shifted_spec.terms.push_back({1, 0, false, 0.5});
    shifted_spec.terms.push_back({0, 0, false, 0.3});
    ConformalFactor f_shift = make_factor(d, shifted_spec);

    const double eps = 0.2;
    const double eta = op.bidegree.eta();
    Matrix a = family_matrix(ConjugatedFamily(op, f), eps);
    Matrix b = family_matrix(ConjugatedFamily(op, f_shift), eps);
    const double scale = std::exp(2.0 * eta * eps * 0.3);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(b(i, j) - scale * a(i, j)));
    CHECK(worst < 1e-12 * std::max(1.0, a.max_abs()));
}

TEST_CASE("derivative matrix closed forms for a constant factor") {
    Domain d = make_domain(DomainKind::torus2, 8);
    CovariantOperator op = conformal_laplacian_torus(d);
    ConjugatedFamily family(op, constant_factor(d, 1.0));
    const double eta = op.bidegree.eta();

    Matrix d1 = derivative_matrix(family, 1);  // 2*eta*P
    Matrix d2 = derivative_matrix(family, 2);  // 4*eta^2*P
    double w1 = 0.0, w2 = 0.0;
    for (std::size_t i = 0; i < d1.rows(); ++i)
        for (std::size_t j = 0; j < d1.cols(); ++j) {
            w1 = std::max(w1, std::abs(d1(i, j) - 2.0 * eta * op.background(i, j)));
            w2 = std::max(w2, std::abs(d2(i, j) - 4.0 * eta * eta * op.background(i, j)));
        }
    CHECK(w1 < 1e-12 * op.background.max_abs());
    CHECK(w2 < 1e-12 * op.background.max_abs());
}

TEST_CASE("derivative matrix matches finite differences of the family") {
    Domain d = make_domain(DomainKind::circle, 16);
    CovariantOperator op = dirac_circle(d, SpinStructure::antiperiodic);
    ConjugatedFamily family(op, cos_factor(d, 1, 0.8));
    Matrix d1 = derivative_matrix(family, 1);
    const double h = 1e-6;
    Matrix p = family_matrix(family, h), m = family_matrix(family, -h);
    double worst = 0.0;
    for (std::size_t i = 0; i < d1.rows(); ++i)
        for (std::size_t j = 0; j < d1.cols(); ++j)
            worst = std::max(worst, std::abs((p(i, j) - m(i, j)) / (2.0 * h) - d1(i, j)));
    CHECK(worst < 1e-7);
}

TEST_CASE("derivative bound holds on random sections") {
    Domain d = make_domain(DomainKind::circle, 32);
    CovariantOperator op = dirac_circle(d, SpinStructure::antiperiodic);
    ConjugatedFamily family(op, cos_factor(d, 3, 1.2));
    auto samples = random_sections(op.size(), 20, 99);
    for (int k : {1, 3}) {
        BoundReport r = derivative_bound_check(family, k, samples);
        CHECK(r.all_pass);
        CHECK(r.samples.size() == 20);
    }
}

TEST_CASE("deformed arc length of a constant factor") {
    Domain d = make_domain(DomainKind::circle, 64);
    ConformalFactor f = constant_factor(d, 0.4);
    const double eps = 0.3;
    CHECK(deformed_circle_length(d, f, eps) ==
          doctest::Approx(2.0 * pi * std::exp(eps * 0.4 / 2.0)).epsilon(1e-12));
}

TEST_CASE("dirac oracle at eps 0 reproduces the flat spectrum") {
    Domain d = make_domain(DomainKind::circle, 64);
    CovariantOperator op = dirac_circle(d, SpinStructure::antiperiodic);
    ConformalFactor f = cos_factor(d, 1);
    std::vector<double> oracle = dirac_oracle_spectrum(op, f, 0.0, 4);
    std::vector<double> expected = {-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5};
    REQUIRE(oracle.size() == expected.size());
    for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK(oracle[i] == doctest::Approx(expected[i]).epsilon(1e-13));
}

TEST_CASE("synthetic power squares the spectrum") {
    Domain d = make_domain(DomainKind::circle, 16);
    CovariantOperator base = dirac_circle(d, SpinStructure::antiperiodic);
    CovariantOperator sq = synthetic_power(base, 2, {0.0, 4.0});
    CHECK(sq.synthetic);
    CHECK(sq.bidegree.eta() == doctest::Approx(-1.0));
    Spectrum sb = solve_symmetric(base.background, base.entry_weights());
    Spectrum ss = solve_symmetric(sq.background, sq.entry_weights());
    std::vector<double> expected;
    for (double v : sb.eigenvalues) expected.push_back(v * v);
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(ss.eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-10).scale(1.0));

    CHECK_THROWS_AS(synthetic_power(base, 2, {1.0, 1.0}), std::invalid_argument);
}
