#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "confspec/perturb.hpp"

using namespace confspec;

namespace {

struct DiracFixture {
    Domain domain = make_domain(DomainKind::circle, 32);
    CovariantOperator op = dirac_circle(domain, SpinStructure::antiperiodic);
    Spectrum spectrum = solve_symmetric(op.background, op.entry_weights());
};

ConformalFactor cos_factor(const Domain& d, int kx, double coef = 1.0) {
    FactorSpec spec;
    spec.terms.push_back({kx, 0, false, coef});
    return make_factor(d, spec);
}

}  // namespace

TEST_CASE("constant factor gives equal slopes 2 eta lambda c") {
    DiracFixture fx;
    ConformalFactor f = constant_factor(fx.domain, 0.7);
    std::vector<Eigenspace> clusters = cluster(fx.spectrum, 1e-8);
    const double eta = fx.op.bidegree.eta();
    int checked = 0;
    for (const Eigenspace& es : clusters) {
        if (std::abs(es.value) < 0.1 || std::abs(es.value) > 3.0) continue;
        FirstOrderMatrix m = first_order_matrix(es, f, fx.op);
        const double want = 2.0 * eta * es.value * 0.7;
        for (double s : m.predicted_slopes)
            CHECK(s == doctest::Approx(want).epsilon(1e-10));
        CHECK(m.spread() < 1e-10);
        ++checked;
    }
    CHECK(checked >= 4);
}

TEST_CASE("slope sum rule: slopes sum to the trace") {
    DiracFixture fx;
    ConformalFactor f = cos_factor(fx.domain, 2, 1.3);
    for (const Eigenspace& es : cluster(fx.spectrum, 1e-8)) {
        if (std::abs(es.value) < 0.1 || std::abs(es.value) > 2.0) continue;
        FirstOrderMatrix m = first_order_matrix(es, f, fx.op);
        double sum = 0.0;
        for (double s : m.predicted_slopes) sum += s;
        CHECK(sum == doctest::Approx(m.trace()).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("first order matrix rejects the kernel") {
    Domain d = make_domain(DomainKind::circle, 16);
    CovariantOperator op = dirac_circle(d, SpinStructure::periodic);
    Spectrum s = solve_symmetric(op.background, op.entry_weights());
    std::vector<Eigenspace> clusters = cluster(s, 1e-8);
    auto it = std::find_if(clusters.begin(), clusters.end(),
                           [](const Eigenspace& e) { return std::abs(e.value) < 1e-9; });
    REQUIRE(it != clusters.end());
    ConformalFactor f = cos_factor(d, 1);
    CHECK_THROWS_AS(first_order_matrix(*it, f, op), std::invalid_argument);
}

TEST_CASE("branch tracking on the dirac family") {
    DiracFixture fx;
    ConjugatedFamily family(fx.op, cos_factor(fx.domain, 1, 0.6));
    std::vector<double> grid = {-0.2, -0.1, -0.05, 0.0, 0.05, 0.1, 0.2};
    std::vector<Branch> branches = track_branches(family, grid, 0.2, 2.6, {});
    // Window holds 0.5 (x2), 1.5 (x2), 2.5 (x2): six branches.
    REQUIRE(branches.size() == 6);
    for (const Branch& b : branches) {
        CHECK(b.eps_grid == grid);
        CHECK(b.values[b.index_of_zero()] == doctest::Approx(b.origin_value).epsilon(1e-12));
        CHECK_FALSE(b.uncertain);
        // Exactly degenerate pairs rotate freely inside their eigenspace, so
        // per-step overlaps sit above the floor rather than near 1.
        for (double q : b.overlap_quality) CHECK(q > 0.7);
        CHECK(b.value_at(0.1) == b.values[5]);
    }
    // Dirac branches stay pairwise degenerate: values match in pairs at each eps.
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> vals;
        for (const Branch& b : branches) vals.push_back(b.values[i]);
        std::sort(vals.begin(), vals.end());
        for (std::size_t p = 0; p < vals.size(); p += 2)
            CHECK(vals[p] == doctest::Approx(vals[p + 1]).epsilon(1e-9));
    }
}

TEST_CASE("tracked branches respect the growth bound") {
    DiracFixture fx;
    ConformalFactor f = cos_factor(fx.domain, 2, 0.9);
    ConjugatedFamily family(fx.op, f);
    std::vector<Branch> branches = track_branches(family, default_eps_grid(), 0.4, 2.6, {});
    REQUIRE(!branches.empty());
    for (const Branch& b : branches) {
        GrowthReport g = growth_bound_check(b, fx.op, f);
        CHECK(g.all_pass);
        CHECK(g.margins.size() == b.eps_grid.size());
    }
}

TEST_CASE("grid without zero is rejected") {
    DiracFixture fx;
    ConjugatedFamily family(fx.op, cos_factor(fx.domain, 1));
    CHECK_THROWS_AS(track_branches(family, {-0.1, 0.1}, 0.0, 2.0, {}), std::invalid_argument);
}

TEST_CASE("kernel dimension counting") {
    Spectrum s;
    s.eigenvalues = {-2.0, -1e-12, 0.0, 3e-10, 1.0};
    s.eigenvectors = Matrix::identity(5);
    s.weights.assign(5, 1.0);
    CHECK(kernel_dimension(s, 1e-9) == 3);
    CHECK(kernel_dimension(s, 1e-13) == 1);
    CHECK(kernel_dimension(s) == 3);  // default 1e-9 * scale, scale = 2
}

TEST_CASE("default eps grid is sorted, symmetric, and contains zero") {
    std::vector<double> g = default_eps_grid();
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(std::count(g.begin(), g.end(), 0.0) == 1);
    for (double e : g)
        CHECK(std::count(g.begin(), g.end(), -e) == 1);
}
