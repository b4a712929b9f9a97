#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "confspec/domains.hpp"

using namespace confspec;
constexpr double pi = std::numbers::pi;

TEST_CASE("circle grid layout and weights") {
    Domain d = make_domain(DomainKind::circle, 16);
    CHECK(d.dim == 1);
    CHECK(d.node_count() == 16);
    CHECK(d.nodes[3][0] == doctest::Approx(3.0 * 2.0 * pi / 16.0));
    CHECK(d.nodes[3][1] == 0.0);
    double total = 0.0;
    for (double w : d.quad_weights) total += w;
    CHECK(total == doctest::Approx(2.0 * pi).epsilon(1e-14));
}

TEST_CASE("torus grid layout and weights") {
    Domain d = make_domain(DomainKind::torus2, 12);
    CHECK(d.dim == 2);
    CHECK(d.node_count() == 144);
    // node index j*n + k is (x_j, y_k)
    CHECK(d.nodes[5 * 12 + 7][0] == doctest::Approx(5.0 * 2.0 * pi / 12.0));
    CHECK(d.nodes[5 * 12 + 7][1] == doctest::Approx(7.0 * 2.0 * pi / 12.0));
    double total = 0.0;
    for (double w : d.quad_weights) total += w;
    CHECK(total == doctest::Approx(4.0 * pi * pi).epsilon(1e-14));
}

TEST_CASE("resolution validation") {
    CHECK_THROWS_AS(make_domain(DomainKind::circle, 15), std::invalid_argument);
    CHECK_THROWS_AS(make_domain(DomainKind::circle, 6), std::invalid_argument);
    CHECK_THROWS_AS(make_domain(DomainKind::torus2, 7), std::invalid_argument);
}

TEST_CASE("trig factor evaluation and sup norm") {
    Domain d = make_domain(DomainKind::torus2, 16);
    FactorSpec spec;
    spec.terms.push_back({2, -1, false, 1.5});  // 1.5 cos(2x - y)
    ConformalFactor f = make_factor(d, spec);
    for (std::size_t i = 0; i < d.node_count(); ++i) {
        const double x = d.nodes[i][0], y = d.nodes[i][1];
        CHECK(f.values[i] == doctest::Approx(1.5 * std::cos(2 * x - y)).epsilon(1e-14));
    }
    CHECK(f.sup_norm <= 1.5 + 1e-12);
    CHECK(f.sup_norm > 1.4);
}

TEST_CASE("factor validation") {
    Domain circle = make_domain(DomainKind::circle, 16);
    FactorSpec bad_ky;
    bad_ky.terms.push_back({1, 1, false, 1.0});
    CHECK_THROWS_AS(make_factor(circle, bad_ky), std::invalid_argument);

    FactorSpec nyquist;
    nyquist.terms.push_back({8, 0, false, 1.0});  // |mode| must stay below res/2
    CHECK_THROWS_AS(make_factor(circle, nyquist), std::invalid_argument);

    FactorSpec ok;
    ok.terms.push_back({7, 0, true, 0.25});
    CHECK_NOTHROW(make_factor(circle, ok));
}

TEST_CASE("quadrature integrates band-limited products exactly") {
    Domain d = make_domain(DomainKind::circle, 32);
    // <cos(3t), cos(3t)> = pi, <cos(3t), sin(3t)> = 0, <cos(3t), cos(4t)> = 0
    Section a = make_section(d, 1), b = make_section(d, 1), c = make_section(d, 1);
    for (std::size_t i = 0; i < d.node_count(); ++i) {
        a.at(0, i) = std::cos(3.0 * d.nodes[i][0]);
        b.at(0, i) = std::sin(3.0 * d.nodes[i][0]);
        c.at(0, i) = std::cos(4.0 * d.nodes[i][0]);
    }
    CHECK(inner_product(a, a) == doctest::Approx(pi).epsilon(1e-13));
    CHECK(inner_product(a, b) == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
    CHECK(inner_product(a, c) == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
}

TEST_CASE("section layout is component-major") {
    Domain d = make_domain(DomainKind::circle, 8);
    Section s = make_section(d, 2);
    s.at(1, 3) = 42.0;
    CHECK(s.components[1 * 8 + 3] == 42.0);
    Section t = section_from_values(d, s.components, 2);
    CHECK(t.at(1, 3) == 42.0);
}

TEST_CASE("domain kind names round-trip") {
    CHECK(parse_domain_kind("circle") == DomainKind::circle);
    CHECK(parse_domain_kind("torus2") == DomainKind::torus2);
    CHECK(to_string(DomainKind::torus2) == "torus2");
    CHECK_THROWS_AS(parse_domain_kind("klein"), std::invalid_argument);
}
