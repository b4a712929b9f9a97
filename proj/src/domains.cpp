#include "confspec/domains.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace confspec {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

Domain make_domain(DomainKind kind, int resolution) {
    if (resolution < 8) throw std::invalid_argument("make_domain: resolution must be >= 8");
    if (resolution % 2 != 0) throw std::invalid_argument("make_domain: resolution must be even");

    Domain d;
    d.kind = kind;
    d.resolution = resolution;
    d.dim = (kind == DomainKind::circle) ? 1 : 2;

    const double h = two_pi / resolution;
    if (kind == DomainKind::circle) {
        d.nodes.reserve(resolution);
        for (int j = 0; j < resolution; ++j) d.nodes.push_back({h * j, 0.0});
        d.quad_weights.assign(d.nodes.size(), h);
    } else {
        d.nodes.reserve(static_cast<std::size_t>(resolution) * resolution);
        for (int j = 0; j < resolution; ++j)
            for (int k = 0; k < resolution; ++k) d.nodes.push_back({h * j, h * k});
        d.quad_weights.assign(d.nodes.size(), h * h);
    }
    return d;
}

DomainKind parse_domain_kind(const std::string& s) {
    if (s == "circle") return DomainKind::circle;
    if (s == "torus2") return DomainKind::torus2;
    throw std::invalid_argument("unknown domain kind: " + s);
}

std::string to_string(DomainKind k) {
    return k == DomainKind::circle ? "circle" : "torus2";
}

ConformalFactor make_factor(const Domain& domain, const FactorSpec& spec) {
    const int nyquist = domain.resolution / 2;
    for (const TrigTerm& t : spec.terms) {
        if (std::abs(t.kx) >= nyquist || std::abs(t.ky) >= nyquist)
            throw std::invalid_argument("make_factor: mode at or above Nyquist");
        if (domain.kind == DomainKind::circle && t.ky != 0)
            throw std::invalid_argument("make_factor: ky must be 0 on the circle");
    }

    ConformalFactor f;
    f.values.assign(domain.node_count(), 0.0);
    for (std::size_t i = 0; i < domain.node_count(); ++i) {
        const double x = domain.nodes[i][0], y = domain.nodes[i][1];
        double v = 0.0;
        for (const TrigTerm& t : spec.terms) {
            const double arg = t.kx * x + t.ky * y;
            v += t.coef * (t.is_sin ? std::sin(arg) : std::cos(arg));
        }
        f.values[i] = v;
    }
    for (double v : f.values) f.sup_norm = std::max(f.sup_norm, std::abs(v));

    std::string desc;
    for (const TrigTerm& t : spec.terms) {
        if (!desc.empty()) desc += " + ";
        desc += std::to_string(t.coef) + "*" + (t.is_sin ? "sin" : "cos") + "(" +
                std::to_string(t.kx) + "x" +
                (t.ky != 0 ? (t.ky > 0 ? "+" : "") + std::to_string(t.ky) + "y" : "") + ")";
    }
    f.description = desc.empty() ? "0" : desc;
    return f;
}

ConformalFactor constant_factor(const Domain& domain, double value) {
    ConformalFactor f;
    f.values.assign(domain.node_count(), value);
    f.sup_norm = std::abs(value);
    f.description = "const " + std::to_string(value);
    return f;
}

Section make_section(const Domain& domain, int rank) {
    Section s;
    s.domain = &domain;
    s.rank = rank;
    s.components.assign(static_cast<std::size_t>(rank) * domain.node_count(), 0.0);
    return s;
}

Section section_from_values(const Domain& domain, std::vector<double> flat, int rank) {
    if (flat.size() != static_cast<std::size_t>(rank) * domain.node_count())
        throw std::invalid_argument("section_from_values: size mismatch");
    Section s;
    s.domain = &domain;
    s.rank = rank;
    s.components = std::move(flat);
    return s;
}

double inner_product(const Section& u, const Section& v) {
    if (u.domain != v.domain || u.rank != v.rank)
        throw std::invalid_argument("inner_product: mismatched sections");
    const std::size_t nn = u.domain->node_count();
    double s = 0.0;
    for (std::size_t x = 0; x < nn; ++x) {
        double fib = 0.0;
        for (int c = 0; c < u.rank; ++c) fib += u.at(c, x) * v.at(c, x);
        s += u.domain->quad_weights[x] * fib;
    }
    return s;
}

double inner_product(const std::vector<double>& u, const std::vector<double>& v,
                     const std::vector<double>& weights) {
    if (u.size() != v.size() || u.size() != weights.size())
        throw std::invalid_argument("inner_product: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += weights[i] * u[i] * v[i];
    return s;
}

}  // namespace confspec
