#pragma once

#include <array>
#include <string>
#include <vector>

#include "confspec/linalg.hpp"

namespace confspec {

enum class DomainKind { circle, torus2 };

// Uniform periodic grid on [0,2pi)^d with trapezoid quadrature weights.
struct Domain {
    DomainKind kind;
    int resolution;                       // points per period direction
    int dim;                              // 1 or 2
    std::vector<std::array<double, 2>> nodes;  // y-coordinate 0 on the circle
    std::vector<double> quad_weights;

    std::size_t node_count() const { return nodes.size(); }
};

Domain make_domain(DomainKind kind, int resolution);
DomainKind parse_domain_kind(const std::string& s);
std::string to_string(DomainKind k);

// One term of a real trigonometric polynomial: coef * phase(kx*x + ky*y).
struct TrigTerm {
    int kx = 0;
    int ky = 0;
    bool is_sin = false;  // cos otherwise
    double coef = 0.0;
};

struct FactorSpec {
    std::vector<TrigTerm> terms;
};

struct ConformalFactor {
    std::vector<double> values;  // per node
    double sup_norm = 0.0;
    std::string description;
};

// Evaluates the trig polynomial at the nodes. Modes at or above Nyquist are
// rejected (they alias on the grid).
ConformalFactor make_factor(const Domain& domain, const FactorSpec& spec);
ConformalFactor constant_factor(const Domain& domain, double value);

// Values of a section: rank x node_count, component-major layout matching the
// operator matrices (component c of node x sits at index c*node_count + x).
struct Section {
    const Domain* domain = nullptr;
    int rank = 1;
    std::vector<double> components;

    double& at(int component, std::size_t node) {
        return components[static_cast<std::size_t>(component) * domain->node_count() + node];
    }
    double at(int component, std::size_t node) const {
        return components[static_cast<std::size_t>(component) * domain->node_count() + node];
    }
};

Section make_section(const Domain& domain, int rank);
Section section_from_values(const Domain& domain, std::vector<double> flat, int rank);

// Quadrature approximation of the global inner product <u,v>.
double inner_product(const Section& u, const Section& v);
double inner_product(const std::vector<double>& u, const std::vector<double>& v,
                     const std::vector<double>& weights);

}  // namespace confspec
