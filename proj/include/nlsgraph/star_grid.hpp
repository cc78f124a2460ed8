#pragma once

#include <complex>
#include <stdexcept>
#include <variant>

#include <Eigen/Dense>

namespace nlsg {

using Complex = std::complex<double>;

/// Uniform discretization of an N-edge star graph. Each half-line edge is
/// truncated at x = L and carries M samples with spacing h = L/(M-1); the
/// vertex is sample 0 on every edge.
struct StarGrid {
    int n_edges;
    double edge_length;
    int n_points;

    StarGrid(int n_edges_, double edge_length_, int n_points_)
        : n_edges(n_edges_), edge_length(edge_length_), n_points(n_points_) {
        if (n_edges < 2) throw std::invalid_argument("StarGrid: need at least 2 edges");
        if (edge_length <= 0.0) throw std::invalid_argument("StarGrid: edge_length must be positive");
        if (n_points < 3) throw std::invalid_argument("StarGrid: need at least 3 points per edge");
    }

    double h() const { return edge_length / (n_points - 1); }
    double x(int i) const { return i * h(); }

    bool operator==(const StarGrid& o) const {
        return n_edges == o.n_edges && edge_length == o.edge_length && n_points == o.n_points;
    }
};

/// Complex-valued samples on every edge of a StarGrid; row j holds edge j.
struct GraphFunction {
    StarGrid grid;
    Eigen::MatrixXcd values;  // n_edges x n_points

    explicit GraphFunction(const StarGrid& g)
        : grid(g), values(Eigen::MatrixXcd::Zero(g.n_edges, g.n_points)) {}

    Complex& operator()(int edge, int i) { return values(edge, i); }
    Complex operator()(int edge, int i) const { return values(edge, i); }

    bool all_finite() const { return values.allFinite(); }

    GraphFunction& operator+=(const GraphFunction& o) {
        require_same_grid(o);
        values += o.values;
        return *this;
    }
    GraphFunction& operator-=(const GraphFunction& o) {
        require_same_grid(o);
        values -= o.values;
        return *this;
    }
    GraphFunction& operator*=(Complex c) {
        values *= c;
        return *this;
    }
    friend GraphFunction operator+(GraphFunction a, const GraphFunction& b) { return a += b; }
    friend GraphFunction operator-(GraphFunction a, const GraphFunction& b) { return a -= b; }
    friend GraphFunction operator*(Complex c, GraphFunction f) { return f *= c; }

    void require_same_grid(const GraphFunction& o) const {
        if (!(grid == o.grid)) throw std::invalid_argument("GraphFunction: grid mismatch");
    }
};

struct Delta {
    double alpha = 0.0;
};
struct Kirchhoff {};
struct DeltaPrimeS {
    double beta;
};
struct GeneralU {
    Eigen::MatrixXcd matrix;  // unitary, checked on construction via make_general_u
};

/// Vertex coupling selecting the self-adjoint Laplacian: delta(alpha),
/// Kirchhoff (= delta(0)), delta'_s(beta), or a general unitary parametrization.
using VertexCondition = std::variant<Delta, Kirchhoff, DeltaPrimeS, GeneralU>;

/// True iff ||U*U - I||_max <= 1e-12.
bool validate_unitary(const Eigen::MatrixXcd& u);

/// Builds a GeneralU condition, rejecting non-unitary matrices.
GeneralU make_general_u(const Eigen::MatrixXcd& u);

/// Strength alpha of a delta-type condition; Kirchhoff reads as alpha = 0.
inline double delta_strength(const VertexCondition& c) {
    if (std::holds_alternative<Delta>(c)) return std::get<Delta>(c).alpha;
    if (std::holds_alternative<Kirchhoff>(c)) return 0.0;
    throw std::invalid_argument("vertex condition is not delta-type");
}

inline bool is_delta_type(const VertexCondition& c) {
    return std::holds_alternative<Delta>(c) || std::holds_alternative<Kirchhoff>(c);
}

/// Normalized comparison: Kirchhoff == Delta(0).
bool same_condition(const VertexCondition& a, const VertexCondition& b);

}  // namespace nlsg
