#pragma once

#include "nlsgraph/star_grid.hpp"

namespace nlsg {

/// Composite-trapezoid approximation of (sum_j \int |psi_j|^p dx)^{1/p}.
double lp_norm(const GraphFunction& f, double p);

/// Trapezoid mass of a single edge, \int_0^L |psi_j|^2 dx.
double edge_mass(const GraphFunction& f, int edge);

/// ||Psi'|| with centered differences in the interior and second-order
/// one-sided stencils at the edge endpoints.
double h1_seminorm(const GraphFunction& f);

/// Per-edge derivative samples used by h1_seminorm.
GraphFunction derivative(const GraphFunction& f);

/// Trapezoid sum_j \int conj(psi_j) phi_j dx; conjugate-linear in f.
Complex inner_product(const GraphFunction& f, const GraphFunction& g);

/// Outgoing derivative psi_j'(0) from the three-point stencil (-3f0+4f1-f2)/(2h).
Complex vertex_derivative(const GraphFunction& f, int edge);

/// Max absolute mismatch over the defining equations of the condition at the
/// vertex; O(h^2) for sampled functions that satisfy it exactly.
double vertex_residual(const GraphFunction& f, const VertexCondition& cond);

}  // namespace nlsg
