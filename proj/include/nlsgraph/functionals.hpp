#pragma once

#include "nlsgraph/standing_waves.hpp"

namespace nlsg {

/// M[Psi] = ||Psi||^2.
double mass(const GraphFunction& f);

/// E[Psi] = 1/2 ||Psi'||^2 - ||Psi||_{2mu+2}^{2mu+2}/(2mu+2) + alpha/2 |psi(0)|^2.
/// The vertex value is psi_1(0); a cross-edge mismatch above 1e-6 triggers a
/// warning and the mean is used instead.
double energy(const GraphFunction& f, const NLSParams& params);

/// S_omega = E + omega/2 M.
double action(const GraphFunction& f, double omega, const NLSParams& params);

/// I_omega = ||Phi'||^2 - ||Phi||_{2mu+2}^{2mu+2} + omega ||Phi||^2 + alpha |phi(0)|^2;
/// vanishes on stationary states.
double nehari(const GraphFunction& f, double omega, const NLSParams& params);

struct StationaryResidual {
    double interior;  // L2 norm of -f'' + omega f - |f|^{2mu} f on interior nodes
    double vertex;    // vertex_residual for Delta(alpha)
};

/// Discrete residual of the stationary equation (three-point Laplacian).
StationaryResidual stationary_residual(const GraphFunction& f, double omega,
                                       const NLSParams& params);

/// Figure-3 trial state on a Kirchhoff graph: a complete soliton on edges 1,2
/// (bump at shift s) and the matching tail on the remaining edges.
GraphFunction runaway_state(const NLSParams& params, double omega, double s, const StarGrid& grid);

}  // namespace nlsg
