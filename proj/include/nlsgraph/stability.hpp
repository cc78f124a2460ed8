#pragma once

#include "nlsgraph/operators.hpp"
#include "nlsgraph/standing_waves.hpp"

namespace nlsg {

enum class OperatorKind { L1, L2, JL };

/// Discretization of the linearization blocks about a stationary state, in
/// standard symmetric form (vertex handled by a shared unknown plus the
/// trapezoid-consistent flux row). JL is the Hamiltonian block [[0,L2],[-L1,0]].
struct LinearizedOperator {
    OperatorKind kind;
    StationaryState state;
    StarGrid grid;
    StarMatrix sym;           // L1 / L2
    Eigen::MatrixXd jl;       // JL only (2n x 2n)
};

LinearizedOperator assemble_L1(const StationaryState& state, const StarGrid& grid);
LinearizedOperator assemble_L2(const StationaryState& state, const StarGrid& grid);
LinearizedOperator assemble_JL(const StationaryState& state, const StarGrid& grid);

enum class EigBackend { Dense, Lanczos };

/// k algebraically smallest eigenpairs of a symmetric linearized operator.
std::vector<EigenPair> eig_low(const LinearizedOperator& op, int k,
                               EigBackend backend = EigBackend::Lanczos);

/// Full spectrum of the JL block (dense solve), sorted by |Re|, then -Re.
Eigen::VectorXcd jl_spectrum(const LinearizedOperator& op);

/// Largest |Re lambda| over the JL spectrum; spectral instability when it
/// exceeds the discretization tolerance 10 h^2.
double jl_max_real_part(const LinearizedOperator& op);

struct MorseIndexResult {
    int index;      // eigenvalues below -tol, tol = 10 h^2
    int near_zero;  // eigenvalues within (-tol, tol]
};

/// Morse index of L1 via structured inertia counts (no eigensolve).
MorseIndexResult morse_index(const StationaryState& state, const StarGrid& grid);

/// d/domega of the closed-form branch mass, central difference with one
/// Richardson extrapolation, step 1e-6 * omega.
double vk_derivative(const NLSParams& params, int j, double omega);

/// Bisection bracket [lo, hi] for the VK sign change on branch j (mu > 2).
std::pair<double, double> bracket_vk_root(const NLSParams& params, int j, double omega_lo,
                                          double omega_hi, double rel_tol = 1e-10);

enum class Verdict { Stable, Unstable, Undecided };

struct StabilityReport {
    Verdict verdict;
    int morse_index;
    double l2_kernel_residual;
    double l2_second_eigenvalue;
    double vk;
    bool theorem_scope;  // false for excited states (j != 0): reported, not asserted
    std::string notes;
};

/// Grillakis-Shatah-Strauss style classification: Morse index 1, simple L2
/// kernel with positive remainder, and the Vakhitov-Kolokolov sign.
StabilityReport classify_stability(const NLSParams& params, int j, double omega,
                                   const StarGrid& grid);

}  // namespace nlsg
