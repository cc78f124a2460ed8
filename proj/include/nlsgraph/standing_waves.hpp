#pragma once

#include <optional>
#include <set>

#include "nlsgraph/graph_core.hpp"

namespace nlsg {

/// Model parameters of the focusing NLS with power nonlinearity -|z|^{2mu}
/// on an N-edge star graph with a delta vertex of strength alpha (0 = Kirchhoff).
struct NLSParams {
    int n_edges;
    double mu;
    double alpha;

    NLSParams(int n, double mu_, double alpha_) : n_edges(n), mu(mu_), alpha(alpha_) {
        if (n < 2) throw std::invalid_argument("NLSParams: need at least 2 edges");
        if (mu_ <= 0.0) throw std::invalid_argument("NLSParams: mu must be positive");
    }
};

/// Symbolic description of a closed-form standing wave: edges 1..j carry bump
/// profiles phi(a;.), the remaining edges tail profiles phi(-a;.). The even-N
/// Kirchhoff family is described by kirchhoff_shift instead (any real a).
struct StationaryState {
    NLSParams params;
    double omega;
    int n_bumps;
    double shift;  // a >= 0
    std::optional<double> kirchhoff_shift;

    /// Edge center a_i (signed) of the half-line profile on edge i.
    double edge_center(int edge) const;
};

/// Branch frequency threshold alpha^2/(N-2j)^2 (0 for Kirchhoff).
double branch_threshold(const NLSParams& params, int j);

/// phi(a; x) = [(mu+1) omega]^{1/(2mu)} sech^{1/mu}(mu sqrt(omega) (x - a)).
double half_soliton_profile(double omega, double mu, double a, double x);

/// Bump counts j for which the tanh matching condition has a solution:
/// alpha<0 -> {0..floor((N-1)/2)}, alpha>0 -> {floor(N/2)+1..N}; alpha=0 -> {0}
/// as a sentinel for the Kirchhoff families.
std::set<int> admissible_bump_counts(const NLSParams& params);

/// The j-bumps state with shift a^j = arctanh(alpha/((2j-N) sqrt(omega)))/(mu sqrt(omega)).
StationaryState build_state(const NLSParams& params, double omega, int j);

/// Kirchhoff stationary states: odd N requires a = 0; even N admits any shift a,
/// with edges 1..N/2 carrying phi(-a;.) and the rest phi(+a;.).
StationaryState kirchhoff_state(const NLSParams& params, double omega, double a);

/// Samples the closed-form state on a grid (real-valued).
GraphFunction sample(const StationaryState& state, const StarGrid& grid);

/// I(mu) = \int_0^1 (1-t^2)^{1/mu-1} dt.
double profile_mass_constant(double mu);

/// \int_c^1 (1-t^2)^{1/mu-1} dt for c in [0,1].
double profile_mass_integral(double c, double mu);

/// Closed-form mass of the state (alpha <= 0 branches and Kirchhoff only).
double mass_closed_form(const StationaryState& state);

/// d(mass)/d(omega) along the branch, in closed form.
double mass_closed_form_domega(const StationaryState& state);

/// omega* = (m + 2|alpha|)^2 / (4 N^2), the cubic common frequency at mass m.
double cubic_omega_star(const NLSParams& params, double m);

/// Cubic (mu = 1) energy of the j-bumps state at fixed mass m:
/// E = -(m+2|alpha|)^3/(24 N^2) + |alpha|^3/(3 (2j-N)^2).
double energy_closed_form_cubic(const NLSParams& params, double m, int j);

struct NoSolutionError : std::runtime_error {
    double minimum_mass;
    NoSolutionError(const std::string& what, double min_mass)
        : std::runtime_error(what), minimum_mass(min_mass) {}
};

/// Unique omega on branch j with mass_closed_form = m (bisection, rel tol 1e-12).
double solve_omega_for_mass(const NLSParams& params, int j, double m);

/// Mass threshold m* of the constrained-minimization theorem (alpha < 0,
/// 0 < mu <= 2); for mu = 2 returns min{m*, pi sqrt(3) N / 4}.
double critical_mass(const NLSParams& params);

/// Exact travelling-wave solution on an even-N Kirchhoff graph at time t,
/// built from translating solitons on the N/2 fictitious lines.
GraphFunction travelling_wave_even_kirchhoff(const NLSParams& params, double omega, double a,
                                             double v, double theta, double t,
                                             const StarGrid& grid);

}  // namespace nlsg
