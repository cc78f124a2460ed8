#include "nlsgraph/standing_waves.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <iostream>

namespace nlsg {

double branch_threshold(const NLSParams& params, int j) {
    if (params.alpha == 0.0) return 0.0;
    const double d = params.n_edges - 2.0 * j;
    return params.alpha * params.alpha / (d * d);
}

double half_soliton_profile(double omega, double mu, double a, double x) {
    if (omega <= 0.0) throw std::domain_error("half_soliton_profile: omega must be positive");
    if (mu <= 0.0) throw std::domain_error("half_soliton_profile: mu must be positive");
    const double amp = std::pow((mu + 1.0) * omega, 1.0 / (2.0 * mu));
    return amp * std::pow(1.0 / std::cosh(mu * std::sqrt(omega) * (x - a)), 1.0 / mu);
}

std::set<int> admissible_bump_counts(const NLSParams& params) {
    const int n = params.n_edges;
    std::set<int> out;
    if (params.alpha < 0.0) {
        for (int j = 0; j <= (n - 1) / 2; ++j) out.insert(j);
    } else if (params.alpha > 0.0) {
        for (int j = n / 2 + 1; j <= n; ++j) out.insert(j);
    } else {
        out.insert(0);  // Kirchhoff sentinel: odd N has only a=0, even N a continuum
    }
    return out;
}

double StationaryState::edge_center(int edge) const {
    if (kirchhoff_shift) {
        const double a = *kirchhoff_shift;
        return (edge < params.n_edges / 2) ? -a : a;
    }
    return (edge < n_bumps) ? shift : -shift;
}

StationaryState build_state(const NLSParams& params, double omega, int j) {
    if (params.alpha == 0.0) return kirchhoff_state(params, omega, 0.0);
    auto adm = admissible_bump_counts(params);
    if (!adm.count(j))
        throw std::invalid_argument("build_state: bump count " + std::to_string(j) +
                                    " is not admissible for this sign of alpha");
    const double thr = branch_threshold(params, j);
    if (omega <= thr)
        throw std::domain_error("build_state: omega below branch threshold alpha^2/(N-2j)^2");
    const double sq = std::sqrt(omega);
    const double a = std::atanh(params.alpha / ((2.0 * j - params.n_edges) * sq)) / (params.mu * sq);
    return StationaryState{params, omega, j, a, std::nullopt};
}

StationaryState kirchhoff_state(const NLSParams& params, double omega, double a) {
    if (params.alpha != 0.0)
        throw std::invalid_argument("kirchhoff_state: requires alpha = 0");
    if (omega <= 0.0) throw std::domain_error("kirchhoff_state: omega must be positive");
    if (params.n_edges % 2 == 1) {
        if (a != 0.0)
            throw std::invalid_argument("kirchhoff_state: odd N admits only a = 0");
        return StationaryState{params, omega, 0, 0.0, std::nullopt};
    }
    return StationaryState{params, omega, params.n_edges / 2, std::abs(a), a};
}

GraphFunction sample(const StationaryState& state, const StarGrid& grid) {
    if (grid.n_edges != state.params.n_edges)
        throw std::invalid_argument("sample: grid edge count does not match state");
    GraphFunction f(grid);
    double max_tail = 0.0;
    for (int j = 0; j < grid.n_edges; ++j) {
        const double a = state.edge_center(j);
        for (int i = 0; i < grid.n_points; ++i)
            f(j, i) = half_soliton_profile(state.omega, state.params.mu, a, grid.x(i));
        max_tail = std::max(max_tail, std::abs(f(j, grid.n_points - 1)));
    }
    if (max_tail > 1e-10)
        std::cerr << "nlsgraph: warning: truncated tail " << max_tail
                  << " exceeds 1e-10; increase edge_length\n";
    return f;
}

double profile_mass_integral(double c, double mu) {
    if (c < 0.0 || c > 1.0) throw std::domain_error("profile_mass_integral: c must lie in [0,1]");
    if (c == 1.0) return 0.0;
    // Substituting s = t^2 turns this into an incomplete beta integral:
    // 1/2 B(1/2, 1/mu) (1 - I_{c^2}(1/2, 1/mu)).
    return 0.5 * boost::math::beta(0.5, 1.0 / mu) *
           boost::math::ibetac(0.5, 1.0 / mu, c * c);
}

double profile_mass_constant(double mu) { return profile_mass_integral(0.0, mu); }

namespace {

double mass_prefactor(double mu, double omega) {
    return std::pow(mu + 1.0, 1.0 / mu) / mu * std::pow(omega, 1.0 / mu - 0.5);
}

void require_mass_branch(const StationaryState& s) {
    if (s.params.alpha > 0.0)
        throw std::domain_error("mass_closed_form: only alpha <= 0 branches are supported");
}

}  // namespace

double mass_closed_form(const StationaryState& state) {
    require_mass_branch(state);
    const NLSParams& p = state.params;
    const double big_i = profile_mass_constant(p.mu);
    if (p.alpha == 0.0) return mass_prefactor(p.mu, state.omega) * p.n_edges * big_i;
    const int j = state.n_bumps;
    const double c = std::abs(p.alpha) / ((p.n_edges - 2.0 * j) * std::sqrt(state.omega));
    return mass_prefactor(p.mu, state.omega) *
           ((p.n_edges - 2.0 * j) * profile_mass_integral(c, p.mu) + 2.0 * j * big_i);
}

double mass_closed_form_domega(const StationaryState& state) {
    require_mass_branch(state);
    const NLSParams& p = state.params;
    const double w = state.omega;
    const double pw = 1.0 / p.mu - 0.5;
    const double big_i = profile_mass_constant(p.mu);
    if (p.alpha == 0.0)
        return pw * std::pow(p.mu + 1.0, 1.0 / p.mu) / p.mu * std::pow(w, pw - 1.0) * p.n_edges *
               big_i;
    const int j = state.n_bumps;
    const double d = p.n_edges - 2.0 * j;
    const double kappa = std::abs(p.alpha) / d;
    const double c = kappa / std::sqrt(w);
    const double bracket = d * profile_mass_integral(c, p.mu) + 2.0 * j * big_i;
    const double k0 = std::pow(p.mu + 1.0, 1.0 / p.mu) / p.mu;
    // d/domega of K w^pw [ d F(c(w)) + 2j I ], F'(c) = -(1-c^2)^{1/mu-1}, c'(w) = -kappa/(2 w^{3/2})
    return k0 * (pw * std::pow(w, pw - 1.0) * bracket +
                 std::pow(w, pw) * d * std::pow(1.0 - c * c, 1.0 / p.mu - 1.0) * kappa /
                     (2.0 * std::pow(w, 1.5)));
}

double cubic_omega_star(const NLSParams& params, double m) {
    if (m <= 0.0) throw std::domain_error("cubic_omega_star: mass must be positive");
    const double s = m + 2.0 * std::abs(params.alpha);
    return s * s / (4.0 * params.n_edges * params.n_edges);
}

double energy_closed_form_cubic(const NLSParams& params, double m, int j) {
    if (params.mu != 1.0)
        throw std::domain_error("energy_closed_form_cubic: only the cubic case mu = 1");
    if (params.alpha > 0.0)
        throw std::domain_error("energy_closed_form_cubic: only alpha <= 0 branches");
    const double a = std::abs(params.alpha);
    const double n = params.n_edges;
    const double s = m + 2.0 * a;
    double e = -s * s * s / (24.0 * n * n);
    if (a > 0.0) {
        const double d = 2.0 * j - n;
        e += a * a * a / (3.0 * d * d);
    }
    return e;
}

double solve_omega_for_mass(const NLSParams& params, int j, double m) {
    if (m <= 0.0) throw std::domain_error("solve_omega_for_mass: mass must be positive");
    if (params.alpha > 0.0)
        throw std::domain_error("solve_omega_for_mass: only alpha <= 0 branches");
    const double big_i = profile_mass_constant(params.mu);
    if (params.alpha == 0.0) {
        const double pw = 1.0 / params.mu - 0.5;
        const double k = std::pow(params.mu + 1.0, 1.0 / params.mu) / params.mu;
        if (pw == 0.0)
            throw NoSolutionError("solve_omega_for_mass: Kirchhoff mass is omega-independent at mu=2",
                                  k * params.n_edges * big_i);
        return std::pow(m / (k * params.n_edges * big_i), 1.0 / pw);
    }
    auto mass_at = [&](double w) { return mass_closed_form(build_state(params, w, j)); };
    const double thr = branch_threshold(params, j);
    double lo = thr * (1.0 + 1e-12);
    double m_lo = mass_at(lo);
    if (j > 0 && m <= m_lo) {
        // Boundary of the branch (the shift diverges there); accept within roundoff.
        if (m_lo - m <= 1e-9 * std::max(1.0, m)) return lo;
        throw NoSolutionError("solve_omega_for_mass: mass below branch minimum", m_lo);
    }
    double hi = lo;
    double m_hi = m_lo;
    for (int k = 0; k < 60 && m_hi < m; ++k) {
        hi *= 10.0;
        double next = mass_at(hi);
        if (next < m_hi && next < m)
            throw NoSolutionError("solve_omega_for_mass: branch mass never reaches target", m_hi);
        m_hi = next;
    }
    if (m_hi < m)
        throw NoSolutionError("solve_omega_for_mass: branch mass never reaches target", m_hi);
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mass_at(mid) < m)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double critical_mass(const NLSParams& params) {
    if (params.alpha >= 0.0) throw std::domain_error("critical_mass: requires alpha < 0");
    if (params.mu > 2.0) throw std::domain_error("critical_mass: requires 0 < mu <= 2");
    const double mu = params.mu;
    const double m_star = 2.0 * std::pow(mu + 1.0, 1.0 / mu) / mu *
                          std::pow(std::abs(params.alpha) / params.n_edges, (2.0 - mu) / mu) *
                          profile_mass_constant(mu);
    if (mu == 2.0) return std::min(m_star, M_PI * std::sqrt(3.0) * params.n_edges / 4.0);
    return m_star;
}

GraphFunction travelling_wave_even_kirchhoff(const NLSParams& params, double omega, double a,
                                             double v, double theta, double t,
                                             const StarGrid& grid) {
    if (params.n_edges % 2 != 0)
        throw std::invalid_argument("travelling_wave_even_kirchhoff: N must be even");
    if (params.alpha != 0.0)
        throw std::invalid_argument("travelling_wave_even_kirchhoff: requires alpha = 0");
    if (grid.n_edges != params.n_edges)
        throw std::invalid_argument("travelling_wave_even_kirchhoff: grid edge count mismatch");
    GraphFunction f(grid);
    const double at = a + v * t;
    const double tphase = (omega - v * v / 4.0) * t + theta;
    const int half = params.n_edges / 2;
    for (int j = 0; j < params.n_edges; ++j) {
        const double sgn = (j < half) ? -1.0 : 1.0;  // line coordinate u = sgn * x
        for (int i = 0; i < grid.n_points; ++i) {
            const double x = grid.x(i);
            const double prof = half_soliton_profile(omega, params.mu, sgn * at, x);
            f(j, i) = prof * std::exp(Complex(0.0, sgn * v * x / 2.0 + tphase));
        }
    }
    return f;
}

}  // namespace nlsg
