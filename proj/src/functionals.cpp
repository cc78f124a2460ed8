#include "nlsgraph/functionals.hpp"

#include <cmath>
#include <iostream>

namespace nlsg {

double mass(const GraphFunction& f) {
    const double n = lp_norm(f, 2.0);
    return n * n;
}

namespace {

Complex vertex_value(const GraphFunction& f) {
    Complex v0 = f(0, 0);
    double mismatch = 0.0;
    Complex mean = 0.0;
    for (int j = 0; j < f.grid.n_edges; ++j) {
        mismatch = std::max(mismatch, std::abs(f(j, 0) - v0));
        mean += f(j, 0);
    }
    if (mismatch > 1e-6) {
        std::cerr << "nlsgraph: warning: vertex values differ across edges by " << mismatch
                  << "; using their mean\n";
        return mean / double(f.grid.n_edges);
    }
    return v0;
}

}  // namespace

double energy(const GraphFunction& f, const NLSParams& params) {
    const double kin = h1_seminorm(f);
    const double p = 2.0 * params.mu + 2.0;
    const double nl = std::pow(lp_norm(f, p), p);
    const double v = std::norm(vertex_value(f));
    return 0.5 * kin * kin - nl / p + 0.5 * params.alpha * v;
}

double action(const GraphFunction& f, double omega, const NLSParams& params) {
    return energy(f, params) + 0.5 * omega * mass(f);
}

double nehari(const GraphFunction& f, double omega, const NLSParams& params) {
    const double kin = h1_seminorm(f);
    const double p = 2.0 * params.mu + 2.0;
    const double nl = std::pow(lp_norm(f, p), p);
    const double v = std::norm(vertex_value(f));
    return kin * kin - nl + omega * mass(f) + params.alpha * v;
}

StationaryResidual stationary_residual(const GraphFunction& f, double omega,
                                       const NLSParams& params) {
    const double h = f.grid.h();
    double acc = 0.0;
    for (int j = 0; j < f.grid.n_edges; ++j) {
        for (int i = 1; i < f.grid.n_points - 1; ++i) {
            const Complex lap = (f(j, i - 1) - 2.0 * f(j, i) + f(j, i + 1)) / (h * h);
            const Complex r =
                -lap + omega * f(j, i) - std::pow(std::abs(f(j, i)), 2.0 * params.mu) * f(j, i);
            acc += h * std::norm(r);
        }
    }
    return {std::sqrt(acc), vertex_residual(f, Delta{params.alpha})};
}

GraphFunction runaway_state(const NLSParams& params, double omega, double s, const StarGrid& grid) {
    if (grid.n_edges != params.n_edges)
        throw std::invalid_argument("runaway_state: grid edge count mismatch");
    GraphFunction f(grid);
    for (int j = 0; j < grid.n_edges; ++j) {
        const double a = (j == 0) ? s : -s;  // escaping soliton on edge 0, matched tails elsewhere
        for (int i = 0; i < grid.n_points; ++i)
            f(j, i) = half_soliton_profile(omega, params.mu, a, grid.x(i));
    }
    return f;
}

}  // namespace nlsg
