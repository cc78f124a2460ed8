#include "nlsgraph/stability.hpp"

#include <cmath>

namespace nlsg {

namespace {

Eigen::VectorXd linearization_potential(const StationaryState& state, const StarGrid& grid,
                                        double coef) {
    // omega - coef * |Phi|^{2mu} at every reduced node
    const ReducedLayout lay{grid.n_edges, grid.n_points, grid.h(), 1};
    Eigen::VectorXd pot(lay.dim());
    const double mu = state.params.mu;
    const double v0 = half_soliton_profile(state.omega, mu, state.edge_center(0), 0.0);
    pot(0) = state.omega - coef * std::pow(v0, 2.0 * mu);
    for (int j = 0; j < grid.n_edges; ++j) {
        const double a = state.edge_center(j);
        for (int i = 1; i <= lay.interior(); ++i) {
            const double p = half_soliton_profile(state.omega, mu, a, grid.x(i));
            pot(lay.interior_index(j, i)) = state.omega - coef * std::pow(p, 2.0 * mu);
        }
    }
    return pot;
}

LinearizedOperator assemble_sym(const StationaryState& state, const StarGrid& grid,
                                OperatorKind kind) {
    if (grid.n_points < 16)
        throw std::invalid_argument("assemble: grid too coarse (need M >= 16)");
    if (grid.n_edges != state.params.n_edges)
        throw std::invalid_argument("assemble: grid edge count mismatch");
    const VertexCondition cond = Delta{state.params.alpha};
    const StarMatrix a = quadratic_form_matrix(grid, cond);
    const Eigen::VectorXd b = mass_weights(a.lay);
    const double coef = (kind == OperatorKind::L1) ? 2.0 * state.params.mu + 1.0 : 1.0;
    const Eigen::VectorXd pot = linearization_potential(state, grid, coef);
    LinearizedOperator op{kind, state, grid, standard_form(a, b, pot), {}};
    return op;
}

}  // namespace

LinearizedOperator assemble_L1(const StationaryState& state, const StarGrid& grid) {
    return assemble_sym(state, grid, OperatorKind::L1);
}

LinearizedOperator assemble_L2(const StationaryState& state, const StarGrid& grid) {
    return assemble_sym(state, grid, OperatorKind::L2);
}

LinearizedOperator assemble_JL(const StationaryState& state, const StarGrid& grid) {
    LinearizedOperator l1 = assemble_L1(state, grid);
    LinearizedOperator l2 = assemble_L2(state, grid);
    const int n = l1.sym.lay.dim();
    Eigen::MatrixXd jl = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    jl.topRightCorner(n, n) = l2.sym.dense();
    jl.bottomLeftCorner(n, n) = -l1.sym.dense();
    return LinearizedOperator{OperatorKind::JL, state, grid, {}, std::move(jl)};
}

std::vector<EigenPair> eig_low(const LinearizedOperator& op, int k, EigBackend backend) {
    if (op.kind == OperatorKind::JL)
        throw std::invalid_argument("eig_low: use jl_spectrum for the JL block");
    if (backend == EigBackend::Dense) return lowest_eigs_dense(op.sym, k);
    return lowest_eigs_lanczos(op.sym, k);
}

Eigen::VectorXcd jl_spectrum(const LinearizedOperator& op) {
    if (op.kind != OperatorKind::JL) throw std::invalid_argument("jl_spectrum: not a JL operator");
    Eigen::EigenSolver<Eigen::MatrixXd> es(op.jl, false);
    Eigen::VectorXcd ev = es.eigenvalues();
    std::vector<int> idx(ev.size());
    for (int i = 0; i < ev.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const double ra = std::abs(ev(a).real()), rb = std::abs(ev(b).real());
        if (ra != rb) return ra < rb;
        return ev(a).real() > ev(b).real();
    });
    Eigen::VectorXcd out(ev.size());
    for (int i = 0; i < ev.size(); ++i) out(i) = ev(idx[i]);
    return out;
}

double jl_max_real_part(const LinearizedOperator& op) {
    Eigen::VectorXcd ev = jl_spectrum(op);
    double m = 0.0;
    for (int i = 0; i < ev.size(); ++i) m = std::max(m, std::abs(ev(i).real()));
    return m;
}

MorseIndexResult morse_index(const StationaryState& state, const StarGrid& grid) {
    const VertexCondition cond = Delta{state.params.alpha};
    const StarMatrix a = quadratic_form_matrix(grid, cond);
    const Eigen::VectorXd b = mass_weights(a.lay);
    const Eigen::VectorXd pot = linearization_potential(state, grid, 2.0 * state.params.mu + 1.0);
    const double tol = 10.0 * grid.h() * grid.h();
    const int below = count_below(a, b, pot, -tol);
    const int upto = count_below(a, b, pot, tol);
    return {below, upto - below};
}

double vk_derivative(const NLSParams& params, int j, double omega) {
    const double thr = branch_threshold(params, j);
    if (omega - thr < 1e-5 * std::max(1.0, omega))
        throw std::domain_error("vk_derivative: omega too close to branch threshold for the step");
    auto mass_at = [&](double w) {
        return params.alpha == 0.0 ? mass_closed_form(kirchhoff_state(params, w, 0.0))
                                   : mass_closed_form(build_state(params, w, j));
    };
    auto central = [&](double step) { return (mass_at(omega + step) - mass_at(omega - step)) / (2.0 * step); };
    const double step = 1e-6 * omega;
    const double d1 = central(step);
    const double d2 = central(step / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

std::pair<double, double> bracket_vk_root(const NLSParams& params, int j, double omega_lo,
                                          double omega_hi, double rel_tol) {
    double lo = omega_lo, hi = omega_hi;
    double slo = vk_derivative(params, j, lo);
    double shi = vk_derivative(params, j, hi);
    if (slo * shi > 0.0)
        throw std::domain_error("bracket_vk_root: no sign change of dM/domega in the interval");
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        const double s = vk_derivative(params, j, mid);
        if (s * slo > 0.0) {
            lo = mid;
            slo = s;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

StabilityReport classify_stability(const NLSParams& params, int j, double omega,
                                   const StarGrid& grid) {
    const StationaryState state =
        params.alpha == 0.0 ? kirchhoff_state(params, omega, 0.0) : build_state(params, omega, j);
    const double h = grid.h();
    // The discrete kernel residual scales with the profile's fourth
    // derivative, roughly (mu^2 omega)^2 h^2.
    const double mu = params.mu;
    const double tol = 10.0 * h * h * std::max(1.0, mu * mu * omega * mu * mu * omega);

    const MorseIndexResult mi = morse_index(state, grid);

    LinearizedOperator l2 = assemble_L2(state, grid);
    const Eigen::VectorXd b = mass_weights(l2.sym.lay);
    Eigen::VectorXd phi = reduce_real(sample(state, grid), l2.sym.lay);
    Eigen::VectorXd x = b.cwiseSqrt().asDiagonal() * phi;
    x.normalize();
    const double kernel_res = l2.sym.apply(x).norm();

    auto pairs = eig_low(l2, 2, EigBackend::Lanczos);
    const double second = pairs[1].value;

    const double vk = vk_derivative(params, j, omega);
    const double m = mass_closed_form(state);

    StabilityReport r;
    r.morse_index = mi.index;
    r.l2_kernel_residual = kernel_res;
    r.l2_second_eigenvalue = second;
    r.vk = vk;
    r.theorem_scope = (j == 0);
    const bool spectra_ok = (mi.index == 1 && mi.near_zero == 0 && kernel_res <= tol &&
                             second > tol);
    if (!r.theorem_scope) r.notes = "outside theorem scope (excited state)";
    if (std::abs(vk) < 1e-8 * m || !spectra_ok) {
        r.verdict = Verdict::Undecided;
        if (!spectra_ok) r.notes += (r.notes.empty() ? "" : "; ") + std::string("spectral counts indeterminate");
    } else {
        r.verdict = vk > 0.0 ? Verdict::Stable : Verdict::Unstable;
    }
    return r;
}

}  // namespace nlsg
