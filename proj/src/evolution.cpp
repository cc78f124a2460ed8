#include "nlsgraph/evolution.hpp"

#include <cmath>
#include <random>

namespace nlsg {

namespace {

constexpr Complex kI{0.0, 1.0};

StarMatrixC to_complex(const StarMatrix& a) {
    StarMatrixC c;
    c.lay = a.lay;
    c.interior_diag = a.interior_diag.cast<Complex>();
    c.interior_offdiag = a.interior_offdiag;
    c.vertex_block = a.vertex_block.cast<Complex>();
    c.vertex_coupling = a.vertex_coupling.cast<Complex>();
    return c;
}

// y = A x for real star-structured A and complex x.
Eigen::VectorXcd apply_real(const StarMatrix& a, const Eigen::VectorXcd& x) {
    const ReducedLayout& lay = a.lay;
    const int m = lay.interior();
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(lay.dim());
    for (int p = 0; p < lay.n_vertex; ++p)
        for (int q = 0; q < lay.n_vertex; ++q) y(p) += a.vertex_block(p, q) * x(q);
    for (int j = 0; j < lay.n_edges; ++j) {
        const int vi = lay.vertex_index(j);
        const int base = lay.interior_index(j, 1);
        y(vi) += a.vertex_coupling(j) * x(base);
        y(base) += a.vertex_coupling(j) * x(vi);
        for (int i = 0; i < m; ++i) {
            const int k = base + i;
            y(k) += a.interior_diag(j * m + i) * x(k);
            if (i + 1 < m) {
                y(k) += a.interior_offdiag * x(k + 1);
                y(k + 1) += a.interior_offdiag * x(k);
            }
        }
    }
    return y;
}

double smoothstep01(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * (3.0 - 2.0 * t);
}

}  // namespace

Stepper::Stepper(const StarGrid& grid, const NLSParams& params, const VertexCondition& cond,
                 const EvolutionConfig& config)
    : grid_(grid),
      params_(params),
      config_(config),
      layout_(make_layout(grid, cond)),
      form_(quadratic_form_matrix(grid, cond)),
      weights_(mass_weights(layout_)) {
    if (config.dt <= 0.0) throw std::invalid_argument("Stepper: dt must be positive");
    if (grid.n_edges != params.n_edges) throw std::invalid_argument("Stepper: edge count mismatch");
    // System matrix i B / dt - A / 2 of the Crank-Nicolson linear half.
    system_ = to_complex(form_);
    const Complex idt = kI / config.dt;
    const int m = layout_.interior();
    system_.interior_diag *= -0.5;
    system_.interior_offdiag *= -0.5;
    system_.vertex_block *= -0.5;
    system_.vertex_coupling *= -0.5;
    for (int p = 0; p < layout_.n_vertex; ++p) system_.vertex_block(p, p) += idt * weights_(p);
    for (int j = 0; j < layout_.n_edges; ++j)
        for (int i = 0; i < m; ++i) {
            const int k = layout_.interior_index(j, i + 1);
            system_.interior_diag(j * m + i) += idt * weights_(k);
        }
    solver_ = std::make_unique<StarSolver<Complex>>(system_);
}

double Stepper::discrete_mass(const Eigen::VectorXcd& z) const {
    double s = 0.0;
    for (int k = 0; k < z.size(); ++k) s += weights_(k) * std::norm(z(k));
    return s;
}

double Stepper::discrete_energy(const Eigen::VectorXcd& z) const {
    const Eigen::VectorXcd az = apply_real(form_, z);
    double e = 0.5 * z.dot(az).real();
    const double p = 2.0 * params_.mu + 2.0;
    for (int k = 0; k < z.size(); ++k) e -= weights_(k) * std::pow(std::abs(z(k)), p) / p;
    return e;
}

double Stepper::discrete_h1(const Eigen::VectorXcd& z) const {
    // Pure difference-quotient seminorm (no vertex potential) plus the mass.
    const int m = layout_.interior();
    const double h = layout_.h;
    double kin = 0.0;
    for (int j = 0; j < layout_.n_edges; ++j) {
        Complex prev = z(layout_.vertex_index(j));
        for (int i = 0; i < m; ++i) {
            const Complex cur = z(layout_.interior_index(j, i + 1));
            kin += std::norm(cur - prev) / h;
            prev = cur;
        }
        kin += std::norm(prev) / h;  // Dirichlet bond to x = L
    }
    return std::sqrt(kin + discrete_mass(z));
}

double Stepper::edge_mass_reduced(const Eigen::VectorXcd& z, int edge) const {
    const int m = layout_.interior();
    double s = 0.5 * std::norm(z(layout_.vertex_index(edge)));
    for (int i = 0; i < m; ++i) s += std::norm(z(layout_.interior_index(edge, i + 1)));
    return layout_.h * s;
}

Eigen::VectorXcd Stepper::apply_rhs_half(const Eigen::VectorXcd& z) const {
    Eigen::VectorXcd r = 0.5 * apply_real(form_, z);
    const Complex idt = kI / config_.dt;
    for (int k = 0; k < z.size(); ++k) r(k) += idt * weights_(k) * z(k);
    return r;
}

void Stepper::crank_nicolson_step(Eigen::VectorXcd& z) const {
    const Eigen::VectorXcd r0 = apply_rhs_half(z);
    Eigen::VectorXcd znew = z;
    for (int it = 0; it < config_.fixedpoint_max_iter; ++it) {
        Eigen::VectorXcd rhs = r0;
        for (int k = 0; k < z.size(); ++k) {
            const Complex mid = 0.5 * (z(k) + znew(k));
            rhs(k) -= weights_(k) * std::pow(std::abs(mid), 2.0 * params_.mu) * mid;
        }
        Eigen::VectorXcd next = solver_->solve(rhs);
        const double delta = (next - znew).norm();
        znew.swap(next);
        if (delta <= config_.fixedpoint_tol * std::max(1.0, znew.norm())) {
            z.swap(znew);
            return;
        }
    }
    throw SolverError("Crank-Nicolson fixed point did not converge",
                      config_.fixedpoint_max_iter);
}

void Stepper::strang_step(Eigen::VectorXcd& z) const {
    auto half_phase = [&](Eigen::VectorXcd& w) {
        for (int k = 0; k < w.size(); ++k)
            w(k) *= std::exp(kI * (0.5 * config_.dt * std::pow(std::abs(w(k)), 2.0 * params_.mu)));
    };
    half_phase(z);
    z = solver_->solve(apply_rhs_half(z));
    half_phase(z);
}

void Stepper::advance(Eigen::VectorXcd& z) const {
    if (config_.scheme == Scheme::CrankNicolsonFixedPoint)
        crank_nicolson_step(z);
    else
        strang_step(z);
}

GraphFunction step(const GraphFunction& psi, const NLSParams& params, const VertexCondition& cond,
                   const EvolutionConfig& config) {
    Stepper st(psi.grid, params, cond, config);
    Eigen::VectorXcd z = reduce(psi, st.layout());
    st.advance(z);
    return expand(z, psi.grid, st.layout());
}

Trajectory evolve(const GraphFunction& psi0, const NLSParams& params, const VertexCondition& cond,
                  const EvolutionConfig& config) {
    Stepper st(psi0.grid, params, cond, config);
    Eigen::VectorXcd z = reduce(psi0, st.layout());
    const long n_steps = std::lround(config.t_end / config.dt);
    const int every = std::max(1, config.record_every);

    Trajectory traj(psi0.grid);
    long n_records = 0;
    auto record = [&](double t) {
        Observables o;
        o.t = t;
        o.total_mass = st.discrete_mass(z);
        o.energy = st.discrete_energy(z);
        o.h1_norm = st.discrete_h1(z);
        double va = 0.0;
        for (int p = 0; p < st.layout().n_vertex; ++p) va = std::max(va, std::abs(z(p)));
        o.vertex_abs = va;
        o.edge_mass.resize(psi0.grid.n_edges);
        for (int j = 0; j < psi0.grid.n_edges; ++j) o.edge_mass[j] = st.edge_mass_reduced(z, j);
        traj.times.push_back(t);
        traj.observables.push_back(std::move(o));
        if (config.snapshot_stride > 0 && n_records % config.snapshot_stride == 0)
            traj.snapshots.emplace_back(t, expand(z, psi0.grid, st.layout()));
        ++n_records;
    };

    record(0.0);
    for (long n = 1; n <= n_steps; ++n) {
        try {
            st.advance(z);
        } catch (const SolverError&) {
            // A diverging fixed point at fixed dt is the discrete signature of
            // H1 blow-up; report it as such instead of aborting.
            traj.blew_up = true;
            traj.blowup_time = n * config.dt;
            traj.blowup_h1 = z.allFinite() ? st.discrete_h1(z) : std::nan("");
            break;
        }
        if (n % every == 0 || n == n_steps) {
            const double t = n * config.dt;
            if (!z.allFinite() || st.discrete_h1(z) > config.blowup_threshold) {
                traj.blew_up = true;
                traj.blowup_time = t;
                traj.blowup_h1 = z.allFinite() ? st.discrete_h1(z) : std::nan("");
                break;
            }
            record(t);
        }
    }
    traj.final_state = expand(z, psi0.grid, st.layout());
    return traj;
}

double energy_norm(const GraphFunction& f) {
    const double s = h1_seminorm(f);
    const double m = lp_norm(f, 2.0);
    return std::sqrt(s * s + m * m);
}

double orbit_distance(const GraphFunction& psi, const GraphFunction& phi, OrbitNorm norm) {
    psi.require_same_grid(phi);
    if (norm == OrbitNorm::L2) {
        const double a = lp_norm(psi, 2.0), b = lp_norm(phi, 2.0);
        const double d2 = a * a + b * b - 2.0 * std::abs(inner_product(phi, psi));
        return std::sqrt(std::max(0.0, d2));
    }
    auto dist = [&](double theta) {
        GraphFunction d = psi - std::exp(kI * theta) * GraphFunction(phi);
        return energy_norm(d);
    };
    // Coarse scan, then golden-section refinement of the best bracket.
    const int n_scan = 24;
    const double two_pi = 2.0 * M_PI;
    double best_theta = 0.0, best = dist(0.0);
    for (int i = 1; i < n_scan; ++i) {
        const double th = two_pi * i / n_scan;
        const double d = dist(th);
        if (d < best) {
            best = d;
            best_theta = th;
        }
    }
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_theta - two_pi / n_scan, hi = best_theta + two_pi / n_scan;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = dist(x1), f2 = dist(x2);
    for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = dist(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = dist(x2);
        }
    }
    return std::min(f1, f2);
}

double orbit_distance(const GraphFunction& psi, const StationaryState& state, OrbitNorm norm) {
    return orbit_distance(psi, sample(state, psi.grid), norm);
}

GraphFunction random_energy_perturbation(const StarGrid& grid, unsigned seed, int n_bumps) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> edge_dist(0, grid.n_edges - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double L = grid.edge_length;
    GraphFunction f(grid);
    for (int b = 0; b < n_bumps; ++b) {
        const int j = edge_dist(rng);
        const double c = L * (0.15 + 0.55 * unit(rng));
        const double w = L * (0.05 + 0.10 * unit(rng));
        const Complex amp{2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0};
        for (int i = 0; i < grid.n_points; ++i) {
            const double x = grid.x(i);
            const double window =
                smoothstep01(x / (0.1 * L)) * smoothstep01((L - x) / (0.1 * L));
            const double g = std::exp(-std::pow((x - c) / w, 2));
            f(j, i) += amp * (window * g);
        }
    }
    const double nrm = energy_norm(f);
    if (nrm == 0.0) throw std::runtime_error("random_energy_perturbation: degenerate draw");
    f *= 1.0 / nrm;
    return f;
}

ProbeReport orbital_stability_probe(const NLSParams& params, double omega,
                                    double perturbation_size, const StarGrid& grid,
                                    const EvolutionConfig& config, unsigned seed) {
    const StationaryState state = params.alpha == 0.0 ? kirchhoff_state(params, omega, 0.0)
                                                      : build_state(params, omega, 0);
    const GraphFunction phi = sample(state, grid);
    GraphFunction psi0 = phi;
    {
        GraphFunction pert = random_energy_perturbation(grid, seed);
        pert *= perturbation_size;
        psi0 += pert;
    }
    const VertexCondition cond = Delta{params.alpha};
    Stepper st(grid, params, cond, config);
    Eigen::VectorXcd z = reduce(psi0, st.layout());
    const long n_steps = std::lround(config.t_end / config.dt);
    const int every = std::max(1, config.record_every);

    ProbeReport rep;
    rep.perturbation_size = perturbation_size;
    rep.blew_up = false;
    auto record = [&](double t) {
        const double d = orbit_distance(expand(z, grid, st.layout()), phi, OrbitNorm::Energy);
        rep.distance_trace.emplace_back(t, d);
        return d;
    };
    double max_d = record(0.0);
    for (long n = 1; n <= n_steps; ++n) {
        try {
            st.advance(z);
        } catch (const SolverError&) {
            rep.blew_up = true;
            break;
        }
        if (n % every == 0 || n == n_steps) {
            if (!z.allFinite() || st.discrete_h1(z) > config.blowup_threshold) {
                rep.blew_up = true;
                break;
            }
            max_d = std::max(max_d, record(n * config.dt));
        }
    }
    rep.max_distance = max_d;
    rep.growth_ratio = max_d / perturbation_size;
    return rep;
}

}  // namespace nlsg
