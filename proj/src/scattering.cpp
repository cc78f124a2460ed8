#include "nlsgraph/scattering.hpp"

#include <cmath>
#include <set>

namespace nlsg {

namespace {

// Translating cubic (omega = 1) soliton on the line, center a + ct at time t.
Complex translating_soliton(double a, double c, double x, double t) {
    const double s = 1.0 / std::cosh(x - a - c * t);
    const double phase = 0.5 * c * x + (1.0 - 0.25 * c * c) * t;
    return std::sqrt(2.0) * s * std::exp(Complex(0.0, phase));
}

void validate(const ScatteringSetup& s) {
    if (s.params.mu != 1.0)
        throw std::invalid_argument("scattering: cubic nonlinearity (mu = 1) is essential");
    if (s.v < 0.0) throw std::invalid_argument("scattering: v must be nonnegative");
    if (s.delta_exp <= 0.0 || s.delta_exp >= 1.0)
        throw std::invalid_argument("scattering: delta_exp must lie in (0,1)");
    if (s.x0 < std::pow(s.v, 1.0 - s.delta_exp))
        throw std::invalid_argument("scattering: need x0 >= v^(1-delta)");
    if (s.grid.edge_length <= s.x0 + 20.0)
        throw std::invalid_argument("scattering: need edge_length > x0 + 20");
    if (s.grid.n_edges != s.params.n_edges)
        throw std::invalid_argument("scattering: grid edge count mismatch");
}

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double cutoff_chi(double x) {
    if (x <= 1.0) return 0.0;
    if (x >= 2.0) return 1.0;
    const double a = bump(x - 1.0), b = bump(2.0 - x);
    return a / (a + b);
}

GraphFunction incident_soliton(const ScatteringSetup& setup) {
    validate(setup);
    const StarGrid& g = setup.grid;
    GraphFunction psi(g);
    double kept = 0.0;
    for (int i = 0; i < g.n_points; ++i) {
        const double x = g.x(i);
        const double chi = cutoff_chi(x);
        psi(0, i) = chi * translating_soliton(setup.x0, -setup.v, x, 0.0);
        const double w = (i == 0 || i == g.n_points - 1) ? 0.5 : 1.0;
        kept += w * g.h() * std::norm(psi(0, i));
    }
    const double total = 4.0;  // \int 2 sech^2 over the line
    if (total - kept > 1e-6 * total)
        throw std::invalid_argument("incident_soliton: cutoff removes too much mass (x0 too small)");
    return psi;
}

std::pair<Complex, Complex> linear_coefficients(const VertexCondition& cond, double k, int n) {
    if (k <= 0.0) throw std::invalid_argument("linear_coefficients: need k > 0");
    if (std::holds_alternative<Kirchhoff>(cond))
        return {Complex(-double(n - 2) / n, 0.0), Complex(2.0 / n, 0.0)};
    if (std::holds_alternative<Delta>(cond)) {
        const double alpha = std::get<Delta>(cond).alpha;
        const Complex t = 2.0 * k / Complex(k * n, alpha);
        return {t - 1.0, t};
    }
    if (std::holds_alternative<DeltaPrimeS>(cond)) {
        const double beta = std::get<DeltaPrimeS>(cond).beta;
        const Complex t = 2.0 / Complex(n, -k * beta);
        return {1.0 - double(n - 1) * t, t};
    }
    // GeneralU: outgoing amplitudes s solve [(U-1) - k(U+1)] s = -[(U-1) + k(U+1)] e1.
    const Eigen::MatrixXcd& u = std::get<GeneralU>(cond).matrix;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd a = (u - id) - k * (u + id);
    Eigen::VectorXcd b = -((u - id) + k * (u + id)).col(0);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
    if (!lu.isInvertible())
        throw std::runtime_error("linear_coefficients: singular matching system");
    const Eigen::VectorXcd s = lu.solve(b);
    return {s(0), n > 1 ? s(1) : Complex(0.0)};
}

VertexCondition effective_condition(const ScatteringSetup& setup) {
    if (std::holds_alternative<Delta>(setup.cond))
        return Delta{setup.v * std::get<Delta>(setup.cond).alpha};
    return setup.cond;
}

GraphFunction reference_pre(const ScatteringSetup& setup, double t) {
    GraphFunction f(setup.grid);
    for (int i = 0; i < setup.grid.n_points; ++i)
        f(0, i) = translating_soliton(setup.x0, -setup.v, setup.grid.x(i), t);
    return f;
}

GraphFunction reference_interaction(const ScatteringSetup& setup, double t) {
    const auto [r, tc] =
        linear_coefficients(effective_condition(setup), 0.5 * setup.v, setup.grid.n_edges);
    GraphFunction f(setup.grid);
    for (int i = 0; i < setup.grid.n_points; ++i) {
        const double x = setup.grid.x(i);
        const Complex ghost = translating_soliton(-setup.x0, setup.v, x, t);
        f(0, i) = translating_soliton(setup.x0, -setup.v, x, t) + r * ghost;
        for (int j = 1; j < setup.grid.n_edges; ++j) f(j, i) = tc * ghost;
    }
    return f;
}

OutReference::OutReference(const ScatteringSetup& setup)
    : setup_(setup), line_grid_(2, setup.grid.edge_length, setup.grid.n_points) {
    const auto [r, tc] =
        linear_coefficients(effective_condition(setup), 0.5 * setup.v, setup.grid.n_edges);
    const NLSParams line_params(2, 1.0, 0.0);
    stepper_ = std::make_unique<Stepper>(line_grid_, line_params, Kirchhoff{}, setup.config);
    // Line data of the ghost soliton at t2; edge 0 is the y < 0 half, edge 1 y > 0.
    auto sample_line = [&](Complex amp) {
        GraphFunction f(line_grid_);
        for (int i = 0; i < line_grid_.n_points; ++i) {
            const double x = line_grid_.x(i);
            f(0, i) = amp * translating_soliton(-setup.x0, setup.v, -x, setup.t2());
            f(1, i) = amp * translating_soliton(-setup.x0, setup.v, x, setup.t2());
        }
        return f;
    };
    z_tr_ = reduce(sample_line(tc), stepper_->layout());
    z_ref_ = reduce(sample_line(r), stepper_->layout());
}

void OutReference::advance_to(long step_from_t2) {
    for (; step_ < step_from_t2; ++step_) {
        stepper_->advance(z_tr_);
        stepper_->advance(z_ref_);
    }
}

GraphFunction OutReference::state(const StarGrid& star) const {
    const GraphFunction tr = expand(z_tr_, line_grid_, stepper_->layout());
    const GraphFunction ref = expand(z_ref_, line_grid_, stepper_->layout());
    GraphFunction out(star);
    for (int i = 0; i < star.n_points; ++i) {
        out(0, i) = ref(1, i);
        for (int j = 1; j < star.n_edges; ++j) out(j, i) = tr(1, i);
    }
    return out;
}

double OutReference::line_mass_tr() const { return stepper_->discrete_mass(z_tr_); }

GraphFunction reference_out(const ScatteringSetup& setup, double t) {
    if (t < setup.t2())
        throw std::invalid_argument("reference_out: t precedes the interaction exit time");
    OutReference out(setup);
    out.advance_to(std::lround((t - setup.t2()) / setup.config.dt));
    return out.state(setup.grid);
}

ScatteringReport run_scattering(const ScatteringSetup& setup) {
    if (setup.v <= 0.0) throw std::invalid_argument("run_scattering: v must be positive");
    const GraphFunction psi0 = incident_soliton(setup);
    const VertexCondition cond = effective_condition(setup);
    const double dt = setup.config.dt;
    const long i1 = std::lround(setup.t1() / dt);
    const long i2 = std::lround(setup.t2() / dt);
    const long i3 = std::lround(setup.t3() / dt);
    const long iplus = i2 + std::lround(1.0 / dt);

    ScatteringReport rep;
    rep.t1 = setup.t1();
    rep.t2 = setup.t2();
    rep.t3 = setup.t3();
    std::tie(rep.R, rep.T) = linear_coefficients(cond, 0.5 * setup.v, setup.grid.n_edges);

    Stepper st(setup.grid, setup.params, cond, setup.config);
    Eigen::VectorXcd z = reduce(psi0, st.layout());
    rep.total_mass_initial = st.discrete_mass(z);

    std::set<long> marks = {i1 / 2, i1, (i1 + i2) / 2, i2, iplus, i3};
    const int every = std::max(1, setup.config.record_every);
    std::unique_ptr<OutReference> aux;

    const int n_edges = setup.grid.n_edges;
    const int m_pts = setup.grid.n_points;
    const int tail_start = static_cast<int>(std::floor(0.95 * (m_pts - 1)));

    auto record = [&](long n) {
        const double t = n * dt;
        const double total = st.discrete_mass(z);
        std::vector<double> r(n_edges);
        for (int j = 0; j < n_edges; ++j)
            r[j] = std::sqrt(st.edge_mass_reduced(z, j) / total);
        // Boundary contamination: mass in the last 5% of any edge.
        GraphFunction cur = expand(z, setup.grid, st.layout());
        for (int j = 0; j < n_edges && !rep.boundary_contaminated; ++j) {
            double tail = 0.0;
            for (int i = tail_start; i < m_pts; ++i) {
                const double w = (i == tail_start || i == m_pts - 1) ? 0.5 : 1.0;
                tail += w * setup.grid.h() * std::norm(cur(j, i));
            }
            if (tail > 1e-8 * total) rep.boundary_contaminated = true;
        }
        double dpre = std::nan(""), ds = std::nan(""), dout = std::nan("");
        if (n <= i1) {
            dpre = lp_norm(cur - reference_pre(setup, t), 2.0);
        } else if (n <= i2) {
            ds = lp_norm(cur - reference_interaction(setup, t), 2.0);
        } else if (setup.compute_out_reference) {
            if (!aux) aux = std::make_unique<OutReference>(setup);
            aux->advance_to(n - i2);
            dout = lp_norm(cur - aux->state(setup.grid), 2.0);
        }
        rep.times.push_back(t);
        rep.ratios.push_back(std::move(r));
        rep.dist_pre.push_back(dpre);
        rep.dist_S.push_back(ds);
        rep.dist_out.push_back(dout);
    };

    record(0);
    for (long n = 1; n <= i3; ++n) {
        st.advance(z);
        if (n % every == 0 || n == i3 || marks.count(n)) {
            if (!z.allFinite() || st.discrete_h1(z) > setup.config.blowup_threshold) {
                rep.blew_up = true;
                break;
            }
            record(n);
        }
    }
    rep.total_mass_final = st.discrete_mass(z);
    rep.r_final = rep.ratios.back();
    return rep;
}

}  // namespace nlsg
