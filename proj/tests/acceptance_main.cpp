// Acceptance gate: ten go/no-go criteria, one PASS/FAIL line each.
// Tolerances are pinned here; diagnostics go to stderr.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "nlsgraph/functionals.hpp"
#include "nlsgraph/scattering.hpp"
#include "nlsgraph/stability.hpp"

using namespace nlsg;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr int kNs[] = {2, 3, 4, 5};
constexpr double kAlphas[] = {-2.0, -1.0, -0.5};
constexpr double kMus[] = {0.5, 1.0, 2.0};

// Composite Simpson of |f|^2 edge by edge (needs an odd point count).
double simpson_mass(const GraphFunction& f) {
    const double h = f.grid.h();
    double acc = 0.0;
    for (int j = 0; j < f.grid.n_edges; ++j) {
        double s = std::norm(f(j, 0)) + std::norm(f(j, f.grid.n_points - 1));
        for (int i = 1; i < f.grid.n_points - 1; ++i)
            s += std::norm(f(j, i)) * ((i % 2) ? 4.0 : 2.0);
        acc += s * h / 3.0;
    }
    return acc;
}

// ---------------------------------------------------------------------- 1
// Closed-form catalog: every admissible branch state passes the interior and
// vertex residual checks at h = 5e-3 on 10-point omega sweeps above threshold.
bool criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const double h = 5e-3;
    const double tol = 10.0 * h * h;
    double worst_int = 0.0, worst_vtx = 0.0;
    for (int n : kNs)
        for (double alpha : kAlphas)
            for (double mu : kMus) {
                NLSParams params(n, mu, alpha);
                for (int j : admissible_bump_counts(params)) {
                    const double thr = branch_threshold(params, j);
                    for (int i = 0; i < 10; ++i) {
                        const double omega = thr + 0.03 * (i + 1);
                        const int m = static_cast<int>(30.0 / std::sqrt(omega) / h) + 1;
                        StarGrid g(n, (m - 1) * h, m);
                        const GraphFunction f = sample(build_state(params, omega, j), g);
                        const StationaryResidual res = stationary_residual(f, omega, params);
                        // The interior residual is an absolute L2 quantity; measure
                        // it relative to the state's own equation scale.
                        const double scale = (1.0 + omega) * lp_norm(f, 2.0);
                        worst_int = std::max(worst_int, res.interior / scale);
                        worst_vtx = std::max(worst_vtx, res.vertex);
                    }
                }
            }
    const double el = seconds_since(t0);
    std::fprintf(stderr, "[1] interior %.3e, vertex %.3e (tol %.3e), %.0f s\n", worst_int,
                 worst_vtx, tol, el);
    return worst_int < tol && worst_vtx < tol && el < 60.0;
}

// ---------------------------------------------------------------------- 2
// Closed-form mass vs quadrature of the sampled states, 1e-8 relative at
// h = 1e-3 with L = 40/sqrt(omega), fixing the I(mu) constant.
bool criterion2() {
    const double h = 1e-3;
    const double tol = 1e-8;
    double worst = 0.0;
    for (int n : kNs)
        for (double alpha : kAlphas)
            for (double mu : kMus) {
                NLSParams params(n, mu, alpha);
                for (int j : admissible_bump_counts(params)) {
                    const double thr = branch_threshold(params, j);
                    for (int i = 0; i < 10; ++i) {
                        const double omega = thr + 0.03 * (i + 1);
                        int m = static_cast<int>(40.0 / std::sqrt(omega) / h);
                        if (m % 2) ++m;
                        StarGrid g(n, m * h, m + 1);
                        const StationaryState st = build_state(params, omega, j);
                        const double mc = mass_closed_form(st);
                        const double mq = simpson_mass(sample(st, g));
                        worst = std::max(worst, std::abs(mq - mc) / mc);
                    }
                }
            }
    std::fprintf(stderr, "[2] worst relative mass error %.3e (tol %.0e)\n", worst, tol);
    return worst < tol;
}

// ---------------------------------------------------------------------- 3
// Cubic identities: omega*(m) inverts the mass solve; the closed-form energy
// matches quadrature at O(h^2); the ground-state energy formula holds.
bool criterion3() {
    bool ok = true;
    double worst_inv = 0.0;
    for (int n : kNs)
        for (double alpha : kAlphas) {
            NLSParams params(n, 1.0, alpha);
            for (double m : {1.0, 2.0, 4.0}) {
                const double ws = cubic_omega_star(params, m);
                for (int j : admissible_bump_counts(params)) {
                    // Branch j only reaches masses above its threshold value.
                    const double m_min = 2.0 * std::abs(alpha) * 2.0 * j / (n - 2.0 * j);
                    if (m <= m_min + 1e-9) continue;
                    const double w = solve_omega_for_mass(params, j, m);
                    worst_inv = std::max(worst_inv, std::abs(w - ws) / ws);
                }
            }
        }
    ok = ok && worst_inv < 1e-10;

    NLSParams p3(3, 1.0, -1.0);
    double worst_formula = 0.0, worst_ratio = 1e300, worst_err = 0.0;
    for (double m : {1.0, 2.0, 4.0}) {
        // Expanded ground-state energy at mass m vs the j = 0 closed form.
        const double direct = -m * (m * m + 6.0 * m + 12.0) / (24.0 * 9.0);
        const double ecf = energy_closed_form_cubic(p3, m, 0);
        worst_formula = std::max(worst_formula, std::abs(ecf - direct) / std::abs(direct));
        const double omega = solve_omega_for_mass(p3, 0, m);
        auto err = [&](int pts) {
            StarGrid g(3, 30.0, pts);
            return std::abs(energy(sample(build_state(p3, omega, 0), g), p3) - ecf);
        };
        const double e1 = err(3001), e2 = err(6001);
        worst_ratio = std::min(worst_ratio, e1 / e2);
        worst_err = std::max(worst_err, e2);
    }
    std::fprintf(stderr, "[3] inversion %.3e, formula %.3e, h-ratio %.2f, energy err %.3e\n",
                 worst_inv, worst_formula, worst_ratio, worst_err);
    return ok && worst_formula < 1e-12 && worst_ratio > 3.0 && worst_err < 1e-4;
}

// ---------------------------------------------------------------------- 4
// Energy ordering in j at fixed mass below the critical mass, and the cubic
// critical-mass identity m* = 4|alpha|/N.
bool criterion4() {
    double worst_id = 0.0;
    bool ordered = true;
    for (int n : {3, 4, 5})
        for (double alpha : kAlphas) {
            NLSParams params(n, 1.0, alpha);
            const double mstar = critical_mass(params);
            worst_id = std::max(worst_id,
                                std::abs(mstar - 4.0 * std::abs(alpha) / n) / mstar);
            for (double m : {0.5 * mstar, mstar}) {
                double prev = -1e300;
                for (int j : admissible_bump_counts(params)) {
                    const double e = energy_closed_form_cubic(params, m, j);
                    ordered = ordered && e > prev;
                    prev = e;
                }
            }
        }
    std::fprintf(stderr, "[4] m* identity %.3e, ordering %d\n", worst_id, int(ordered));
    return worst_id < 1e-12 && ordered;
}

// ---------------------------------------------------------------------- 5
// Stability suite at M = 2000 per edge: Morse index 1 with a simple discrete
// L2 kernel for ground states, VK signs, stable VK bracket, JL symmetry.
bool criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    bool spectra_ok = true, vk_ok = true;
    double worst_l0 = 0.0, worst_gap = 1e300;
    for (int n : kNs)
        for (double alpha : kAlphas)
            for (double mu : kMus) {
                NLSParams params(n, mu, alpha);
                const double thr = branch_threshold(params, 0);
                for (int i = 0; i < 10; ++i) {
                    const double omega = 1.2 * thr + 0.15 * (i + 1);
                    StarGrid g(n, 30.0 / std::sqrt(omega), 2000);
                    const double tol = 10.0 * g.h() * g.h();
                    const StationaryState st = build_state(params, omega, 0);
                    const MorseIndexResult mi = morse_index(st, g);
                    spectra_ok = spectra_ok && mi.index == 1 && mi.near_zero == 0;
                    auto ev = eig_low(assemble_L2(st, g), 2, EigBackend::Lanczos);
                    worst_l0 = std::max(worst_l0, std::abs(ev[0].value) / tol);
                    worst_gap = std::min(worst_gap, ev[1].value / tol);
                    spectra_ok = spectra_ok && std::abs(ev[0].value) < tol && ev[1].value > tol;
                    vk_ok = vk_ok && vk_derivative(params, 0, omega) > 0.0;
                }
            }

    // Supercritical: the VK root bracket is stable under tolerance halving.
    NLSParams sup(3, 3.0, -1.0);
    auto [l1, h1] = bracket_vk_root(sup, 0, branch_threshold(sup, 0) * 1.5, 100.0, 1e-8);
    auto [l2, h2] = bracket_vk_root(sup, 0, branch_threshold(sup, 0) * 1.5, 100.0, 5e-9);
    const double drift = std::abs(0.5 * (l1 + h1) - 0.5 * (l2 + h2));
    const bool sign_change =
        vk_derivative(sup, 0, l1) * vk_derivative(sup, 0, h1 + 1e-6) <= 0.0;

    // JL spectra are quadruple-symmetric (lambda, -lambda, conj pairs).
    double worst_sym = 0.0;
    for (double mu : {1.0, 3.0}) {
        NLSParams params(3, mu, -1.0);
        StarGrid g(3, 16.0, 161);
        const Eigen::VectorXcd ev = jl_spectrum(assemble_JL(build_state(params, 1.5, 0), g));
        auto closest = [&](Complex t) {
            double b = 1e300;
            for (int i = 0; i < ev.size(); ++i) b = std::min(b, std::abs(ev(i) - t));
            return b;
        };
        for (int i = 0; i < ev.size(); ++i) {
            worst_sym = std::max(worst_sym, closest(-ev(i)));
            worst_sym = std::max(worst_sym, closest(std::conj(ev(i))));
        }
    }
    const double el = seconds_since(t0);
    std::fprintf(stderr,
                 "[5] |lam0|/tol %.2f, lam1/tol %.2f, bracket drift %.2e, JL sym %.2e, %.0f s\n",
                 worst_l0, worst_gap, drift, worst_sym, el);
    return spectra_ok && vk_ok && sign_change && drift < 1e-4 && worst_sym < 1e-8 &&
           el < 600.0;
}

// ---------------------------------------------------------------------- 6
// Conservation: mass drift < 1e-10 and energy drift < 1e-8 relative over
// t_end = 10 (dt = 1e-3, h = 1e-2) for all three vertex families, with the
// energy drift shrinking ~4x under dt halving.
bool criterion6() {
    StarGrid g(3, 20.0, 2001);
    NLSParams pd(3, 1.0, -1.0), pk(3, 1.0, 0.0);
    const GraphFunction phid = sample(build_state(pd, 2.0, 0), g);
    const GraphFunction phik = sample(kirchhoff_state(pk, 2.0, 0.0), g);

    auto drifts = [&](const GraphFunction& psi0, const NLSParams& p, const VertexCondition& c,
                      double dt) {
        EvolutionConfig cfg{dt, 10.0};
        cfg.record_every = 100;
        const Trajectory tr = evolve(psi0, p, c, cfg);
        const double m0 = tr.observables.front().total_mass;
        const double e0 = tr.observables.front().energy;
        double dm = 0.0, de = 0.0;
        for (const Observables& o : tr.observables) {
            dm = std::max(dm, std::abs(o.total_mass - m0) / m0);
            de = std::max(de, std::abs(o.energy - e0) / std::abs(e0));
        }
        return std::pair<double, double>{dm, de};
    };

    bool ok = true;
    double e_full = 0.0;
    const struct {
        const GraphFunction& psi0;
        const NLSParams& p;
        VertexCondition c;
    } cases[] = {{phid, pd, Delta{-1.0}}, {phik, pk, Kirchhoff{}}, {phik, pk, DeltaPrimeS{0.5}}};
    for (const auto& cs : cases) {
        auto [dm, de] = drifts(cs.psi0, cs.p, cs.c, 1e-3);
        std::fprintf(stderr, "[6] mass drift %.2e, energy drift %.2e\n", dm, de);
        ok = ok && dm < 1e-10 && de < 1e-8;
        e_full = std::max(e_full, de);
    }
    auto [dm_h, de_h] = drifts(phid, pd, Delta{-1.0}, 5e-4);
    const double ratio = e_full / de_h;
    std::fprintf(stderr, "[6] halved-dt energy drift %.2e, ratio %.2f\n", de_h, ratio);
    // Near machine precision the ratio is noise; accept either a clean O(dt^2)
    // ratio or both drifts at the conservation floor.
    ok = ok && dm_h < 1e-10 &&
         ((ratio > 2.0 && ratio < 8.0) || (e_full < 1e-12 && de_h < 1e-12));
    return ok;
}

// ---------------------------------------------------------------------- 7
// Travelling-wave oracle on the N = 4 Kirchhoff star at v = 2.
bool criterion7() {
    NLSParams p(4, 1.0, 0.0);
    const double omega = 1.0, a = -6.0, v = 2.0, theta = 0.3, t_end = 1.0;
    const double dt = 5e-3;
    StarGrid g(4, 20.0, 2001);
    GraphFunction psi0 = travelling_wave_even_kirchhoff(p, omega, a, v, theta, 0.0, g);
    EvolutionConfig cfg{dt, t_end};
    cfg.record_every = 1 << 30;
    const Trajectory tr = evolve(psi0, p, Kirchhoff{}, cfg);
    const GraphFunction exact = travelling_wave_even_kirchhoff(p, omega, a, v, theta, t_end, g);
    const double err = lp_norm(tr.final_state - exact, 2.0);
    const double h = g.h();
    const double bound = 5.0 * (h * h + dt * dt) * lp_norm(exact, 2.0);
    std::fprintf(stderr, "[7] L2 error %.3e vs bound %.3e\n", err, bound);
    return !tr.blew_up && err < bound;
}

// ---------------------------------------------------------------------- 8
// Orbital stability probe: bounded orbit distance in the stable cubic case,
// >= 10x growth (or blow-up) for the supercritical unstable state.
bool criterion8() {
    const unsigned seed = 20260824;
    NLSParams stable(3, 1.0, -1.0);
    StarGrid gs(3, 20.0, 1001);
    EvolutionConfig cs{0.01, 20.0};
    cs.record_every = 50;
    const ProbeReport rs = orbital_stability_probe(stable, 2.0, 1e-3, gs, cs, seed);

    NLSParams sup(3, 3.0, -1.0);
    auto [lo, hi] = bracket_vk_root(sup, 0, branch_threshold(sup, 0) * 1.5, 100.0, 1e-8);
    StarGrid gu(3, 28.0, 1401);
    EvolutionConfig cu{5e-3, 20.0};
    cu.record_every = 50;
    const ProbeReport ru = orbital_stability_probe(sup, 4.0 * hi, 1e-4, gu, cu, seed);

    std::fprintf(stderr, "[8] stable max %.3e (<= %.0e), unstable growth %.1f blew_up %d\n",
                 rs.max_distance, 5e-3, ru.growth_ratio, int(ru.blew_up));
    return !rs.blew_up && rs.max_distance <= 5.0 * 1e-3 &&
           (ru.blew_up || ru.growth_ratio >= 10.0);
}

// ---------------------------------------------------------------------- 9
// Fast-soliton scattering: headline run against the linear mass split and a
// velocity sweep with monotone convergence toward it.
bool criterion9() {
    const auto t0 = std::chrono::steady_clock::now();
    auto go = [](double v, double x0, double L, double h, double tlog) {
        const int m = static_cast<int>(L / h) + 1;
        ScatteringSetup s{NLSParams(3, 1.0, 0.0), Kirchhoff{}, v, x0, 0.5, tlog,
                          StarGrid(3, L, m),      {}};
        s.config.dt = h / (2.0 * v);
        s.config.record_every = 1000;
        s.compute_out_reference = false;
        return run_scattering(s);
    };

    const ScatteringReport head = go(20.0, 40.0, 120.0, 0.02, 1.0);
    double sum2 = 0.0;
    for (double r : head.r_final) sum2 += r * r;
    const double targets[] = {1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0};
    bool ok = !head.blew_up && !head.boundary_contaminated;
    for (int j = 0; j < 3; ++j) ok = ok && std::abs(head.r_final[j] - targets[j]) < 0.05;
    ok = ok && std::abs(sum2 - 1.0) < 1e-10;
    ok = ok && std::abs(head.r_final[1] - head.r_final[2]) < 1e-10;
    std::fprintf(stderr, "[9] headline r = (%.4f, %.4f, %.4f), sum2-1 = %.2e\n",
                 head.r_final[0], head.r_final[1], head.r_final[2], sum2 - 1.0);

    // v in {10, 20, 40}: the deviation from the linear split decays in v.
    double prev = 1e300;
    for (double v : {10.0, 20.0, 40.0}) {
        const ScatteringReport rep = go(v, 15.0, 90.0, 0.4 / v, 0.3);
        const double dev = std::abs(rep.r_final[1] - 2.0 / 3.0);
        std::fprintf(stderr, "[9] v=%g: |r2 - 2/3| = %.3e\n", v, dev);
        ok = ok && !rep.blew_up && dev < prev;
        prev = dev;
    }
    const double el = seconds_since(t0);
    std::fprintf(stderr, "[9] elapsed %.0f s\n", el);
    return ok && el < 900.0;
}

// ---------------------------------------------------------------------- 10
// Linear vertex coefficients: unitarity of the mass split for every supported
// condition and the delta plane-wave matching residual.
bool criterion10() {
    double worst_unit = 0.0, worst_match = 0.0;
    for (double k : {0.3, 1.0, 2.5, 7.0, 20.0})
        for (int n : {2, 3, 5}) {
            Eigen::MatrixXcd u = (2.0 / n) * Eigen::MatrixXcd::Ones(n, n) -
                                 Eigen::MatrixXcd::Identity(n, n);
            const std::vector<VertexCondition> conds = {Delta{-1.8}, Delta{0.7}, Kirchhoff{},
                                                        DeltaPrimeS{0.9}, GeneralU{u}};
            for (const VertexCondition& cond : conds) {
                auto [r, t] = linear_coefficients(cond, k, n);
                worst_unit = std::max(
                    worst_unit, std::abs(std::norm(r) + (n - 1) * std::norm(t) - 1.0));
            }
            for (double alpha : {-1.8, 0.7}) {
                auto [r, t] = linear_coefficients(Delta{alpha}, k, n);
                // psi_0 = e^{-ikx} + R e^{ikx}, psi_j = T e^{ikx}: continuity and
                // the flux rule sum psi_j'(0) = alpha psi(0).
                worst_match = std::max(worst_match, std::abs(1.0 + r - t));
                const Complex flux = Complex(0.0, k) * (r - 1.0) +
                                     double(n - 1) * Complex(0.0, k) * t;
                worst_match = std::max(worst_match, std::abs(flux - alpha * t));
            }
        }
    std::fprintf(stderr, "[10] unitarity %.3e, matching %.3e\n", worst_unit, worst_match);
    return worst_unit < 1e-14 && worst_match < 1e-14;
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        bool (*fn)();
    };
    const Entry entries[] = {
        {"closed-form catalog residuals on (N, alpha, mu, omega) sweeps", criterion1},
        {"closed-form mass vs quadrature to 1e-8 relative", criterion2},
        {"cubic identities: omega*(m), energies, ground-state formula", criterion3},
        {"energy ordering in j and critical mass m* = 4|alpha|/N", criterion4},
        {"stability suite: Morse/kernel/VK/JL at M = 2000 per edge", criterion5},
        {"conservation over t = 10 for delta/Kirchhoff/delta'_s vertices", criterion6},
        {"travelling-wave oracle, N = 4 Kirchhoff at v = 2", criterion7},
        {"orbital stability probes: bounded vs >= 10x growth", criterion8},
        {"fast-soliton scattering headline and velocity sweep", criterion9},
        {"linear vertex coefficients: unitarity and matching", criterion10},
    };
    int failures = 0;
    int idx = 0;
    for (const Entry& e : entries) {
        ++idx;
        bool ok = false;
        try {
            ok = e.fn();
        } catch (const std::exception& ex) {
            std::fprintf(stderr, "[%d] exception: %s\n", idx, ex.what());
        }
        std::printf("%s [%d] %s\n", ok ? "PASS" : "FAIL", idx, e.name);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
