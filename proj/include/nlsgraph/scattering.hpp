#pragma once

#include "nlsgraph/evolution.hpp"

namespace nlsg {

/// Fast-soliton experiment: a cubic soliton with leftward speed v launched on
/// edge 0 from x0, scattered at the vertex, mass split measured against the
/// linear transmission/reflection coefficients.
struct ScatteringSetup {
    NLSParams params;     // mu must equal 1
    VertexCondition cond; // nominal condition; Delta strength is rescaled alpha -> v alpha
    double v;
    double x0;
    double delta_exp;     // delta in (0,1); t1,2 = x0/v -+ v^{-delta}
    double t_log = 1.0;   // t3 = t2 + t_log * ln v
    StarGrid grid;
    EvolutionConfig config;
    // Skipping the auxiliary line runs (dist_out column) roughly halves a run.
    bool compute_out_reference = true;

    double t1() const { return x0 / v - std::pow(v, -delta_exp); }
    double t2() const { return x0 / v + std::pow(v, -delta_exp); }
    double t3() const { return t2() + t_log * std::log(v); }
};

/// Smooth cutoff: 0 for x <= 1, 1 for x >= 2, C^infinity bridge between.
double cutoff_chi(double x);

/// Psi_0 = (sqrt(2) chi(x) e^{-i v x / 2} sech(x - x0), 0, ..., 0).
GraphFunction incident_soliton(const ScatteringSetup& setup);

/// Plane-wave matching at the vertex: incoming e^{-ikx} on edge 0, outgoing
/// R e^{ikx} on edge 0 and T e^{ikx} elsewhere. Always |R|^2 + (N-1)|T|^2 = 1
/// for the symmetric conditions.
std::pair<Complex, Complex> linear_coefficients(const VertexCondition& cond, double k, int n);

/// Condition actually used in the run (Delta strength scaled by v).
VertexCondition effective_condition(const ScatteringSetup& setup);

/// Phase-1 approximant: the free translating soliton on edge 0.
GraphFunction reference_pre(const ScatteringSetup& setup, double t);

/// Phase-2 approximant: incident + R * ghost on edge 0, T * ghost elsewhere,
/// with (R, T) at the carrier wavenumber k = v/2.
GraphFunction reference_interaction(const ScatteringSetup& setup, double t);

/// Phase-3 approximant Phi^out: the transmitted and reflected ghosts of
/// Phi^S(t2) evolved by line NLS (two auxiliary 2-edge Kirchhoff runs at the
/// main run's resolution), mapped back onto the star.
class OutReference {
  public:
    explicit OutReference(const ScatteringSetup& setup);

    /// Advances the auxiliary evolutions to step t2 + n*dt (monotone only).
    void advance_to(long step_from_t2);
    GraphFunction state(const StarGrid& star) const;
    double line_mass_tr() const;

  private:
    ScatteringSetup setup_;
    StarGrid line_grid_;
    std::unique_ptr<Stepper> stepper_;
    Eigen::VectorXcd z_tr_, z_ref_;
    long step_ = 0;
};

GraphFunction reference_out(const ScatteringSetup& setup, double t);

struct ScatteringReport {
    double t1, t2, t3;
    Complex R, T;
    std::vector<double> times;
    std::vector<std::vector<double>> ratios;  // per record: r_j = ||psi_j|| / ||psi||
    std::vector<double> dist_pre, dist_S, dist_out;  // NaN outside the phase
    std::vector<double> r_final;
    double total_mass_initial = 0.0, total_mass_final = 0.0;
    bool boundary_contaminated = false;
    bool blew_up = false;
};

ScatteringReport run_scattering(const ScatteringSetup& setup);

}  // namespace nlsg
