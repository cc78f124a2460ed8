#pragma once

#include <memory>

#include "nlsgraph/operators.hpp"
#include "nlsgraph/standing_waves.hpp"

namespace nlsg {

enum class Scheme { CrankNicolsonFixedPoint, StrangSplit };

struct EvolutionConfig {
    double dt;
    double t_end;
    Scheme scheme = Scheme::CrankNicolsonFixedPoint;
    double fixedpoint_tol = 1e-12;
    int fixedpoint_max_iter = 50;
    int record_every = 1;
    double blowup_threshold = 1e6;  // on the discrete H1 norm
    int snapshot_stride = 0;        // keep every k-th recorded state (0 = final only)
};

struct Observables {
    double t;
    double total_mass;
    double energy;
    double vertex_abs;
    double h1_norm;
    std::vector<double> edge_mass;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Observables> observables;
    std::vector<std::pair<double, GraphFunction>> snapshots;
    GraphFunction final_state;
    bool blew_up = false;
    double blowup_time = 0.0;
    double blowup_h1 = 0.0;

    explicit Trajectory(const StarGrid& g) : final_state(g) {}
};

/// Time stepper for i dPsi/dt = H Psi - |Psi|^{2mu} Psi on the reduced layout,
/// with a prefactored Crank-Nicolson linear solve shared by both schemes.
class Stepper {
  public:
    Stepper(const StarGrid& grid, const NLSParams& params, const VertexCondition& cond,
            const EvolutionConfig& config);

    void advance(Eigen::VectorXcd& z) const;

    const ReducedLayout& layout() const { return layout_; }
    double discrete_mass(const Eigen::VectorXcd& z) const;  // z^* B z
    double discrete_energy(const Eigen::VectorXcd& z) const;
    double discrete_h1(const Eigen::VectorXcd& z) const;
    double edge_mass_reduced(const Eigen::VectorXcd& z, int edge) const;

  private:
    void crank_nicolson_step(Eigen::VectorXcd& z) const;
    void strang_step(Eigen::VectorXcd& z) const;
    Eigen::VectorXcd apply_rhs_half(const Eigen::VectorXcd& z) const;  // (iB/dt + A/2) z

    StarGrid grid_;
    NLSParams params_;
    EvolutionConfig config_;
    ReducedLayout layout_;
    StarMatrix form_;          // A
    Eigen::VectorXd weights_;  // B
    StarMatrixC system_;       // iB/dt - A/2
    std::unique_ptr<StarSolver<Complex>> solver_;
};

/// One step of the configured scheme on a sampled state.
GraphFunction step(const GraphFunction& psi, const NLSParams& params, const VertexCondition& cond,
                   const EvolutionConfig& config);

/// Integrates to t_end (or until blow-up), recording conserved-quantity
/// observables every record_every steps.
Trajectory evolve(const GraphFunction& psi0, const NLSParams& params, const VertexCondition& cond,
                  const EvolutionConfig& config);

enum class OrbitNorm { L2, Energy };

/// d(Psi, orbit of Phi) = inf_theta ||Psi - e^{i theta} Phi||; exact phase
/// minimization for L2, golden-section search for the energy norm.
double orbit_distance(const GraphFunction& psi, const GraphFunction& phi, OrbitNorm norm);
double orbit_distance(const GraphFunction& psi, const StationaryState& state, OrbitNorm norm);

/// Discrete energy norm sqrt(||f'||^2 + ||f||^2).
double energy_norm(const GraphFunction& f);

/// Sum of smooth bumps vanishing at the vertex (stays in the energy domain),
/// normalized to unit energy norm; deterministic in the seed.
GraphFunction random_energy_perturbation(const StarGrid& grid, unsigned seed, int n_bumps = 5);

struct ProbeReport {
    double perturbation_size;
    double max_distance;
    double growth_ratio;  // max_distance / perturbation_size
    bool blew_up;
    std::vector<std::pair<double, double>> distance_trace;
};

/// Evolves Phi + delta * (random energy-domain perturbation) and tracks the
/// orbit distance in the energy norm.
ProbeReport orbital_stability_probe(const NLSParams& params, double omega,
                                    double perturbation_size, const StarGrid& grid,
                                    const EvolutionConfig& config, unsigned seed);

}  // namespace nlsg
