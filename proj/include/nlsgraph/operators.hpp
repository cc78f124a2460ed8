#pragma once

#include <vector>

#include "nlsgraph/star_grid.hpp"

namespace nlsg {

/// Reduced unknown layout for symmetric vertex-coupled discretizations:
/// K vertex unknowns first (one shared value for delta-type conditions, one per
/// edge for delta'_s), then the interior samples i = 1..M-2 of each edge.
/// The outer boundary x = L is homogeneous Dirichlet and carries no unknown.
struct ReducedLayout {
    int n_edges;
    int n_points;
    double h;
    int n_vertex;  // K

    int interior() const { return n_points - 2; }
    int dim() const { return n_vertex + n_edges * interior(); }
    int vertex_index(int edge) const { return n_vertex == 1 ? 0 : edge; }
    int interior_index(int edge, int i) const {  // i in 1..M-2
        return n_vertex + edge * interior() + (i - 1);
    }
};

/// Symmetric matrix with star structure: per-edge tridiagonal interior blocks
/// (constant off-diagonal), a dense K x K vertex block, and one coupling entry
/// between each edge's vertex unknown and its first interior sample.
template <class Scalar>
struct StarMatrixT {
    ReducedLayout lay;
    Eigen::Vector<Scalar, Eigen::Dynamic> interior_diag;  // size N * (M-2)
    Scalar interior_offdiag;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vertex_block;  // K x K
    Eigen::Vector<Scalar, Eigen::Dynamic> vertex_coupling;               // per edge

    Eigen::Vector<Scalar, Eigen::Dynamic> apply(
        const Eigen::Vector<Scalar, Eigen::Dynamic>& x) const;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const;
};

using StarMatrix = StarMatrixT<double>;
using StarMatrixC = StarMatrixT<Complex>;

ReducedLayout make_layout(const StarGrid& grid, const VertexCondition& cond);

/// Hessian A of the discrete quadratic form Q_h[psi] = 1/2 psi* A psi, i.e.
/// the trapezoid-consistent symmetric discretization of -d^2/dx^2 plus the
/// vertex term (alpha |psi(0)|^2 for delta; the splitting penalty for delta'_s).
StarMatrix quadratic_form_matrix(const StarGrid& grid, const VertexCondition& cond);

/// Diagonal trapezoid mass weights B matching the layout.
Eigen::VectorXd mass_weights(const ReducedLayout& lay);

/// Standard symmetric form C = B^{-1/2} (A + B diag(pot)) B^{-1/2}; pot holds
/// nodewise potential values in the reduced layout (may be empty for zero).
StarMatrix standard_form(const StarMatrix& a, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& pot);

/// Number of eigenvalues of the pencil (A + B diag(pot)) x = lambda B x below
/// `shift`, equivalently eigenvalues of the standard form below `shift`.
/// Computed exactly (up to roundoff) by Haynsworth inertia on the star structure.
int count_below(const StarMatrix& a, const Eigen::VectorXd& b, const Eigen::VectorXd& pot,
                double shift);

/// Prefactored direct solver: per-edge tridiagonal LU plus a Schur complement
/// on the vertex block. O(N M) per solve.
template <class Scalar>
class StarSolver {
  public:
    explicit StarSolver(const StarMatrixT<Scalar>& m);
    Eigen::Vector<Scalar, Eigen::Dynamic> solve(
        const Eigen::Vector<Scalar, Eigen::Dynamic>& rhs) const;

  private:
    ReducedLayout lay_;
    Scalar off_;
    Eigen::Vector<Scalar, Eigen::Dynamic> lu_diag_;   // modified pivots per interior node
    std::vector<Eigen::Vector<Scalar, Eigen::Dynamic>> q_;  // T_j^{-1} e_1 per edge
    Eigen::Vector<Scalar, Eigen::Dynamic> coupling_;
    Eigen::PartialPivLU<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> schur_;
};

struct SolverError : std::runtime_error {
    int iterations;
    SolverError(const std::string& what, int iters) : std::runtime_error(what), iterations(iters) {}
};

struct EigenPair {
    double value;
    Eigen::VectorXd vector;
};

/// k algebraically smallest eigenpairs of a symmetric star matrix by
/// shift-invert Lanczos with full reorthogonalization (shift below the
/// spectrum via Gershgorin); residuals ||Cv - lambda v|| <= tol.
std::vector<EigenPair> lowest_eigs_lanczos(const StarMatrix& c, int k, double tol = 1e-8,
                                           int max_iter = 600);

/// Same spectrum by dense diagonalization (reference backend).
std::vector<EigenPair> lowest_eigs_dense(const StarMatrix& c, int k);

/// GraphFunction <-> reduced vector maps. For a shared vertex unknown the
/// vertex value is averaged across edges; expansion writes it back to every
/// edge and zeroes the Dirichlet sample.
Eigen::VectorXcd reduce(const GraphFunction& f, const ReducedLayout& lay);
GraphFunction expand(const Eigen::VectorXcd& z, const StarGrid& grid, const ReducedLayout& lay);
Eigen::VectorXd reduce_real(const GraphFunction& f, const ReducedLayout& lay);

}  // namespace nlsg
