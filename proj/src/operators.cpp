#include "nlsgraph/operators.hpp"

#include <cmath>
#include <random>

namespace nlsg {

template <class Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> StarMatrixT<Scalar>::apply(
    const Eigen::Vector<Scalar, Eigen::Dynamic>& x) const {
    const int m = lay.interior();
    Eigen::Vector<Scalar, Eigen::Dynamic> y(lay.dim());
    y.head(lay.n_vertex) = vertex_block * x.head(lay.n_vertex);
    for (int j = 0; j < lay.n_edges; ++j) {
        const int base = lay.interior_index(j, 1);
        const int vk = lay.vertex_index(j);
        y(vk) += vertex_coupling(j) * x(base);
        for (int i = 0; i < m; ++i) {
            const int k = base + i;
            Scalar acc = interior_diag(k - lay.n_vertex) * x(k);
            if (i > 0) acc += interior_offdiag * x(k - 1);
            if (i < m - 1) acc += interior_offdiag * x(k + 1);
            if (i == 0) acc += vertex_coupling(j) * x(vk);
            y(k) = acc;
        }
    }
    return y;
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> StarMatrixT<Scalar>::dense() const {
    const int n = lay.dim();
    const int m = lay.interior();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    a.topLeftCorner(lay.n_vertex, lay.n_vertex) = vertex_block;
    for (int j = 0; j < lay.n_edges; ++j) {
        const int vk = lay.vertex_index(j);
        const int base = lay.interior_index(j, 1);
        a(vk, base) = vertex_coupling(j);
        a(base, vk) = vertex_coupling(j);
        for (int i = 0; i < m; ++i) {
            const int k = base + i;
            a(k, k) = interior_diag(k - lay.n_vertex);
            if (i < m - 1) {
                a(k, k + 1) = interior_offdiag;
                a(k + 1, k) = interior_offdiag;
            }
        }
    }
    return a;
}

template struct StarMatrixT<double>;
template struct StarMatrixT<Complex>;

ReducedLayout make_layout(const StarGrid& grid, const VertexCondition& cond) {
    int k;
    if (is_delta_type(cond))
        k = 1;
    else if (std::holds_alternative<DeltaPrimeS>(cond))
        k = grid.n_edges;
    else
        throw std::invalid_argument("make_layout: GeneralU has no symmetric reduced form here");
    return ReducedLayout{grid.n_edges, grid.n_points, grid.h(), k};
}

StarMatrix quadratic_form_matrix(const StarGrid& grid, const VertexCondition& cond) {
    const ReducedLayout lay = make_layout(grid, cond);
    const double h = lay.h;
    const int n = grid.n_edges;
    StarMatrix a;
    a.lay = lay;
    a.interior_diag = Eigen::VectorXd::Constant(n * lay.interior(), 2.0 / h);
    a.interior_offdiag = -1.0 / h;
    a.vertex_coupling = Eigen::VectorXd::Constant(n, -1.0 / h);
    if (is_delta_type(cond)) {
        a.vertex_block = Eigen::MatrixXd::Constant(1, 1, n / h + delta_strength(cond));
    } else {
        const double beta = std::get<DeltaPrimeS>(cond).beta;
        if (beta == 0.0)
            throw std::invalid_argument("quadratic_form_matrix: delta'_s needs beta != 0");
        a.vertex_block =
            Eigen::MatrixXd::Constant(n, n, -1.0 / beta) +
            (1.0 / h + double(n) / beta) * Eigen::MatrixXd::Identity(n, n);
    }
    return a;
}

Eigen::VectorXd mass_weights(const ReducedLayout& lay) {
    Eigen::VectorXd b = Eigen::VectorXd::Constant(lay.dim(), lay.h);
    if (lay.n_vertex == 1)
        b(0) = lay.n_edges * lay.h / 2.0;
    else
        b.head(lay.n_vertex).setConstant(lay.h / 2.0);
    return b;
}

StarMatrix standard_form(const StarMatrix& a, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& pot) {
    const ReducedLayout& lay = a.lay;
    const bool has_pot = pot.size() > 0;
    StarMatrix c;
    c.lay = lay;
    c.interior_offdiag = a.interior_offdiag / lay.h;
    c.interior_diag.resize(a.interior_diag.size());
    for (int k = 0; k < a.interior_diag.size(); ++k) {
        const int full = lay.n_vertex + k;
        c.interior_diag(k) = a.interior_diag(k) / b(full) + (has_pot ? pot(full) : 0.0);
    }
    c.vertex_block.resize(lay.n_vertex, lay.n_vertex);
    for (int i = 0; i < lay.n_vertex; ++i)
        for (int j = 0; j < lay.n_vertex; ++j)
            c.vertex_block(i, j) = a.vertex_block(i, j) / std::sqrt(b(i) * b(j)) +
                                   (i == j && has_pot ? pot(i) : 0.0);
    c.vertex_coupling.resize(lay.n_edges);
    for (int j = 0; j < lay.n_edges; ++j)
        c.vertex_coupling(j) = a.vertex_coupling(j) / std::sqrt(b(lay.vertex_index(j)) * lay.h);
    return c;
}

int count_below(const StarMatrix& a, const Eigen::VectorXd& b, const Eigen::VectorXd& pot,
                double shift) {
    const ReducedLayout& lay = a.lay;
    const int m = lay.interior();
    const bool has_pot = pot.size() > 0;
    const double e = a.interior_offdiag;
    const double pivmin = 1e-30;
    int count = 0;
    // Haynsworth: eliminate each interior chain from the far end, leaving a
    // K x K Schur complement on the vertex block.
    Eigen::MatrixXd schur = a.vertex_block;
    for (int i = 0; i < lay.n_vertex; ++i)
        schur(i, i) += (has_pot ? b(i) * pot(i) : 0.0) - shift * b(i);
    for (int j = 0; j < lay.n_edges; ++j) {
        double dprev = 0.0;
        for (int i = m; i >= 1; --i) {
            const int full = lay.interior_index(j, i);
            double d = a.interior_diag(full - lay.n_vertex) +
                       (has_pot ? b(full) * pot(full) : 0.0) - shift * b(full);
            if (i < m) d -= e * e / dprev;
            if (std::abs(d) < pivmin) d = -pivmin;
            if (d < 0.0) ++count;
            dprev = d;
        }
        const int vk = lay.vertex_index(j);
        schur(vk, vk) -= a.vertex_coupling(j) * a.vertex_coupling(j) / dprev;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(schur, Eigen::EigenvaluesOnly);
    for (int i = 0; i < lay.n_vertex; ++i)
        if (es.eigenvalues()(i) < 0.0) ++count;
    return count;
}

template <class Scalar>
StarSolver<Scalar>::StarSolver(const StarMatrixT<Scalar>& m)
    : lay_(m.lay), off_(m.interior_offdiag), coupling_(m.vertex_coupling) {
    const int mi = lay_.interior();
    lu_diag_.resize(lay_.n_edges * mi);
    q_.resize(lay_.n_edges);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> schur = m.vertex_block;
    for (int j = 0; j < lay_.n_edges; ++j) {
        // LU of the edge tridiagonal, top-down
        for (int i = 0; i < mi; ++i) {
            Scalar d = m.interior_diag(j * mi + i);
            if (i > 0) d -= off_ * off_ / lu_diag_(j * mi + i - 1);
            lu_diag_(j * mi + i) = d;
        }
        // q_j = T_j^{-1} e_1
        Eigen::Vector<Scalar, Eigen::Dynamic> q =
            Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(mi);
        q(0) = Scalar(1);
        for (int i = 1; i < mi; ++i) q(i) = -(off_ / lu_diag_(j * mi + i - 1)) * q(i - 1);
        q(mi - 1) /= lu_diag_(j * mi + mi - 1);
        for (int i = mi - 2; i >= 0; --i)
            q(i) = (q(i) - off_ * q(i + 1)) / lu_diag_(j * mi + i);
        q_[j] = q;
        const int vk = lay_.vertex_index(j);
        schur(vk, vk) -= coupling_(j) * coupling_(j) * q(0);
    }
    schur_.compute(schur);
}

template <class Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> StarSolver<Scalar>::solve(
    const Eigen::Vector<Scalar, Eigen::Dynamic>& rhs) const {
    const int mi = lay_.interior();
    Eigen::Vector<Scalar, Eigen::Dynamic> y(lay_.dim());
    Eigen::Vector<Scalar, Eigen::Dynamic> rv = rhs.head(lay_.n_vertex);
    for (int j = 0; j < lay_.n_edges; ++j) {
        const int base = lay_.interior_index(j, 1);
        // forward/backward substitution for y0 = T_j^{-1} rhs_j
        y(base) = rhs(base);
        for (int i = 1; i < mi; ++i)
            y(base + i) = rhs(base + i) - (off_ / lu_diag_(j * mi + i - 1)) * y(base + i - 1);
        y(base + mi - 1) /= lu_diag_(j * mi + mi - 1);
        for (int i = mi - 2; i >= 0; --i)
            y(base + i) = (y(base + i) - off_ * y(base + i + 1)) / lu_diag_(j * mi + i);
        rv(lay_.vertex_index(j)) -= coupling_(j) * y(base);
    }
    Eigen::Vector<Scalar, Eigen::Dynamic> c = schur_.solve(rv);
    y.head(lay_.n_vertex) = c;
    for (int j = 0; j < lay_.n_edges; ++j) {
        const int base = lay_.interior_index(j, 1);
        const Scalar cv = c(lay_.vertex_index(j)) * coupling_(j);
        for (int i = 0; i < mi; ++i) y(base + i) -= cv * q_[j](i);
    }
    return y;
}

template class StarSolver<double>;
template class StarSolver<Complex>;

namespace {

double gershgorin_lower(const StarMatrix& c) {
    const ReducedLayout& lay = c.lay;
    const int m = lay.interior();
    double lo = std::numeric_limits<double>::infinity();
    Eigen::VectorXd vrow = Eigen::VectorXd::Zero(lay.n_vertex);
    for (int i = 0; i < lay.n_vertex; ++i) {
        double r = 0.0;
        for (int j = 0; j < lay.n_vertex; ++j)
            if (i != j) r += std::abs(c.vertex_block(i, j));
        vrow(i) = r;
    }
    for (int j = 0; j < lay.n_edges; ++j) vrow(lay.vertex_index(j)) += std::abs(c.vertex_coupling(j));
    for (int i = 0; i < lay.n_vertex; ++i) lo = std::min(lo, c.vertex_block(i, i) - vrow(i));
    for (int j = 0; j < lay.n_edges; ++j) {
        for (int i = 0; i < m; ++i) {
            double r = std::abs(c.interior_offdiag) * ((i > 0 && i < m - 1) ? 2.0 : 1.0);
            if (i == 0) r += std::abs(c.interior_offdiag) + std::abs(c.vertex_coupling(j));
            if (i == m - 1 && m > 1) r += 0.0;
            lo = std::min(lo, c.interior_diag(j * m + i) - r);
        }
    }
    return lo;
}

}  // namespace

std::vector<EigenPair> lowest_eigs_lanczos(const StarMatrix& c, int k, double tol, int max_iter) {
    const int n = c.lay.dim();
    if (k > n) throw std::invalid_argument("lowest_eigs_lanczos: k exceeds dimension");
    // Locate lambda_min by inertia bisection: a shift just below the bottom of
    // the spectrum keeps the shift-invert separation sharp (the raw Gershgorin
    // bound is O(1/h^2) too low and ruins convergence).
    const double g = gershgorin_lower(c);
    const Eigen::VectorXd unit_b = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd no_pot;
    auto below = [&](double s) { return count_below(c, unit_b, no_pot, s); };
    double lo = g - 1.0, hi = g + 1.0, span = 2.0;
    while (below(hi) == 0) {
        lo = hi;
        hi += span;
        span *= 2.0;
    }
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    while (hi - lo > 1e-6 * scale) {
        const double mid = 0.5 * (lo + hi);
        if (below(mid) == 0)
            lo = mid;
        else
            hi = mid;
    }
    const double sigma = lo - std::max(1e-6 * scale, hi - lo);
    StarMatrix shifted = c;
    shifted.interior_diag.array() -= sigma;
    shifted.vertex_block.diagonal().array() -= sigma;
    StarSolver<double> op(shifted);

    std::mt19937 rng(12345);
    std::normal_distribution<double> dist;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = dist(rng);
    v.normalize();

    const int cap = std::min(max_iter, n);
    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alpha, beta;
    basis.push_back(v);
    for (int it = 0; it < cap; ++it) {
        Eigen::VectorXd w = op.solve(basis[it]);
        const double a = basis[it].dot(w);
        alpha.push_back(a);
        w -= a * basis[it];
        if (it > 0) w -= beta[it - 1] * basis[it - 1];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) w -= u.dot(w) * u;
        const double b = w.norm();

        const int jdim = int(alpha.size());
        const bool breakdown = b < 1e-14;
        if (jdim >= std::max(2 * k, 8) || breakdown || it == cap - 1) {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(jdim, jdim);
            for (int i = 0; i < jdim; ++i) {
                t(i, i) = alpha[i];
                if (i + 1 < jdim) t(i, i + 1) = t(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            // largest theta of the shift-inverted operator <-> smallest lambda
            std::vector<EigenPair> out;
            bool all_ok = jdim >= k;
            for (int i = 0; all_ok && i < k; ++i) {
                const int idx = jdim - 1 - i;
                const double theta = es.eigenvalues()(idx);
                if (theta <= 0.0) {
                    all_ok = false;
                    break;
                }
                Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
                for (int q = 0; q < jdim; ++q) x += es.eigenvectors()(q, idx) * basis[q];
                x.normalize();
                const double lambda = sigma + 1.0 / theta;
                const double res = (c.apply(x) - lambda * x).norm();
                if (res > tol) {
                    all_ok = false;
                    break;
                }
                out.push_back({lambda, x});
            }
            if (all_ok) return out;
            if (breakdown && jdim >= k) {
                // invariant subspace reached; Ritz values are exact
                std::vector<EigenPair> exact;
                for (int i = 0; i < k; ++i) {
                    const int idx = jdim - 1 - i;
                    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
                    for (int q = 0; q < jdim; ++q) x += es.eigenvectors()(q, idx) * basis[q];
                    x.normalize();
                    exact.push_back({sigma + 1.0 / es.eigenvalues()(idx), x});
                }
                return exact;
            }
            if (breakdown)
                throw SolverError("lanczos: breakdown before k pairs converged", it + 1);
        }
        if (b < 1e-14) throw SolverError("lanczos: breakdown", it + 1);
        beta.push_back(b);
        basis.push_back(w / b);
    }
    throw SolverError("lanczos: no convergence within iteration cap", cap);
}

std::vector<EigenPair> lowest_eigs_dense(const StarMatrix& c, int k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.dense());
    std::vector<EigenPair> out;
    for (int i = 0; i < k; ++i) out.push_back({es.eigenvalues()(i), es.eigenvectors().col(i)});
    return out;
}

Eigen::VectorXcd reduce(const GraphFunction& f, const ReducedLayout& lay) {
    Eigen::VectorXcd z(lay.dim());
    if (lay.n_vertex == 1) {
        Complex v = 0.0;
        for (int j = 0; j < lay.n_edges; ++j) v += f(j, 0);
        z(0) = v / double(lay.n_edges);
    } else {
        for (int j = 0; j < lay.n_edges; ++j) z(j) = f(j, 0);
    }
    for (int j = 0; j < lay.n_edges; ++j)
        for (int i = 1; i <= lay.interior(); ++i) z(lay.interior_index(j, i)) = f(j, i);
    return z;
}

GraphFunction expand(const Eigen::VectorXcd& z, const StarGrid& grid, const ReducedLayout& lay) {
    GraphFunction f(grid);
    for (int j = 0; j < lay.n_edges; ++j) {
        f(j, 0) = z(lay.vertex_index(j));
        for (int i = 1; i <= lay.interior(); ++i) f(j, i) = z(lay.interior_index(j, i));
        f(j, grid.n_points - 1) = 0.0;
    }
    return f;
}

Eigen::VectorXd reduce_real(const GraphFunction& f, const ReducedLayout& lay) {
    return reduce(f, lay).real();
}

}  // namespace nlsg
