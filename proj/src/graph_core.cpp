#include "nlsgraph/graph_core.hpp"

#include <cmath>

namespace nlsg {

bool validate_unitary(const Eigen::MatrixXcd& u) {
    if (u.rows() != u.cols()) throw std::invalid_argument("validate_unitary: matrix not square");
    Eigen::MatrixXcd r = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return r.cwiseAbs().maxCoeff() <= 1e-12;
}

GeneralU make_general_u(const Eigen::MatrixXcd& u) {
    if (!validate_unitary(u)) throw std::invalid_argument("GeneralU: matrix is not unitary to 1e-12");
    return GeneralU{u};
}

bool same_condition(const VertexCondition& a, const VertexCondition& b) {
    if (is_delta_type(a) && is_delta_type(b)) return delta_strength(a) == delta_strength(b);
    if (std::holds_alternative<DeltaPrimeS>(a) && std::holds_alternative<DeltaPrimeS>(b))
        return std::get<DeltaPrimeS>(a).beta == std::get<DeltaPrimeS>(b).beta;
    if (std::holds_alternative<GeneralU>(a) && std::holds_alternative<GeneralU>(b))
        return (std::get<GeneralU>(a).matrix - std::get<GeneralU>(b).matrix).cwiseAbs().maxCoeff() == 0.0;
    return false;
}

double lp_norm(const GraphFunction& f, double p) {
    if (p < 1.0) throw std::domain_error("lp_norm: p must be >= 1");
    const double h = f.grid.h();
    double acc = 0.0;
    for (int j = 0; j < f.grid.n_edges; ++j) {
        double s = 0.0;
        for (int i = 0; i < f.grid.n_points; ++i) {
            double w = (i == 0 || i == f.grid.n_points - 1) ? 0.5 : 1.0;
            s += w * std::pow(std::abs(f(j, i)), p);
        }
        acc += h * s;
    }
    return std::pow(acc, 1.0 / p);
}

double edge_mass(const GraphFunction& f, int edge) {
    const double h = f.grid.h();
    double s = 0.0;
    for (int i = 0; i < f.grid.n_points; ++i) {
        double w = (i == 0 || i == f.grid.n_points - 1) ? 0.5 : 1.0;
        s += w * std::norm(f(edge, i));
    }
    return h * s;
}

GraphFunction derivative(const GraphFunction& f) {
    const int m = f.grid.n_points;
    const double h = f.grid.h();
    GraphFunction d(f.grid);
    for (int j = 0; j < f.grid.n_edges; ++j) {
        d(j, 0) = (-3.0 * f(j, 0) + 4.0 * f(j, 1) - f(j, 2)) / (2.0 * h);
        for (int i = 1; i < m - 1; ++i) d(j, i) = (f(j, i + 1) - f(j, i - 1)) / (2.0 * h);
        d(j, m - 1) = (3.0 * f(j, m - 1) - 4.0 * f(j, m - 2) + f(j, m - 3)) / (2.0 * h);
    }
    return d;
}

double h1_seminorm(const GraphFunction& f) { return lp_norm(derivative(f), 2.0); }

Complex inner_product(const GraphFunction& f, const GraphFunction& g) {
    f.require_same_grid(g);
    const double h = f.grid.h();
    Complex acc = 0.0;
    for (int j = 0; j < f.grid.n_edges; ++j) {
        Complex s = 0.0;
        for (int i = 0; i < f.grid.n_points; ++i) {
            double w = (i == 0 || i == f.grid.n_points - 1) ? 0.5 : 1.0;
            s += w * std::conj(f(j, i)) * g(j, i);
        }
        acc += h * s;
    }
    return acc;
}

Complex vertex_derivative(const GraphFunction& f, int edge) {
    const double h = f.grid.h();
    return (-3.0 * f(edge, 0) + 4.0 * f(edge, 1) - f(edge, 2)) / (2.0 * h);
}

namespace {

double delta_residual(const GraphFunction& f, double alpha) {
    const int n = f.grid.n_edges;
    double r = 0.0;
    for (int j = 1; j < n; ++j) r = std::max(r, std::abs(f(j, 0) - f(0, 0)));
    Complex flux = 0.0;
    for (int j = 0; j < n; ++j) flux += vertex_derivative(f, j);
    r = std::max(r, std::abs(flux - alpha * f(0, 0)));
    return r;
}

double delta_prime_residual(const GraphFunction& f, double beta) {
    const int n = f.grid.n_edges;
    std::vector<Complex> d(n);
    Complex flux = 0.0;
    for (int j = 0; j < n; ++j) {
        d[j] = vertex_derivative(f, j);
        flux += d[j];
    }
    double r = std::abs(flux);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            r = std::max(r, std::abs(f(j, 0) - f(k, 0) - (beta / n) * (d[j] - d[k])));
    return r;
}

double general_u_residual(const GraphFunction& f, const Eigen::MatrixXcd& u) {
    const int n = f.grid.n_edges;
    Eigen::VectorXcd vals(n), ders(n);
    for (int j = 0; j < n; ++j) {
        vals(j) = f(j, 0);
        ders(j) = vertex_derivative(f, j);
    }
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    Eigen::VectorXcd res = (u - id) * vals + Complex(0, 1) * (u + id) * ders;
    return res.cwiseAbs().maxCoeff();
}

}  // namespace

double vertex_residual(const GraphFunction& f, const VertexCondition& cond) {
    if (std::holds_alternative<Delta>(cond)) return delta_residual(f, std::get<Delta>(cond).alpha);
    if (std::holds_alternative<Kirchhoff>(cond)) return delta_residual(f, 0.0);
    if (std::holds_alternative<DeltaPrimeS>(cond))
        return delta_prime_residual(f, std::get<DeltaPrimeS>(cond).beta);
    return general_u_residual(f, std::get<GeneralU>(cond).matrix);
}

}  // namespace nlsg
