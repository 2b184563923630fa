#pragma once

#include "rbfvar/benchmarks.hpp"
#include "rbfvar/geometry.hpp"
#include "rbfvar/kernels.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>

namespace rbfvar::assembly {

using benchmarks::ProblemKind;

struct SystemMeta {
    Eigen::Index n_centers = 0;
    Eigen::Index m_omega = 0;
    Eigen::Index m_boundary = 0;
    double measure_omega = 0.0;
    double measure_boundary = 0.0;
    kernels::Kernel kernel;
    ProblemKind kind = ProblemKind::poisson;
};

/// Dense discrete operators of one problem instance.
struct AssembledSystem {
    Eigen::MatrixXd A1;  // N x N stiffness
    Eigen::MatrixXd A2;  // m_omega x N interior load
    Eigen::MatrixXd A3;  // m_boundary x N boundary
    Eigen::VectorXd f;   // source samples, unscaled
    Eigen::VectorXd g;   // boundary data, scaled by sqrt(|dOmega|/m_boundary)
    std::optional<Eigen::VectorXd> psi;  // obstacle samples, scaled by |Omega|/m_omega
    SystemMeta meta;
};

namespace detail {

// Kernel-value matrix Phi(X, C): rows follow the points, columns the centers.
inline Eigen::MatrixXd value_matrix(const kernels::Kernel& k, const Eigen::MatrixXd& pts,
                                    const Eigen::MatrixXd& centers) {
    Eigen::MatrixXd out(pts.rows(), centers.rows());
    for (Eigen::Index j = 0; j < pts.rows(); ++j)
        for (Eigen::Index i = 0; i < centers.rows(); ++i)
            out(j, i) = kernels::detail::eval_core<double>(k.kind, k.b,
                                                           (pts.row(j) - centers.row(i)).norm());
    return out;
}

// Per-axis gradient matrices: grads[a](j,i) = d phi_i / d x_a at point j.
inline std::vector<Eigen::MatrixXd> gradient_matrices(const kernels::Kernel& k,
                                                      const Eigen::MatrixXd& pts,
                                                      const Eigen::MatrixXd& centers) {
    const int d = static_cast<int>(pts.cols());
    std::vector<Eigen::MatrixXd> grads(d, Eigen::MatrixXd(pts.rows(), centers.rows()));
    for (Eigen::Index j = 0; j < pts.rows(); ++j)
        for (Eigen::Index i = 0; i < centers.rows(); ++i) {
            const Eigen::RowVectorXd diff = pts.row(j) - centers.row(i);
            const double r = diff.norm();
            const double slope =
                r == 0.0 ? 0.0 : kernels::detail::dphi_over_r_core<double>(k.kind, k.b, r);
            for (int a = 0; a < d; ++a) grads[a](j, i) = slope * diff(a);
        }
    return grads;
}

inline void check_dims(const geometry::CenterSet& centers, const geometry::CollocationSet& colloc) {
    if (centers.count() < 1) throw std::invalid_argument("assembly: empty center set");
    if (centers.dim() != colloc.interior.cols())
        throw std::invalid_argument("assembly: center/collocation dimension mismatch");
}

}  // namespace detail

/// Stiffness matrix: (|Omega|/(m_omega N)) sum_j grad phi_i(x_j)^T grad phi_l(x_j),
/// plus the mass term phi_i(x_j) phi_l(x_j) inside the sum for reaction-diffusion.
/// Obstacle problems use the Poisson form.
inline Eigen::MatrixXd assemble_a1(ProblemKind kind, const kernels::Kernel& kernel,
                                   const geometry::CenterSet& centers,
                                   const geometry::CollocationSet& colloc) {
    detail::check_dims(centers, colloc);
    const double scale =
        colloc.measure_omega / (static_cast<double>(colloc.m_omega()) * static_cast<double>(centers.count()));
    const auto grads = detail::gradient_matrices(kernel, colloc.interior, centers.points);
    Eigen::MatrixXd a1 = grads[0].transpose() * grads[0];
    for (std::size_t a = 1; a < grads.size(); ++a) a1.noalias() += grads[a].transpose() * grads[a];
    if (kind == ProblemKind::reaction_diffusion) {
        const Eigen::MatrixXd phi = detail::value_matrix(kernel, colloc.interior, centers.points);
        a1.noalias() += phi.transpose() * phi;
    }
    return scale * a1;
}

/// Interior load matrix: (A2)_{j,i} = |Omega|/(m_omega sqrt(N)) phi(||x_j - c_i||).
inline Eigen::MatrixXd assemble_a2(const kernels::Kernel& kernel,
                                   const geometry::CenterSet& centers,
                                   const geometry::CollocationSet& colloc) {
    detail::check_dims(centers, colloc);
    const double scale = colloc.measure_omega /
                         (static_cast<double>(colloc.m_omega()) * std::sqrt(static_cast<double>(centers.count())));
    return scale * detail::value_matrix(kernel, colloc.interior, centers.points);
}

/// Boundary matrix: (A3)_{n,i} = sqrt(|dOmega|/(m_boundary N)) phi(||x_n - c_i||).
inline Eigen::MatrixXd assemble_a3(const kernels::Kernel& kernel,
                                   const geometry::CenterSet& centers,
                                   const geometry::CollocationSet& colloc) {
    detail::check_dims(centers, colloc);
    const double scale = std::sqrt(colloc.measure_boundary /
                                   (static_cast<double>(colloc.m_boundary()) * static_cast<double>(centers.count())));
    return scale * detail::value_matrix(kernel, colloc.boundary, centers.points);
}

/// Data vectors: f unscaled, g scaled by sqrt(|dOmega|/m_boundary), psi (when
/// the problem has an obstacle) scaled by |Omega|/m_omega.
inline void assemble_data(const benchmarks::Benchmark& problem,
                          const geometry::CollocationSet& colloc, Eigen::VectorXd& f,
                          Eigen::VectorXd& g, std::optional<Eigen::VectorXd>& psi) {
    const Eigen::Index mo = colloc.m_omega();
    const Eigen::Index mb = colloc.m_boundary();
    f.resize(mo);
    for (Eigen::Index j = 0; j < mo; ++j) f(j) = problem.source(colloc.interior.row(j));
    const double gscale = std::sqrt(colloc.measure_boundary / static_cast<double>(mb));
    g.resize(mb);
    for (Eigen::Index n = 0; n < mb; ++n) g(n) = gscale * problem.boundary(colloc.boundary.row(n));
    if (problem.kind == ProblemKind::obstacle) {
        if (!problem.obstacle)
            throw std::invalid_argument("assemble_data: obstacle problem without psi");
        Eigen::VectorXd p(mo);
        const double pscale = colloc.measure_omega / static_cast<double>(mo);
        for (Eigen::Index j = 0; j < mo; ++j) p(j) = pscale * (*problem.obstacle)(colloc.interior.row(j));
        psi = std::move(p);
    } else {
        psi.reset();
    }
}

/// Assemble the full system for one problem instance.
inline AssembledSystem assemble_system(const benchmarks::Benchmark& problem,
                                       const kernels::Kernel& kernel,
                                       const geometry::CenterSet& centers,
                                       const geometry::CollocationSet& colloc) {
    AssembledSystem sys;
    sys.A1 = assemble_a1(problem.kind, kernel, centers, colloc);
    sys.A2 = assemble_a2(kernel, centers, colloc);
    sys.A3 = assemble_a3(kernel, centers, colloc);
    assemble_data(problem, colloc, sys.f, sys.g, sys.psi);
    sys.meta = SystemMeta{centers.count(), colloc.m_omega(), colloc.m_boundary(),
                          colloc.measure_omega, colloc.measure_boundary, kernel, problem.kind};
    return sys;
}

/// u_hat(x) = (1/sqrt(N)) sum_i w_i phi(||x - c_i||) at each point.
inline Eigen::VectorXd evaluate_uhat(const kernels::Kernel& kernel,
                                     const geometry::CenterSet& centers,
                                     const Eigen::VectorXd& w, const Eigen::MatrixXd& points) {
    if (w.size() != centers.count())
        throw std::invalid_argument("evaluate_uhat: weight length mismatch");
    return detail::value_matrix(kernel, points, centers.points) * w /
           std::sqrt(static_cast<double>(centers.count()));
}

/// Discrete functional value at w for the given problem kind.
inline double objective(ProblemKind kind, const AssembledSystem& sys, double beta, double mu,
                        const Eigen::VectorXd& w) {
    if (w.size() != sys.A1.rows()) throw std::invalid_argument("objective: weight length mismatch");
    const double quad = 0.5 * w.dot(sys.A1 * w);
    const double bdry = 0.5 * beta * (sys.A3 * w - sys.g).squaredNorm();
    if (kind == ProblemKind::obstacle) {
        if (!sys.psi) throw std::invalid_argument("objective: obstacle system without psi");
        const Eigen::VectorXd gap = (*sys.psi - sys.A2 * w).cwiseMax(0.0);
        return quad + mu * gap.lpNorm<1>() + bdry;
    }
    return quad - sys.f.dot(sys.A2 * w) + bdry;
}

}  // namespace rbfvar::assembly
