#pragma once

#include "rbfvar/assembly.hpp"
#include "rbfvar/benchmarks.hpp"
#include "rbfvar/geometry.hpp"
#include "rbfvar/kernels.hpp"
#include "rbfvar/solvers.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <stdexcept>

// Least-squares collocation discretization used by the experiment runner.
//
// The benchmark systems are solved as an overdetermined stack of pointwise
// residual rows (PDE operator at the interior points, weighted Dirichlet rows
// at the boundary points) regularized by a truncated SVD. The stack is the
// square-root factor of the regularized normal matrix, so truncating its
// singular values at sqrt(tau) reproduces the normal-matrix rule
// sigma_k > tau sigma_1 exactly, without ever squaring the system; the
// elliptic path truncates the factor at tau itself, which is the convention
// the c(T, tau) shape rule is calibrated for. The solve runs in extended
// precision: near the truncation cut, double-precision singular values are
// pure round-off and make the results seed-fragile.

namespace rbfvar::collocation {

using Real = long double;
using MatrixXr = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXr = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Quadrature resolutions for the obstacle energy matrix.
inline constexpr long kEnergyQuadPoints1d = 32768;
inline constexpr long kEnergyQuadPointsPerAxis2d = 448;

namespace detail {

// -L u rows: (-Delta phi_i + phi_i for reaction-diffusion) at each point.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
operator_rows(const kernels::Kernel& k, benchmarks::ProblemKind kind,
              const Eigen::MatrixXd& pts, const Eigen::MatrixXd& centers) {
    const int dim = static_cast<int>(pts.cols());
    const bool mass = kind == benchmarks::ProblemKind::reaction_diffusion;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> rows(pts.rows(), centers.rows());
    const Scalar b = static_cast<Scalar>(k.b);
    for (Eigen::Index j = 0; j < pts.rows(); ++j)
        for (Eigen::Index i = 0; i < centers.rows(); ++i) {
            const Scalar r = static_cast<Scalar>((pts.row(j) - centers.row(i)).norm());
            Scalar v = -kernels::detail::laplacian_core<Scalar>(k.kind, b, r, dim);
            if (mass) v += kernels::detail::eval_core<Scalar>(k.kind, b, r);
            rows(j, i) = v;
        }
    return rows;
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
value_rows(const kernels::Kernel& k, const Eigen::MatrixXd& pts, const Eigen::MatrixXd& centers) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> rows(pts.rows(), centers.rows());
    const Scalar b = static_cast<Scalar>(k.b);
    for (Eigen::Index j = 0; j < pts.rows(); ++j)
        for (Eigen::Index i = 0; i < centers.rows(); ++i)
            rows(j, i) = kernels::detail::eval_core<Scalar>(
                k.kind, b, static_cast<Scalar>((pts.row(j) - centers.row(i)).norm()));
    return rows;
}

}  // namespace detail

struct CollocationSolve {
    Eigen::VectorXd weights;
    Eigen::Index rank_kept = 0;
    double sigma1 = 0.0;
    double runtime_ms = 0.0;
};

/// Solves an elliptic benchmark instance by stacked-row TSVD least squares.
inline CollocationSolve solve_elliptic_collocation(const benchmarks::Benchmark& problem,
                                                   const kernels::Kernel& kernel,
                                                   const geometry::CenterSet& centers,
                                                   const geometry::CollocationSet& colloc,
                                                   double beta, double tau) {
    if (problem.kind == benchmarks::ProblemKind::obstacle)
        throw std::invalid_argument("solve_elliptic_collocation: not an elliptic problem");
    const auto t0 = std::chrono::steady_clock::now();

    const Eigen::Index n = centers.count();
    const Eigen::Index mo = colloc.m_omega();
    const Eigen::Index mb = colloc.m_boundary();
    const Real sqrt_n = std::sqrt(static_cast<Real>(n));
    const Real wi = std::sqrt(static_cast<Real>(colloc.measure_omega) / static_cast<Real>(mo));
    const Real wb = std::sqrt(static_cast<Real>(beta) * static_cast<Real>(colloc.measure_boundary) /
                              static_cast<Real>(mb));

    MatrixXr F(mo + mb, n);
    F.topRows(mo) = (wi / sqrt_n) *
                    detail::operator_rows<Real>(kernel, problem.kind, colloc.interior, centers.points);
    F.bottomRows(mb) =
        (wb / sqrt_n) * detail::value_rows<Real>(kernel, colloc.boundary, centers.points);

    VectorXr y(mo + mb);
    for (Eigen::Index j = 0; j < mo; ++j)
        y(j) = wi * static_cast<Real>(problem.source(colloc.interior.row(j)));
    for (Eigen::Index nn = 0; nn < mb; ++nn)
        y(mo + nn) = wb * static_cast<Real>(problem.boundary(colloc.boundary.row(nn)));

    // QR first: the SVD then runs on the square R factor, which shares the
    // stack's singular values at a fraction of the extended-precision cost.
    Eigen::HouseholderQR<MatrixXr> qr(F);
    const VectorXr qty = (qr.householderQ().transpose() * y).head(n);
    const MatrixXr R = qr.matrixQR().topRows(n).template triangularView<Eigen::Upper>();

    Eigen::BDCSVD<MatrixXr> svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXr& s = svd.singularValues();
    const Real cut = static_cast<Real>(tau) * s(0);
    Eigen::Index p = 0;
    while (p < s.size() && s(p) > cut) ++p;

    const VectorXr coeffs = (svd.matrixU().leftCols(p).transpose() * qty).cwiseQuotient(s.head(p));
    const VectorXr w = svd.matrixV().leftCols(p) * coeffs;

    CollocationSolve out;
    out.weights = w.cast<double>();
    out.rank_kept = p;
    out.sigma1 = static_cast<double>(s(0));
    out.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

/// Dirichlet-energy (plus mass, for reaction-diffusion) stiffness matrix
/// integrated on a dense deterministic midpoint grid over the domain.
inline Eigen::MatrixXd energy_matrix_quadrature(const kernels::Kernel& kernel,
                                                benchmarks::ProblemKind kind,
                                                const geometry::CenterSet& centers,
                                                const geometry::Domain& domain) {
    const Eigen::Index n = centers.count();
    const bool mass = kind == benchmarks::ProblemKind::reaction_diffusion;
    Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(n, n);

    if (domain.dim() == 1) {
        const long nq = kEnergyQuadPoints1d;
        const long chunk = 8192;
        const double len = domain.b2 - domain.b1;
        for (long start = 0; start < nq; start += chunk) {
            const long count = std::min(chunk, nq - start);
            Eigen::MatrixXd pts(count, 1);
            for (long q = 0; q < count; ++q)
                pts(q, 0) = domain.b1 + len * (static_cast<double>(start + q) + 0.5) / nq;
            const auto grads = assembly::detail::gradient_matrices(kernel, pts, centers.points);
            a1.noalias() += grads[0].transpose() * grads[0];
            if (mass) {
                const Eigen::MatrixXd phi = assembly::detail::value_matrix(kernel, pts, centers.points);
                a1.noalias() += phi.transpose() * phi;
            }
        }
        return (len / (static_cast<double>(nq) * static_cast<double>(n))) * a1;
    }

    const long nq1 = kEnergyQuadPointsPerAxis2d;
    Eigen::MatrixXd pts(nq1, 2);
    for (long iy = 0; iy < nq1; ++iy) {
        const double yv = (static_cast<double>(iy) + 0.5) / nq1;
        for (long ix = 0; ix < nq1; ++ix) {
            pts(ix, 0) = (static_cast<double>(ix) + 0.5) / nq1;
            pts(ix, 1) = yv;
        }
        const auto grads = assembly::detail::gradient_matrices(kernel, pts, centers.points);
        a1.noalias() += grads[0].transpose() * grads[0] + grads[1].transpose() * grads[1];
        if (mass) {
            const Eigen::MatrixXd phi = assembly::detail::value_matrix(kernel, pts, centers.points);
            a1.noalias() += phi.transpose() * phi;
        }
    }
    return a1 / (static_cast<double>(nq1) * static_cast<double>(nq1) * static_cast<double>(n));
}

/// ADMM obstacle solve with the raw pointwise constraint convention
/// (v_j = psi(x_j) - u_hat(x_j)), a quadrature-integrated energy matrix and a
/// once-per-run factorization of the stacked normal system.
inline solvers::SolveReport solve_obstacle_collocation(const benchmarks::Benchmark& problem,
                                                       const kernels::Kernel& kernel,
                                                       const geometry::CenterSet& centers,
                                                       const geometry::CollocationSet& colloc,
                                                       const solvers::AdmmParams& params) {
    if (problem.kind != benchmarks::ProblemKind::obstacle || !problem.obstacle)
        throw std::invalid_argument("solve_obstacle_collocation: not an obstacle problem");
    const auto t0 = std::chrono::steady_clock::now();

    const Eigen::Index n = centers.count();
    const Eigen::Index mo = colloc.m_omega();
    const Eigen::Index mb = colloc.m_boundary();
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    const Eigen::MatrixXd a1 = energy_matrix_quadrature(kernel, problem.kind, centers, problem.domain);

    // Raw value matrix (A2 w = u_hat at the interior points) and raw psi samples.
    const Eigen::MatrixXd A2 =
        assembly::detail::value_matrix(kernel, colloc.interior, centers.points) / sqrt_n;
    Eigen::VectorXd psi(mo);
    for (Eigen::Index j = 0; j < mo; ++j) psi(j) = (*problem.obstacle)(colloc.interior.row(j));

    const double a3_scale = std::sqrt(colloc.measure_boundary /
                                      (static_cast<double>(mb) * static_cast<double>(n)));
    const Eigen::MatrixXd A3 =
        a3_scale * assembly::detail::value_matrix(kernel, colloc.boundary, centers.points);
    const double gscale = std::sqrt(colloc.measure_boundary / static_cast<double>(mb));
    Eigen::VectorXd g(mb);
    for (Eigen::Index nn = 0; nn < mb; ++nn) g(nn) = gscale * problem.boundary(colloc.boundary.row(nn));

    // Square-root factor of the energy term, then the full stacked factor.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a1);
    const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd F(n + mb + mo, n);
    F.topRows(n) = lam.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
    F.middleRows(n, mb) = std::sqrt(params.beta) * A3;
    F.bottomRows(mo) = std::sqrt(params.rho) * A2;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(F, Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cut = std::sqrt(params.tau) * s(0);  // tau on the normal matrix
    Eigen::Index p = 0;
    while (p < s.size() && s(p) > cut) ++p;
    const Eigen::MatrixXd Vp = svd.matrixV().leftCols(p);
    const Eigen::VectorXd sigma_sq = s.head(p).array().square();

    const Eigen::VectorXd bg = params.beta * (A3.transpose() * g);
    auto apply = [&Vp, &sigma_sq](const Eigen::VectorXd& rhs) {
        return Eigen::VectorXd(Vp * (Vp.transpose() * rhs).cwiseQuotient(sigma_sq));
    };
    solvers::SolveReport report = solvers::admm_iterate(apply, A2, bg, psi, params, p);
    report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace rbfvar::collocation
