#pragma once

#include "rbfvar/assembly.hpp"
#include "rbfvar/tsvd.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rbfvar::solvers {

struct EllipticParams {
    double beta = 3e5;
    double tau = 1e-15;
};

struct AdmmParams {
    double mu = 0.0;
    double beta = 0.0;
    double rho = 0.0;
    double tau = 1e-15;
    long max_iter = 50000;
    double eps_primal = 1e-6;
    double eps_dual = 1e-6;
};

struct AdmmState {
    Eigen::VectorXd w;
    Eigen::VectorXd v;
    Eigen::VectorXd z;
    long iter = 0;
    double r_norm = 0.0;
    double s_norm = 0.0;
};

struct ResidualSample {
    long iter = 0;
    double r_rel = 0.0;
    double s_rel = 0.0;
};

struct SolveReport {
    Eigen::VectorXd weights;
    long iterations = 0;
    bool converged = false;
    Eigen::Index rank_kept = 0;
    std::vector<ResidualSample> residual_history;
    double runtime_ms = 0.0;
};

namespace detail {

inline double safe_ratio(double num, double den) {
    if (den > 0.0) return num / den;
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

// History is dense for the first 1000 iterations, then every 10th.
inline bool record_iteration(long iter) { return iter <= 1000 || iter % 10 == 0; }

}  // namespace detail

/// Componentwise proximal map of the positive-part l1 penalty:
/// t if t < 0; 0 on [0, mu/rho]; t - mu/rho beyond.
inline Eigen::VectorXd admm_v_update(const Eigen::VectorXd& t, double mu, double rho) {
    if (!(mu > 0.0 && rho > 0.0)) throw std::invalid_argument("admm_v_update: mu, rho must be positive");
    const double shift = mu / rho;
    Eigen::VectorXd v(t.size());
    for (Eigen::Index j = 0; j < t.size(); ++j) {
        const double tj = t(j);
        v(j) = tj < 0.0 ? tj : (tj <= shift ? 0.0 : tj - shift);
    }
    return v;
}

/// Relative primal/dual residuals of one ADMM iterate.
inline std::pair<double, double> admm_relative_residuals(const Eigen::MatrixXd& A2,
                                                         const Eigen::VectorXd& psi,
                                                         const Eigen::VectorXd& w,
                                                         const Eigen::VectorXd& v,
                                                         const Eigen::VectorXd& z,
                                                         const Eigen::VectorXd& v_prev,
                                                         double rho) {
    const Eigen::VectorXd a2w = A2 * w;
    const Eigen::VectorXd r = v - psi + a2w;
    const Eigen::VectorXd s = rho * (A2.transpose() * (v - v_prev));
    const double den_r = std::max({a2w.norm(), v.norm(), psi.norm()});
    const double den_s = (rho * (A2.transpose() * z)).norm();
    return {detail::safe_ratio(r.norm(), den_r), detail::safe_ratio(s.norm(), den_s)};
}

inline std::pair<double, double> admm_residuals(const AdmmState& state,
                                                const assembly::AssembledSystem& sys, double rho,
                                                const Eigen::VectorXd& v_prev) {
    if (!sys.psi) throw std::invalid_argument("admm_residuals: system has no obstacle vector");
    return admm_relative_residuals(sys.A2, *sys.psi, state.w, state.v, state.z, v_prev, rho);
}

/// One w-update: solves the regularized normal system through the truncated
/// pseudo-inverse, rhs = beta A3^T g + rho A2^T (psi - v - z).
inline Eigen::VectorXd admm_w_update(const tsvd::TsvdFactors& factors,
                                     const assembly::AssembledSystem& sys,
                                     const AdmmParams& params, const Eigen::VectorXd& v,
                                     const Eigen::VectorXd& z) {
    if (!sys.psi) throw std::invalid_argument("admm_w_update: system has no obstacle vector");
    const Eigen::VectorXd rhs = params.beta * (sys.A3.transpose() * sys.g) +
                                params.rho * (sys.A2.transpose() * (*sys.psi - v - z));
    return tsvd::tsvd_apply(factors, rhs);
}

/// Shared ADMM iteration used by both the reference path (scaled operators
/// straight from the assembled system) and the experiment runner. The caller
/// supplies the truncated solve for the w-subproblem.
template <class ApplyPinv>
SolveReport admm_iterate(ApplyPinv&& apply_pinv, const Eigen::MatrixXd& A2,
                         const Eigen::VectorXd& bg, const Eigen::VectorXd& psi,
                         const AdmmParams& params, Eigen::Index rank_kept) {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::Index n = A2.cols();
    const Eigen::Index m = A2.rows();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m);

    SolveReport report;
    report.rank_kept = rank_kept;
    long iter = 0;
    for (iter = 1; iter <= params.max_iter; ++iter) {
        w = apply_pinv(Eigen::VectorXd(bg + params.rho * (A2.transpose() * (psi - v - z))));
        const Eigen::VectorXd a2w = A2 * w;
        const Eigen::VectorXd t = psi - a2w - z;
        const Eigen::VectorXd v_prev = std::move(v);
        v = admm_v_update(t, params.mu, params.rho);
        const Eigen::VectorXd r = v - psi + a2w;
        z += r;

        const Eigen::VectorXd s = params.rho * (A2.transpose() * (v - v_prev));
        const double den_r = std::max({a2w.norm(), v.norm(), psi.norm()});
        const double den_s = (params.rho * (A2.transpose() * z)).norm();
        const double r_rel = detail::safe_ratio(r.norm(), den_r);
        const double s_rel = detail::safe_ratio(s.norm(), den_s);
        if (detail::record_iteration(iter))
            report.residual_history.push_back({iter, r_rel, s_rel});

        if (r_rel <= params.eps_primal && s_rel <= params.eps_dual) {
            if (!detail::record_iteration(iter))
                report.residual_history.push_back({iter, r_rel, s_rel});
            report.converged = true;
            break;
        }
    }
    report.iterations = std::min(iter, params.max_iter);
    report.weights = std::move(w);
    report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

/// Direct TSVD solve of the elliptic normal system
/// (A1 + beta A3^T A3) w = A2^T f + beta A3^T g.
inline SolveReport solve_elliptic(const assembly::AssembledSystem& sys,
                                  const EllipticParams& params) {
    if (sys.meta.kind == assembly::ProblemKind::obstacle)
        throw std::invalid_argument("solve_elliptic: obstacle systems use solve_obstacle");
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::MatrixXd A = sys.A1 + params.beta * (sys.A3.transpose() * sys.A3);
    const Eigen::VectorXd b =
        sys.A2.transpose() * sys.f + params.beta * (sys.A3.transpose() * sys.g);
    const tsvd::TsvdFactors factors = tsvd::tsvd_factorize(A, params.tau);

    SolveReport report;
    report.weights = tsvd::tsvd_apply(factors, b);
    report.iterations = 1;
    report.converged = true;
    report.rank_kept = factors.rank_kept;
    report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

/// ADMM solve of the obstacle problem on the assembled (measure-scaled)
/// operators, per the three-step w/v/z iteration with the conjunction
/// stopping rule. The normal matrix is factorized once.
inline SolveReport solve_obstacle(const assembly::AssembledSystem& sys, const AdmmParams& params) {
    if (sys.meta.kind != assembly::ProblemKind::obstacle || !sys.psi)
        throw std::invalid_argument("solve_obstacle: system is not an obstacle instance");
    const Eigen::MatrixXd A = sys.A1 + params.beta * (sys.A3.transpose() * sys.A3) +
                              params.rho * (sys.A2.transpose() * sys.A2);
    const tsvd::TsvdFactors factors = tsvd::tsvd_factorize(A, params.tau);
    const Eigen::VectorXd bg = params.beta * (sys.A3.transpose() * sys.g);
    return admm_iterate([&factors](const Eigen::VectorXd& rhs) { return tsvd::tsvd_apply(factors, rhs); },
                        sys.A2, bg, *sys.psi, params, factors.rank_kept);
}

}  // namespace rbfvar::solvers
