#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace rbfvar::kernels {

/// Radial basis families. Gaussian is the default in all benchmark runs;
/// the Wendland kernels are compactly supported (phi(r) = 0 for b*r > 1).
enum class KernelKind {
    gaussian,
    multiquadric,
    inverse_quadratic,
    inverse_multiquadric,
    wendland_c2,
    wendland_c4,
};

inline std::string to_string(KernelKind k) {
    switch (k) {
        case KernelKind::gaussian: return "gaussian";
        case KernelKind::multiquadric: return "multiquadric";
        case KernelKind::inverse_quadratic: return "inverse_quadratic";
        case KernelKind::inverse_multiquadric: return "inverse_multiquadric";
        case KernelKind::wendland_c2: return "wendland_c2";
        case KernelKind::wendland_c4: return "wendland_c4";
    }
    throw std::logic_error("unreachable kernel kind");
}

inline KernelKind kernel_kind_from_string(const std::string& s) {
    if (s == "gaussian") return KernelKind::gaussian;
    if (s == "multiquadric") return KernelKind::multiquadric;
    if (s == "inverse_quadratic") return KernelKind::inverse_quadratic;
    if (s == "inverse_multiquadric") return KernelKind::inverse_multiquadric;
    if (s == "wendland_c2") return KernelKind::wendland_c2;
    if (s == "wendland_c4") return KernelKind::wendland_c4;
    throw std::invalid_argument("unknown kernel kind: " + s);
}

/// A radial kernel with shape parameter b > 0 (per unit distance).
struct Kernel {
    KernelKind kind = KernelKind::gaussian;
    double b = 1.0;

    Kernel() = default;
    Kernel(KernelKind kind_, double b_) : kind(kind_), b(b_) {
        if (!(b > 0.0)) throw std::invalid_argument("kernel shape parameter must be positive");
    }
};

namespace detail {

// phi(r); templated so the collocation solver can evaluate in extended precision.
template <class Real>
Real eval_core(KernelKind kind, Real b, Real r) {
    const Real s = b * r;
    switch (kind) {
        case KernelKind::gaussian:
            return std::exp(-s * s);
        case KernelKind::multiquadric:
            return std::sqrt(Real(1) + s * s);
        case KernelKind::inverse_quadratic:
            return Real(1) / (Real(1) + s * s);
        case KernelKind::inverse_multiquadric:
            return Real(1) / std::sqrt(Real(1) + s * s);
        case KernelKind::wendland_c2: {
            if (s > Real(1)) return Real(0);
            const Real u = Real(1) - s;
            const Real u2 = u * u;
            return u2 * u2 * (Real(4) * s + Real(1));
        }
        case KernelKind::wendland_c4: {
            if (s > Real(1)) return Real(0);
            const Real u = Real(1) - s;
            const Real u3 = u * u * u;
            return u3 * u3 * (Real(35) * s * s + Real(18) * s + Real(3));
        }
    }
    throw std::logic_error("unreachable kernel kind");
}

// phi'(r)/r. Finite at r = 0 for every family, which makes the gradient
// phi'(r)/r * (x - c) exactly zero at a center.
template <class Real>
Real dphi_over_r_core(KernelKind kind, Real b, Real r) {
    const Real b2 = b * b;
    const Real s = b * r;
    switch (kind) {
        case KernelKind::gaussian:
            return Real(-2) * b2 * std::exp(-s * s);
        case KernelKind::multiquadric:
            return b2 / std::sqrt(Real(1) + s * s);
        case KernelKind::inverse_quadratic: {
            const Real q = Real(1) + s * s;
            return Real(-2) * b2 / (q * q);
        }
        case KernelKind::inverse_multiquadric: {
            const Real q = Real(1) + s * s;
            return -b2 / (q * std::sqrt(q));
        }
        case KernelKind::wendland_c2: {
            if (s > Real(1)) return Real(0);
            const Real u = Real(1) - s;
            return Real(-20) * b2 * u * u * u;
        }
        case KernelKind::wendland_c4: {
            if (s > Real(1)) return Real(0);
            const Real u = Real(1) - s;
            const Real u4 = (u * u) * (u * u);
            return Real(-56) * b2 * u4 * u * (Real(5) * s + Real(1));
        }
    }
    throw std::logic_error("unreachable kernel kind");
}

// Laplacian of phi(||x - c||) in d dimensions: phi''(r) + (d-1)/r phi'(r).
template <class Real>
Real laplacian_core(KernelKind kind, Real b, Real r, int dim) {
    const Real b2 = b * b;
    const Real s = b * r;
    const Real d = Real(dim);
    switch (kind) {
        case KernelKind::gaussian: {
            const Real e = std::exp(-s * s);
            return (Real(4) * b2 * s * s - Real(2) * d * b2) * e;
        }
        case KernelKind::multiquadric: {
            const Real q = Real(1) + s * s;
            const Real rq = std::sqrt(q);
            return b2 / (q * rq) + (d - Real(1)) * b2 / rq;
        }
        case KernelKind::inverse_quadratic: {
            const Real q = Real(1) + s * s;
            return Real(-2) * d * b2 / (q * q) + Real(8) * b2 * s * s / (q * q * q);
        }
        case KernelKind::inverse_multiquadric: {
            const Real q = Real(1) + s * s;
            const Real q32 = q * std::sqrt(q);
            return -d * b2 / q32 + Real(3) * b2 * s * s / (q32 * q);
        }
        case KernelKind::wendland_c2: {
            if (s > Real(1)) return Real(0);
            const Real u = Real(1) - s;
            return Real(-20) * b2 * u * u * (Real(1) - Real(4) * s)
                 - Real(20) * (d - Real(1)) * b2 * u * u * u;
        }
        case KernelKind::wendland_c4: {
            if (s > Real(1)) return Real(0);
            const Real u = Real(1) - s;
            const Real u4 = (u * u) * (u * u);
            return Real(-56) * b2 * u4 * (Real(1) + Real(4) * s - Real(35) * s * s)
                 - Real(56) * (d - Real(1)) * b2 * u4 * u * (Real(5) * s + Real(1));
        }
    }
    throw std::logic_error("unreachable kernel kind");
}

}  // namespace detail

/// phi(r) for the kernel's family and shape parameter.
inline double kernel_eval(const Kernel& k, double r) {
    if (r < 0.0) throw std::invalid_argument("kernel_eval: negative radius");
    return detail::eval_core<double>(k.kind, k.b, r);
}

/// Gradient of phi(||x - c||) with respect to x. Returns the zero vector at x = c.
inline Eigen::VectorXd kernel_grad(const Kernel& k, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& c) {
    if (x.size() != c.size() || x.size() < 1)
        throw std::invalid_argument("kernel_grad: dimension mismatch");
    const Eigen::VectorXd diff = x - c;
    const double r = diff.norm();
    if (r == 0.0) return Eigen::VectorXd::Zero(x.size());
    return detail::dphi_over_r_core<double>(k.kind, k.b, r) * diff;
}

/// Laplacian of phi(||x - c||) in `dim` dimensions.
inline double kernel_laplacian(const Kernel& k, double r, int dim) {
    if (r < 0.0) throw std::invalid_argument("kernel_laplacian: negative radius");
    if (dim < 1) throw std::invalid_argument("kernel_laplacian: dimension must be >= 1");
    return detail::laplacian_core<double>(k.kind, k.b, r, dim);
}

/// Which form of the shape-factor rule to use. The tabulated form carries a
/// factor 2 inside the logarithm's square root and reproduces the published
/// values c(8)=0.033, c(2)=0.134, c(1.5)=0.178, c(4)=0.067; the other variant
/// omits the factor and is kept for comparison.
enum class CScalingRule { tabulated, no_factor_two };

/// Shape-factor multiplier c(T, tau).
inline double c_opt(double T, double tau, CScalingRule rule = CScalingRule::tabulated) {
    if (!(T >= 1.0)) throw std::invalid_argument("c_opt: T must be >= 1");
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("c_opt: tau must lie in (0,1)");
    const double factor = (rule == CScalingRule::tabulated) ? 2.0 : 1.0;
    const double val = M_PI / (T * std::sqrt(factor * std::log1p(1.0 / (tau * tau))));
    return std::min(1.0, val);
}

/// Dimensional scaling of the shape parameter: b = c*N in 1D, b = c*sqrt(N) in 2D.
inline double shape_param(double c, long N, int dim) {
    if (!(c > 0.0)) throw std::invalid_argument("shape_param: c must be positive");
    if (N < 1) throw std::invalid_argument("shape_param: N must be >= 1");
    if (dim == 1) return c * static_cast<double>(N);
    if (dim == 2) return c * std::sqrt(static_cast<double>(N));
    throw std::invalid_argument("shape_param: unsupported dimension " + std::to_string(dim));
}

}  // namespace rbfvar::kernels
