#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace rbfvar::geometry {

/// Computational domains: an interval (b1, b2) or the open unit square.
/// The boundary measure follows the count-2 convention in 1D.
struct Domain {
    enum class Kind { interval, unit_square };

    Kind kind = Kind::interval;
    double b1 = 0.0;
    double b2 = 1.0;

    static Domain interval(double b1, double b2) {
        if (!(b1 < b2)) throw std::invalid_argument("Domain::interval: requires b1 < b2");
        Domain d;
        d.kind = Kind::interval;
        d.b1 = b1;
        d.b2 = b2;
        return d;
    }

    static Domain unit_square() {
        Domain d;
        d.kind = Kind::unit_square;
        d.b1 = 0.0;
        d.b2 = 1.0;
        return d;
    }

    int dim() const { return kind == Kind::interval ? 1 : 2; }
    double measure_omega() const { return kind == Kind::interval ? b2 - b1 : 1.0; }
    double measure_boundary() const { return kind == Kind::interval ? 2.0 : 4.0; }

    /// Characteristic length used to express kernel shapes per unit distance.
    double length_scale() const { return kind == Kind::interval ? b2 - b1 : 1.0; }
};

/// RBF centers drawn from the expanded domain (expansion factor T).
struct CenterSet {
    Eigen::MatrixXd points;  // N x d
    double expansion = 1.0;

    Eigen::Index count() const { return points.rows(); }
    int dim() const { return static_cast<int>(points.cols()); }
};

/// Interior/boundary collocation points together with the domain measures
/// they discretize (kept here so assembly needs no separate Domain argument).
struct CollocationSet {
    Eigen::MatrixXd interior;  // m_omega x d
    Eigen::MatrixXd boundary;  // m_boundary x d
    int zeta = 0;
    double measure_omega = 0.0;
    double measure_boundary = 0.0;

    Eigen::Index m_omega() const { return interior.rows(); }
    Eigen::Index m_boundary() const { return boundary.rows(); }
};

namespace detail {

// Deterministic uniform generator: mt19937_64 bits mapped to [0,1) doubles.
class Uniform {
  public:
    explicit Uniform(std::uint64_t seed) : gen_(seed) {}
    double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 gen_;
};

inline bool rows_equal(const Eigen::MatrixXd& m, Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (m(a, j) != m(b, j)) return false;
    return true;
}

}  // namespace detail

/// Draw N centers i.i.d. uniform on the expanded domain. Deterministic given
/// the seed; exact duplicates (possible only through rounding) are re-drawn.
inline CenterSet sample_centers(const Domain& domain, double T, long N, std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("sample_centers: N must be >= 1");
    if (!(T >= 1.0)) throw std::invalid_argument("sample_centers: T must be >= 1");

    detail::Uniform rng(seed);
    const int d = domain.dim();
    Eigen::MatrixXd pts(N, d);
    if (d == 1) {
        const double mid = 0.5 * (domain.b1 + domain.b2);
        const double half = 0.5 * (domain.b2 - domain.b1);
        for (long i = 0; i < N; ++i) pts(i, 0) = mid - T * half + 2.0 * T * half * rng.next();
    } else {
        const double lo = 0.5 - 0.5 * T;
        for (long i = 0; i < N; ++i) {
            pts(i, 0) = lo + T * rng.next();
            pts(i, 1) = lo + T * rng.next();
        }
    }

    // Re-draw duplicates until all rows are distinct.
    bool again = true;
    while (again) {
        again = false;
        for (Eigen::Index i = 0; i < N && !again; ++i)
            for (Eigen::Index j = i + 1; j < N; ++j)
                if (detail::rows_equal(pts, i, j)) {
                    for (int k = 0; k < d; ++k) {
                        double lo = (d == 1) ? 0.5 * (domain.b1 + domain.b2) - T * 0.5 * (domain.b2 - domain.b1)
                                             : 0.5 - 0.5 * T;
                        double w = (d == 1) ? T * (domain.b2 - domain.b1) : T;
                        pts(j, k) = lo + w * rng.next();
                    }
                    again = true;
                    break;
                }
    }

    CenterSet cs;
    cs.points = std::move(pts);
    cs.expansion = T;
    return cs;
}

/// Sample the collocation points: in 1D the boundary is exactly {b1, b2} and
/// the interior holds zeta*N - 2 uniform draws; in 2D round(sqrt(zeta*N))
/// points per side (half-open edges, so corners never repeat) and the interior
/// absorbs the remainder so m = zeta*N exactly.
inline CollocationSet sample_collocation(const Domain& domain, int zeta, long N,
                                         std::uint64_t seed) {
    if (zeta < 1 || N < 1) throw std::invalid_argument("sample_collocation: zeta and N must be >= 1");
    const long m = static_cast<long>(zeta) * N;

    detail::Uniform rng(seed);
    CollocationSet out;
    out.zeta = zeta;
    out.measure_omega = domain.measure_omega();
    out.measure_boundary = domain.measure_boundary();

    if (domain.dim() == 1) {
        const long m_int = m - 2;
        if (m_int < 1) throw std::invalid_argument("sample_collocation: zeta*N - 2 must be >= 1");
        out.boundary.resize(2, 1);
        out.boundary(0, 0) = domain.b1;
        out.boundary(1, 0) = domain.b2;
        out.interior.resize(m_int, 1);
        const double len = domain.b2 - domain.b1;
        for (long i = 0; i < m_int; ++i) {
            double x;
            do {
                x = domain.b1 + len * rng.next();
            } while (x == domain.b1 || x == domain.b2);
            out.interior(i, 0) = x;
        }
    } else {
        const long per_side = std::lround(std::sqrt(static_cast<double>(m)));
        const long mb = 4 * per_side;
        const long m_int = m - mb;
        if (m_int < 1) throw std::invalid_argument("sample_collocation: interior point count must be >= 1");

        out.boundary.resize(mb, 2);
        for (long i = 0; i < per_side; ++i) {  // bottom: (t, 0)
            out.boundary(i, 0) = rng.next();
            out.boundary(i, 1) = 0.0;
        }
        for (long i = 0; i < per_side; ++i) {  // right: (1, t)
            out.boundary(per_side + i, 0) = 1.0;
            out.boundary(per_side + i, 1) = rng.next();
        }
        for (long i = 0; i < per_side; ++i) {  // top: (1 - t, 1)
            out.boundary(2 * per_side + i, 0) = 1.0 - rng.next();
            out.boundary(2 * per_side + i, 1) = 1.0;
        }
        for (long i = 0; i < per_side; ++i) {  // left: (0, 1 - t)
            out.boundary(3 * per_side + i, 0) = 0.0;
            out.boundary(3 * per_side + i, 1) = 1.0 - rng.next();
        }

        out.interior.resize(m_int, 2);
        for (long i = 0; i < m_int; ++i) {
            double x, y;
            do {
                x = rng.next();
                y = rng.next();
            } while (x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0);
            out.interior(i, 0) = x;
            out.interior(i, 1) = y;
        }
    }
    return out;
}

/// Largest distance from a probe point to its nearest set point.
inline double fill_distance_probes(const Eigen::MatrixXd& points, const Eigen::MatrixXd& probes) {
    if (points.rows() < 1) throw std::invalid_argument("fill_distance: empty point set");
    double worst = 0.0;
    for (Eigen::Index p = 0; p < probes.rows(); ++p) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < points.rows(); ++i)
            best = std::min(best, (points.row(i) - probes.row(p)).norm());
        worst = std::max(worst, best);
    }
    return worst;
}

/// Monte-Carlo estimate of the fill distance over the domain.
inline double fill_distance(const Eigen::MatrixXd& points, const Domain& domain,
                            long probe_count, std::uint64_t seed = 0x5eed) {
    if (points.rows() < 1) throw std::invalid_argument("fill_distance: empty point set");
    if (probe_count < 1) throw std::invalid_argument("fill_distance: probe_count must be >= 1");
    detail::Uniform rng(seed);
    Eigen::MatrixXd probes(probe_count, domain.dim());
    if (domain.dim() == 1) {
        const double len = domain.b2 - domain.b1;
        for (long p = 0; p < probe_count; ++p) probes(p, 0) = domain.b1 + len * rng.next();
    } else {
        for (long p = 0; p < probe_count; ++p) {
            probes(p, 0) = rng.next();
            probes(p, 1) = rng.next();
        }
    }
    return fill_distance_probes(points, probes);
}

/// Half the minimal pairwise distance.
inline double separation_distance(const Eigen::MatrixXd& points) {
    if (points.rows() < 2) throw std::invalid_argument("separation_distance: needs >= 2 points");
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index j = i + 1; j < points.rows(); ++j)
            best = std::min(best, (points.row(i) - points.row(j)).norm());
    return 0.5 * best;
}

}  // namespace rbfvar::geometry
