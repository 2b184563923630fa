#include "rbfvar/assembly.hpp"
#include "rbfvar/benchmarks.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace rbfvar;
using assembly::ProblemKind;
using kernels::Kernel;
using kernels::KernelKind;
using Catch::Approx;

namespace {

struct RandomInstance {
    geometry::CenterSet centers;
    geometry::CollocationSet colloc;
};

double unif(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

RandomInstance random_instance(std::mt19937_64& gen, int dim, long n, long m_omega, long m_bnd) {
    RandomInstance inst;
    inst.centers.points.resize(n, dim);
    for (long i = 0; i < n; ++i)
        for (int a = 0; a < dim; ++a) inst.centers.points(i, a) = -0.5 + 2.0 * unif(gen);
    inst.colloc.interior.resize(m_omega, dim);
    for (long j = 0; j < m_omega; ++j)
        for (int a = 0; a < dim; ++a) inst.colloc.interior(j, a) = unif(gen);
    inst.colloc.boundary.resize(m_bnd, dim);
    for (long nn = 0; nn < m_bnd; ++nn)
        for (int a = 0; a < dim; ++a)
            inst.colloc.boundary(nn, a) = (a == 0) ? static_cast<double>(nn % 2) : unif(gen);
    inst.colloc.zeta = 2;
    inst.colloc.measure_omega = dim == 1 ? 1.0 : 1.0;
    inst.colloc.measure_boundary = dim == 1 ? 2.0 : 4.0;
    return inst;
}

// Naive per-entry loops, written straight from the entrywise formulas.
Eigen::MatrixXd a1_loop(ProblemKind kind, const Kernel& k, const RandomInstance& inst) {
    const long n = inst.centers.count();
    const long m = inst.colloc.m_omega();
    Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(n, n);
    for (long i = 0; i < n; ++i)
        for (long l = 0; l < n; ++l)
            for (long j = 0; j < m; ++j) {
                const Eigen::VectorXd gi = kernels::kernel_grad(
                    k, inst.colloc.interior.row(j).transpose(), inst.centers.points.row(i).transpose());
                const Eigen::VectorXd gl = kernels::kernel_grad(
                    k, inst.colloc.interior.row(j).transpose(), inst.centers.points.row(l).transpose());
                double term = gi.dot(gl);
                if (kind == ProblemKind::reaction_diffusion) {
                    const double pi_ = kernels::kernel_eval(
                        k, (inst.colloc.interior.row(j) - inst.centers.points.row(i)).norm());
                    const double pl = kernels::kernel_eval(
                        k, (inst.colloc.interior.row(j) - inst.centers.points.row(l)).norm());
                    term += pi_ * pl;
                }
                a1(i, l) += term;
            }
    return inst.colloc.measure_omega / (static_cast<double>(m) * static_cast<double>(n)) * a1;
}

Eigen::MatrixXd a2_loop(const Kernel& k, const RandomInstance& inst) {
    const long n = inst.centers.count();
    const long m = inst.colloc.m_omega();
    Eigen::MatrixXd a2(m, n);
    for (long j = 0; j < m; ++j)
        for (long i = 0; i < n; ++i)
            a2(j, i) = inst.colloc.measure_omega / (m * std::sqrt(static_cast<double>(n))) *
                       kernels::kernel_eval(k, (inst.colloc.interior.row(j) -
                                                inst.centers.points.row(i)).norm());
    return a2;
}

Eigen::MatrixXd a3_loop(const Kernel& k, const RandomInstance& inst) {
    const long n = inst.centers.count();
    const long mb = inst.colloc.m_boundary();
    Eigen::MatrixXd a3(mb, n);
    for (long nn = 0; nn < mb; ++nn)
        for (long i = 0; i < n; ++i)
            a3(nn, i) = std::sqrt(inst.colloc.measure_boundary / (mb * static_cast<double>(n))) *
                        kernels::kernel_eval(k, (inst.colloc.boundary.row(nn) -
                                                 inst.centers.points.row(i)).norm());
    return a3;
}

double rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    const double scale = want.cwiseAbs().maxCoeff();
    if (scale == 0.0) return got.cwiseAbs().maxCoeff();
    return (got - want).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

TEST_CASE("assembled operators equal the naive entrywise loops") {
    std::mt19937_64 gen(314);
    const KernelKind kinds[] = {KernelKind::gaussian, KernelKind::multiquadric,
                                KernelKind::inverse_multiquadric};
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = trial % 2 == 0 ? 1 : 2;
        const long n = 2 + static_cast<long>(unif(gen) * 9);
        const long m = n + 2 + static_cast<long>(unif(gen) * (20 - n - 2));
        auto inst = random_instance(gen, dim, n, m, 2 + (trial % 3));
        Kernel k(kinds[trial % 3], 0.5 + 2.0 * unif(gen));
        const ProblemKind kind =
            trial % 2 == 0 ? ProblemKind::poisson : ProblemKind::reaction_diffusion;

        REQUIRE(rel_err(assembly::assemble_a1(kind, k, inst.centers, inst.colloc),
                        a1_loop(kind, k, inst)) < 1e-13);
        REQUIRE(rel_err(assembly::assemble_a2(k, inst.centers, inst.colloc), a2_loop(k, inst)) <
                1e-13);
        REQUIRE(rel_err(assembly::assemble_a3(k, inst.centers, inst.colloc), a3_loop(k, inst)) <
                1e-13);
    }
}

TEST_CASE("single center coinciding with the collocation point") {
    RandomInstance inst;
    inst.centers.points = Eigen::MatrixXd::Constant(1, 1, 0.4);
    inst.colloc.interior = Eigen::MatrixXd::Constant(1, 1, 0.4);
    inst.colloc.boundary = Eigen::MatrixXd::Constant(1, 1, 0.4);
    inst.colloc.measure_omega = 1.0;
    inst.colloc.measure_boundary = 1.0;
    Kernel k(KernelKind::gaussian, 1.0);

    REQUIRE(assembly::assemble_a1(ProblemKind::poisson, k, inst.centers, inst.colloc)(0, 0) == 0.0);
    REQUIRE(assembly::assemble_a1(ProblemKind::reaction_diffusion, k, inst.centers, inst.colloc)(0, 0) ==
            Approx(1.0).epsilon(1e-14));
    REQUIRE(assembly::assemble_a2(k, inst.centers, inst.colloc)(0, 0) == Approx(1.0).epsilon(1e-14));
    REQUIRE(assembly::assemble_a3(k, inst.centers, inst.colloc)(0, 0) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("A2 maps weights to scaled point values of u_hat") {
    std::mt19937_64 gen(1);
    auto inst = random_instance(gen, 1, 4, 7, 2);
    Kernel k(KernelKind::gaussian, 2.0);
    Eigen::VectorXd w(4);
    w << 0.3, -1.2, 0.5, 2.0;
    const Eigen::VectorXd lhs = (inst.colloc.m_omega() / inst.colloc.measure_omega) *
                                (assembly::assemble_a2(k, inst.centers, inst.colloc) * w);
    const Eigen::VectorXd uh = assembly::evaluate_uhat(k, inst.centers, w, inst.colloc.interior);
    REQUIRE((lhs - uh).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("1D A3 scale reduces to 1/sqrt(N)") {
    std::mt19937_64 gen(5);
    auto inst = random_instance(gen, 1, 9, 5, 2);
    inst.colloc.measure_boundary = 2.0;
    Kernel k(KernelKind::gaussian, 1.0);
    const auto a3 = assembly::assemble_a3(k, inst.centers, inst.colloc);
    const double expect = kernels::kernel_eval(k, (inst.colloc.boundary.row(0) -
                                                   inst.centers.points.row(0)).norm()) / 3.0;
    REQUIRE(a3(0, 0) == Approx(expect).epsilon(1e-14));
}

TEST_CASE("data vectors carry the prescribed scalings") {
    const auto bench = benchmarks::poisson1d();
    auto colloc = geometry::sample_collocation(bench.domain, 2, 8, 3);
    Eigen::VectorXd f, g;
    std::optional<Eigen::VectorXd> psi;
    assembly::assemble_data(bench, colloc, f, g, psi);
    REQUIRE_FALSE(psi.has_value());
    REQUIRE(g(0) == Approx(std::sqrt(2.0 / 2.0) * -1.0).epsilon(1e-14));  // u(0) = a1 = -1
    for (Eigen::Index j = 0; j < f.size(); ++j)
        REQUIRE(f(j) == Approx(M_PI * M_PI * std::sin(M_PI * colloc.interior(j, 0))).epsilon(1e-13));

    // Obstacle data picks up |Omega|/m_omega; force one point onto x = 0.25.
    const auto ob = benchmarks::obstacle_one_bump();
    auto oc = geometry::sample_collocation(ob.domain, 2, 8, 3);
    oc.interior(0, 0) = 0.25;
    assembly::assemble_data(ob, oc, f, g, psi);
    REQUIRE(psi.has_value());
    REQUIRE((*psi)(0) == Approx(6.25 / static_cast<double>(oc.m_omega())).epsilon(1e-13));
    REQUIRE(g.cwiseAbs().maxCoeff() == 0.0);

    auto broken = ob;
    broken.obstacle.reset();
    REQUIRE_THROWS_AS(assembly::assemble_data(broken, oc, f, g, psi), std::invalid_argument);
}

TEST_CASE("A1 symmetry and positive semidefiniteness") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 5; ++trial) {
        const int dim = trial % 2 == 0 ? 1 : 2;
        auto inst = random_instance(gen, dim, 8, 15, 4);
        Kernel k(KernelKind::gaussian, 1.5);
        const auto a1 = assembly::assemble_a1(ProblemKind::poisson, k, inst.centers, inst.colloc);
        REQUIRE((a1 - a1.transpose()).cwiseAbs().maxCoeff() <=
                1e-12 * a1.cwiseAbs().maxCoeff());
        for (int probe = 0; probe < 20; ++probe) {
            Eigen::VectorXd w(8);
            for (int i = 0; i < 8; ++i) w(i) = -1.0 + 2.0 * unif(gen);
            REQUIRE(w.dot(a1 * w) >= -1e-10 * a1.norm() * w.squaredNorm());
        }
    }
}

TEST_CASE("energy identity: quadratic form equals summed gradient norms") {
    std::mt19937_64 gen(17);
    auto inst = random_instance(gen, 2, 6, 11, 4);
    Kernel k(KernelKind::gaussian, 1.2);
    const auto a1 = assembly::assemble_a1(ProblemKind::poisson, k, inst.centers, inst.colloc);
    Eigen::VectorXd w(6);
    for (int i = 0; i < 6; ++i) w(i) = -1.0 + 2.0 * unif(gen);

    // Sum of ||grad u_hat(x_j)||^2 evaluated through kernel_grad directly.
    const double n = static_cast<double>(inst.centers.count());
    double total = 0.0;
    for (Eigen::Index j = 0; j < inst.colloc.m_omega(); ++j) {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(2);
        for (Eigen::Index i = 0; i < inst.centers.count(); ++i)
            grad += w(i) * kernels::kernel_grad(k, inst.colloc.interior.row(j).transpose(),
                                                inst.centers.points.row(i).transpose());
        total += grad.squaredNorm() / n;
    }
    const double quad = w.dot(a1 * w) * inst.colloc.m_omega() / inst.colloc.measure_omega;
    REQUIRE(quad == Approx(total).epsilon(1e-12));
}

TEST_CASE("objective values and analytic gradient") {
    std::mt19937_64 gen(23);
    const auto bench = benchmarks::poisson1d();
    auto centers = geometry::sample_centers(bench.domain, 2.0, 6, 4);
    auto colloc = geometry::sample_collocation(bench.domain, 2, 6, 5);
    Kernel k(KernelKind::gaussian, 2.0);
    auto sys = assembly::assemble_system(bench, k, centers, colloc);
    const double beta = 10.0;

    REQUIRE(assembly::objective(ProblemKind::poisson, sys, beta, 0.0, Eigen::VectorXd::Zero(6)) ==
            Approx(0.5 * beta * sys.g.squaredNorm()).epsilon(1e-13));

    Eigen::VectorXd w(6);
    for (int i = 0; i < 6; ++i) w(i) = -1.0 + 2.0 * unif(gen);

    // Independent term-by-term recomputation.
    const double direct = 0.5 * w.dot(sys.A1 * w) - sys.f.dot(sys.A2 * w) +
                          0.5 * beta * (sys.A3 * w - sys.g).squaredNorm();
    REQUIRE(assembly::objective(ProblemKind::poisson, sys, beta, 0.0, w) ==
            Approx(direct).epsilon(1e-12));

    // Central differences against the analytic gradient.
    const Eigen::VectorXd grad = sys.A1 * w - sys.A2.transpose() * sys.f +
                                 beta * (sys.A3.transpose() * (sys.A3 * w - sys.g));
    const double h = 1e-6;
    for (int i = 0; i < 6; ++i) {
        Eigen::VectorXd wp = w, wm = w;
        wp(i) += h;
        wm(i) -= h;
        const double fd = (assembly::objective(ProblemKind::poisson, sys, beta, 0.0, wp) -
                           assembly::objective(ProblemKind::poisson, sys, beta, 0.0, wm)) /
                          (2.0 * h);
        REQUIRE(grad(i) == Approx(fd).margin(1e-8).epsilon(1e-6));
    }
}

TEST_CASE("obstacle objective: subgradient consistency away from kinks") {
    std::mt19937_64 gen(29);
    const auto bench = benchmarks::obstacle_one_bump();
    auto centers = geometry::sample_centers(bench.domain, 2.0, 5, 6);
    auto colloc = geometry::sample_collocation(bench.domain, 2, 5, 7);
    Kernel k(KernelKind::gaussian, 2.0);
    auto sys = assembly::assemble_system(bench, k, centers, colloc);
    const double beta = 5.0, mu = 3.0;

    Eigen::VectorXd w(5);
    for (int i = 0; i < 5; ++i) w(i) = -1.0 + 2.0 * unif(gen);
    const Eigen::VectorXd gap = *sys.psi - sys.A2 * w;
    Eigen::VectorXd active = (gap.array() > 0.0).cast<double>();
    REQUIRE(gap.cwiseAbs().minCoeff() > 1e-10);  // away from the kink set

    const Eigen::VectorXd grad = sys.A1 * w - mu * (sys.A2.transpose() * active) +
                                 beta * (sys.A3.transpose() * (sys.A3 * w - sys.g));
    const double h = 1e-7;
    for (int i = 0; i < 5; ++i) {
        Eigen::VectorXd wp = w, wm = w;
        wp(i) += h;
        wm(i) -= h;
        const double fd = (assembly::objective(ProblemKind::obstacle, sys, beta, mu, wp) -
                           assembly::objective(ProblemKind::obstacle, sys, beta, mu, wm)) /
                          (2.0 * h);
        REQUIRE(grad(i) == Approx(fd).margin(1e-7).epsilon(1e-5));
    }
}

TEST_CASE("evaluate_uhat") {
    std::mt19937_64 gen(41);
    auto inst = random_instance(gen, 1, 4, 6, 2);
    Kernel k(KernelKind::inverse_quadratic, 1.1);

    REQUIRE(assembly::evaluate_uhat(k, inst.centers, Eigen::VectorXd::Zero(4), inst.colloc.interior)
                .cwiseAbs()
                .maxCoeff() == 0.0);

    // Loop oracle.
    Eigen::VectorXd w(4);
    w << 1.0, -0.5, 0.25, 2.0;
    const Eigen::VectorXd got = assembly::evaluate_uhat(k, inst.centers, w, inst.colloc.interior);
    for (Eigen::Index j = 0; j < inst.colloc.m_omega(); ++j) {
        double sum = 0.0;
        for (int i = 0; i < 4; ++i)
            sum += w(i) * kernels::kernel_eval(k, (inst.colloc.interior.row(j) -
                                                   inst.centers.points.row(i)).norm());
        REQUIRE(got(j) == Approx(sum / 2.0).epsilon(1e-14));
    }

    Eigen::VectorXd single = Eigen::VectorXd::Ones(1);
    geometry::CenterSet one;
    one.points = Eigen::MatrixXd::Constant(1, 1, 0.3);
    Eigen::MatrixXd at = one.points;
    REQUIRE(assembly::evaluate_uhat(k, one, single, at)(0) == Approx(1.0).epsilon(1e-14));

    REQUIRE_THROWS_AS(assembly::evaluate_uhat(k, inst.centers, single, inst.colloc.interior),
                      std::invalid_argument);
}
