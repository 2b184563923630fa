#pragma once

#include "rbfvar/benchmarks.hpp"
#include "rbfvar/collocation.hpp"
#include "rbfvar/geometry.hpp"
#include "rbfvar/kernels.hpp"
#include "rbfvar/solvers.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rbfvar::experiment {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Declarative experiment description. N, T, tau and beta may be lists; the
/// sweep grid is their Cartesian product in declaration order (N outermost).
struct ExperimentConfig {
    std::string benchmark;
    kernels::KernelKind kernel = kernels::KernelKind::gaussian;
    std::vector<long> N;
    int zeta = 0;
    std::vector<double> T;
    std::vector<double> tau;
    std::vector<double> beta;
    std::optional<double> mu;   // obstacle benchmarks only
    std::optional<double> rho;  // obstacle benchmarks only
    std::optional<double> c_override;
    double eps_primal = 1e-6;
    double eps_dual = 1e-6;
    long max_iter = 50000;
    std::uint64_t seed_centers = 1;
    std::uint64_t seed_colloc = 2;
    std::string out;

    std::size_t grid_size() const { return N.size() * T.size() * tau.size() * beta.size(); }
    bool is_sweep() const { return grid_size() > 1; }
};

/// One row of results; optional fields stay empty in the CSV when a run fails.
struct RunRecord {
    std::string benchmark;
    std::string kernel;
    long N = 0;
    long m = 0;
    long m_omega = 0;
    long m_boundary = 0;
    int zeta = 0;
    double T = 0.0;
    double tau = 0.0;
    double c = 0.0;
    double b = 0.0;
    double beta = 0.0;
    std::optional<double> mu;
    std::optional<double> rho;
    std::uint64_t seed_centers = 0;
    std::uint64_t seed_colloc = 0;
    std::optional<long> rank_kept;
    std::optional<double> error_rel_l2;
    std::optional<long> iterations;
    std::optional<bool> converged;
    std::optional<double> runtime_ms;
    bool failed = false;
    std::string fail_reason;
};

namespace detail {

inline const std::vector<std::string>& allowed_keys() {
    static const std::vector<std::string> keys = {
        "benchmark", "kernel", "N", "zeta", "T", "tau", "beta", "mu", "rho",
        "c_override", "eps_primal", "eps_dual", "max_iter", "seed_centers",
        "seed_colloc", "out"};
    return keys;
}

inline std::vector<double> number_list(const nlohmann::json& v, const std::string& key) {
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(v.get<double>());
    } else if (v.is_array() && !v.empty()) {
        for (const auto& e : v) {
            if (!e.is_number()) throw config_error("config key '" + key + "' has a non-numeric entry");
            out.push_back(e.get<double>());
        }
    } else {
        throw config_error("config key '" + key + "' must be a number or non-empty list");
    }
    return out;
}

inline std::vector<long> integer_list(const nlohmann::json& v, const std::string& key) {
    std::vector<long> out;
    for (double d : number_list(v, key)) {
        const long n = static_cast<long>(d);
        if (static_cast<double>(n) != d) throw config_error("config key '" + key + "' must be integral");
        out.push_back(n);
    }
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

/// Parses and validates a config document; unknown keys are a hard error and
/// benchmark-specific defaults are resolved here.
inline ExperimentConfig parse_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw config_error("config must be a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const auto& keys = detail::allowed_keys();
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
            throw config_error("unknown config key: '" + it.key() + "'");
    }
    if (!doc.contains("benchmark") || !doc["benchmark"].is_string())
        throw config_error("config requires a 'benchmark' string");
    if (!doc.contains("N")) throw config_error("config requires 'N'");

    ExperimentConfig cfg;
    cfg.benchmark = doc["benchmark"].get<std::string>();
    const benchmarks::Benchmark bench = benchmarks::make_benchmark(cfg.benchmark);
    const bool obstacle = bench.kind == benchmarks::ProblemKind::obstacle;

    if (doc.contains("kernel"))
        cfg.kernel = kernels::kernel_kind_from_string(doc["kernel"].get<std::string>());

    cfg.N = detail::integer_list(doc["N"], "N");
    for (long n : cfg.N)
        if (n < 1) throw config_error("N entries must be >= 1");

    cfg.zeta = doc.contains("zeta") ? static_cast<int>(detail::integer_list(doc["zeta"], "zeta").at(0))
                                    : (bench.domain.dim() == 1 ? 2 : 4);
    if (cfg.zeta < 1) throw config_error("zeta must be >= 1");

    // Benchmark-specific defaults follow the published parameter choices.
    double default_T = 8.0, default_beta = 3e5;
    if (cfg.benchmark == "rd1d") default_T = 2.0;
    if (cfg.benchmark == "obstacle_one_bump") { default_T = 2.0; default_beta = 1e6; }
    if (cfg.benchmark == "obstacle_two_bump") { default_T = 3.0; default_beta = 1e8; }
    if (cfg.benchmark == "dome2d") { default_T = 3.0; default_beta = 1e6; }

    cfg.T = doc.contains("T") ? detail::number_list(doc["T"], "T") : std::vector<double>{default_T};
    cfg.tau = doc.contains("tau") ? detail::number_list(doc["tau"], "tau") : std::vector<double>{1e-15};
    cfg.beta = doc.contains("beta") ? detail::number_list(doc["beta"], "beta")
                                    : std::vector<double>{default_beta};
    for (double t : cfg.T)
        if (!(t >= 1.0)) throw config_error("T entries must be >= 1");
    for (double t : cfg.tau)
        if (!(t > 0.0 && t < 1.0)) throw config_error("tau entries must lie in (0,1)");
    for (double b : cfg.beta)
        if (!(b > 0.0)) throw config_error("beta entries must be positive");

    auto reject_unless_obstacle = [&](const char* key) {
        if (doc.contains(key) && !obstacle)
            throw config_error(std::string("config key '") + key + "' only applies to obstacle benchmarks");
    };
    reject_unless_obstacle("mu");
    reject_unless_obstacle("rho");
    reject_unless_obstacle("eps_primal");
    reject_unless_obstacle("eps_dual");
    reject_unless_obstacle("max_iter");

    if (obstacle) {
        if (cfg.benchmark == "obstacle_one_bump") { cfg.mu = 300.0; cfg.rho = 45.0; }
        if (cfg.benchmark == "obstacle_two_bump") { cfg.mu = 2.5e4; cfg.rho = 250.0; }
        if (cfg.benchmark == "dome2d") cfg.rho = 20.3;  // mu defaults to 10*m per run
        if (doc.contains("mu")) cfg.mu = detail::number_list(doc["mu"], "mu").at(0);
        if (doc.contains("rho")) cfg.rho = detail::number_list(doc["rho"], "rho").at(0);
        if (doc.contains("eps_primal")) cfg.eps_primal = detail::number_list(doc["eps_primal"], "eps_primal").at(0);
        if (doc.contains("eps_dual")) cfg.eps_dual = detail::number_list(doc["eps_dual"], "eps_dual").at(0);
        if (doc.contains("max_iter")) cfg.max_iter = detail::integer_list(doc["max_iter"], "max_iter").at(0);
        if (cfg.mu && !(*cfg.mu > 0.0)) throw config_error("mu must be positive");
        if (cfg.rho && !(*cfg.rho > 0.0)) throw config_error("rho must be positive");
        if (cfg.max_iter < 1) throw config_error("max_iter must be >= 1");
        if (!(cfg.eps_primal > 0.0) || !(cfg.eps_dual > 0.0))
            throw config_error("tolerances must be positive");
    }

    if (doc.contains("c_override")) {
        cfg.c_override = detail::number_list(doc["c_override"], "c_override").at(0);
        if (!(*cfg.c_override > 0.0)) throw config_error("c_override must be positive");
    }
    if (doc.contains("seed_centers"))
        cfg.seed_centers = static_cast<std::uint64_t>(detail::integer_list(doc["seed_centers"], "seed_centers").at(0));
    if (doc.contains("seed_colloc"))
        cfg.seed_colloc = static_cast<std::uint64_t>(detail::integer_list(doc["seed_colloc"], "seed_colloc").at(0));
    if (doc.contains("out")) cfg.out = doc["out"].get<std::string>();
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config parse failure in " + path + ": " + e.what());
    }
    return parse_config(doc);
}

/// Serializes a resolved config; parse(serialize(parse(x))) == parse(x).
inline nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json doc;
    doc["benchmark"] = cfg.benchmark;
    doc["kernel"] = kernels::to_string(cfg.kernel);
    auto scalar_or_list = [](const auto& v) -> nlohmann::json {
        if (v.size() == 1) return v.front();
        return v;
    };
    doc["N"] = scalar_or_list(cfg.N);
    doc["zeta"] = cfg.zeta;
    doc["T"] = scalar_or_list(cfg.T);
    doc["tau"] = scalar_or_list(cfg.tau);
    doc["beta"] = scalar_or_list(cfg.beta);
    const bool obstacle =
        benchmarks::make_benchmark(cfg.benchmark).kind == benchmarks::ProblemKind::obstacle;
    if (obstacle) {
        if (cfg.mu) doc["mu"] = *cfg.mu;
        if (cfg.rho) doc["rho"] = *cfg.rho;
        doc["eps_primal"] = cfg.eps_primal;
        doc["eps_dual"] = cfg.eps_dual;
        doc["max_iter"] = cfg.max_iter;
    }
    if (cfg.c_override) doc["c_override"] = *cfg.c_override;
    doc["seed_centers"] = cfg.seed_centers;
    doc["seed_colloc"] = cfg.seed_colloc;
    if (!cfg.out.empty()) doc["out"] = cfg.out;
    return doc;
}

/// One grid point of a config (all sweep axes fixed).
struct RunPoint {
    long N = 0;
    double T = 0.0;
    double tau = 0.0;
    double beta = 0.0;
};

inline std::vector<RunPoint> resolve_grid(const ExperimentConfig& cfg) {
    if (cfg.grid_size() == 0) throw config_error("empty sweep grid");
    std::vector<RunPoint> grid;
    grid.reserve(cfg.grid_size());
    for (long n : cfg.N)
        for (double t : cfg.T)
            for (double tau : cfg.tau)
                for (double beta : cfg.beta) grid.push_back({n, t, tau, beta});
    return grid;
}

/// Executes one grid point end to end: sample, assemble, solve, evaluate.
inline RunRecord run_single(const ExperimentConfig& cfg, const RunPoint& pt) {
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.benchmark = cfg.benchmark;
    rec.kernel = kernels::to_string(cfg.kernel);
    rec.N = pt.N;
    rec.zeta = cfg.zeta;
    rec.m = static_cast<long>(cfg.zeta) * pt.N;
    rec.T = pt.T;
    rec.tau = pt.tau;
    rec.beta = pt.beta;
    rec.seed_centers = cfg.seed_centers;
    rec.seed_colloc = cfg.seed_colloc;

    try {
        const benchmarks::Benchmark bench = benchmarks::make_benchmark(cfg.benchmark);
        const int dim = bench.domain.dim();
        const double c = cfg.c_override ? *cfg.c_override : kernels::c_opt(pt.T, pt.tau);
        const double b = kernels::shape_param(c, pt.N, dim);
        rec.c = c;
        rec.b = b;
        // Shape parameters are expressed per unit distance; physical shapes
        // divide by the domain's length scale (identity on unit domains).
        const kernels::Kernel kernel(cfg.kernel, b / bench.domain.length_scale());

        const geometry::CenterSet centers =
            geometry::sample_centers(bench.domain, pt.T, pt.N, cfg.seed_centers);
        const geometry::CollocationSet colloc =
            geometry::sample_collocation(bench.domain, cfg.zeta, pt.N, cfg.seed_colloc);
        rec.m_omega = colloc.m_omega();
        rec.m_boundary = colloc.m_boundary();

        Eigen::VectorXd weights;
        if (bench.kind == benchmarks::ProblemKind::obstacle) {
            solvers::AdmmParams params;
            params.beta = pt.beta;
            params.tau = pt.tau;
            params.rho = cfg.rho.value();
            params.mu = cfg.mu ? *cfg.mu : 10.0 * static_cast<double>(rec.m);
            params.max_iter = cfg.max_iter;
            params.eps_primal = cfg.eps_primal;
            params.eps_dual = cfg.eps_dual;
            rec.mu = params.mu;
            rec.rho = params.rho;
            const solvers::SolveReport rep =
                collocation::solve_obstacle_collocation(bench, kernel, centers, colloc, params);
            weights = rep.weights;
            rec.iterations = rep.iterations;
            rec.converged = rep.converged;
            rec.rank_kept = rep.rank_kept;
        } else {
            const collocation::CollocationSolve sol =
                collocation::solve_elliptic_collocation(bench, kernel, centers, colloc, pt.beta, pt.tau);
            weights = sol.weights;
            rec.iterations = 1;
            rec.converged = true;
            rec.rank_kept = sol.rank_kept;
        }

        const Eigen::VectorXd u_hat = assembly::evaluate_uhat(kernel, centers, weights, colloc.interior);
        Eigen::VectorXd u_exact(colloc.m_omega());
        for (Eigen::Index j = 0; j < u_exact.size(); ++j)
            u_exact(j) = bench.exact(colloc.interior.row(j));
        rec.error_rel_l2 = benchmarks::relative_l2_error(u_hat, u_exact);
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.fail_reason = e.what();
    }
    rec.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

/// Runs the whole grid; grid order is preserved in the output regardless of
/// scheduling, and failures are recorded per point rather than aborting.
inline std::vector<RunRecord> run_sweep(const ExperimentConfig& cfg, unsigned threads = 0) {
    const std::vector<RunPoint> grid = resolve_grid(cfg);
    std::vector<RunRecord> records(grid.size());
    unsigned n_threads = threads == 0 ? std::thread::hardware_concurrency() : threads;
    n_threads = std::max(1u, std::min<unsigned>(n_threads, grid.size()));

    if (n_threads == 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) records[i] = run_single(cfg, grid[i]);
        return records;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1))
            records[i] = run_single(cfg, grid[i]);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return records;
}

inline const char* csv_header() {
    return "benchmark,kernel,N,m,m_omega,m_boundary,zeta,T,tau,c,b,beta,mu,rho,"
           "seed_centers,seed_colloc,rank_kept,error_rel_l2,iterations,converged,runtime_ms";
}

inline std::string to_csv_row(const RunRecord& r) {
    std::ostringstream os;
    auto num = [](double v) { return detail::format_double(v); };
    os << r.benchmark << ',' << r.kernel << ',' << r.N << ',' << r.m << ',' << r.m_omega << ','
       << r.m_boundary << ',' << r.zeta << ',' << num(r.T) << ',' << num(r.tau) << ',';
    if (r.failed) {
        os << ",,";  // c and b stay unresolved for failed runs
    } else {
        os << num(r.c) << ',' << num(r.b) << ',';
    }
    os << num(r.beta) << ',' << (r.mu ? num(*r.mu) : "") << ',' << (r.rho ? num(*r.rho) : "") << ','
       << r.seed_centers << ',' << r.seed_colloc << ','
       << (r.rank_kept ? std::to_string(*r.rank_kept) : "") << ','
       << (r.error_rel_l2 ? num(*r.error_rel_l2) : "") << ','
       << (r.iterations ? std::to_string(*r.iterations) : "") << ','
       << (r.converged ? (*r.converged ? "true" : "false") : "") << ','
       << (r.runtime_ms ? num(*r.runtime_ms) : "");
    return os.str();
}

/// Writes the records as CSV with the fixed 21-column header.
inline void write_csv(const std::vector<RunRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open output path: " + path);
    out << csv_header() << '\n';
    for (const auto& r : records) out << to_csv_row(r) << '\n';
    if (!out) throw std::runtime_error("write_csv: I/O failure writing: " + path);
}

}  // namespace rbfvar::experiment
