// lsqkit command-line driver: problem ingestion, optional column scaling,
// solver selection (lsmr / lsqr / both-lockstep), CSV trace streaming, and a
// seeded synthetic problem generator.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsqkit/backerr.hpp"
#include "lsqkit/generate.hpp"
#include "lsqkit/gk_bidiag.hpp"
#include "lsqkit/linop.hpp"
#include "lsqkit/lsmr.hpp"
#include "lsqkit/lsqr.hpp"
#include "lsqkit/matrix_market.hpp"
#include "lsqkit/vec.hpp"

namespace {

using namespace lsqkit;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int exit_code_for(StopReason reason) {
    switch (reason) {
        case StopReason::BZero:
        case StopReason::BreakdownConsistent:
        case StopReason::BreakdownLs:
        case StopReason::S1Compatible:
        case StopReason::S2LeastSquares:
        case StopReason::S1Eps:
        case StopReason::S2Eps:
            return 0;
        case StopReason::S3CondLimit:
            return 2;
        case StopReason::MaxIter:
            return 3;
    }
    return 1;
}

struct SolveArgs {
    std::string matrix_path;
    std::string rhs_path;
    std::string rhs_mode = "file";  // file | ones | from-matrix-objective
    std::string solver = "lsmr";    // lsmr | lsqr | both-lockstep
    double lambda = 0.0;
    double atol = 1e-6;
    double btol = 1e-6;
    double conlim = 1e8;
    std::size_t max_iter = 0;
    std::string reorth = "none";
    bool scale = false;
    bool diagnostics = false;
    std::string trace_path;
    std::string solution_path;
};

nlohmann::ordered_json summary_json(const std::string& solver, const SolveResult& res,
                                    double wall_seconds) {
    nlohmann::ordered_json j;
    j["solver"] = solver;
    j["reason"] = to_string(res.reason);
    j["iterations"] = res.iterations;
    j["normr"] = res.norm_r;
    j["normAr"] = res.norm_atr;
    j["normx"] = res.norm_x;
    j["normA"] = res.norm_a;
    j["cond"] = res.cond_a;
    j["wall_seconds"] = wall_seconds;
    return j;
}

int run_solve(const SolveArgs& args) {
    CsrMatrix matrix = read_matrix_market(args.matrix_path);
    if (args.rhs_mode == "from-matrix-objective") {
        // LP-style construction: the file holds the constraint matrix; the
        // solve uses its transpose with the objective vector as rhs.
        const DenseMatrix d = DenseMatrix::from_csr(matrix).transposed();
        std::vector<CsrMatrix::Triplet> t;
        for (std::size_t i = 0; i < d.nrows; ++i)
            for (std::size_t j = 0; j < d.ncols; ++j)
                if (d.at(i, j) != 0.0) t.push_back({i, j, d.at(i, j)});
        matrix = CsrMatrix::from_triplets(d.nrows, d.ncols, std::move(t));
    }

    std::vector<double> rhs;
    if (args.rhs_mode == "ones") {
        rhs.assign(matrix.nrows, 1.0);
    } else {
        if (args.rhs_path.empty())
            throw std::runtime_error("solve: --rhs is required unless --rhs-mode ones");
        rhs = read_vector_file(args.rhs_path);
    }
    if (rhs.size() != matrix.nrows)
        throw std::runtime_error("solve: rhs length " + std::to_string(rhs.size()) +
                                 " does not match matrix rows " +
                                 std::to_string(matrix.nrows));

    std::optional<ScalingReport> scaling;
    if (args.scale) {
        ScaledProblem sp = column_unit_scale(matrix, rhs);
        scaling = std::move(sp.report);
        matrix = std::move(sp.matrix);
        rhs = std::move(sp.rhs);
    }

    SolveOptions opts;
    opts.atol = args.atol;
    opts.btol = args.btol;
    opts.conlim = args.conlim;
    opts.lambda = args.lambda;
    opts.max_iter = args.max_iter;
    opts.reorth = ReorthMode::parse(args.reorth);
    opts.diagnostics = args.diagnostics;

    CsrOperator op(std::move(matrix));

    std::ofstream trace;
    if (!args.trace_path.empty()) {
        trace.open(args.trace_path);
        if (!trace) throw std::runtime_error("solve: cannot open trace file " + args.trace_path);
    }

    const auto t0 = std::chrono::steady_clock::now();
    SolveResult result;

    if (args.solver == "both-lockstep") {
        if (trace.is_open()) {
            trace << "k,normr_lsmr,normAr_lsmr,normx_lsmr,e2_lsmr,"
                     "normr_lsqr,normAr_lsqr,normx_lsqr,e2_lsqr\n";
            trace.flush();
        }
        LockstepResult both = solve_lockstep(op, rhs, opts, [&](const LockstepRecord& rec) {
            if (!trace.is_open()) return;
            trace << rec.k << ',' << fmt(rec.norm_r_lsmr) << ',' << fmt(rec.norm_atr_lsmr)
                  << ',' << fmt(rec.norm_x_lsmr) << ',' << fmt(rec.e2_lsmr) << ','
                  << fmt(rec.norm_r_lsqr) << ',' << fmt(rec.norm_atr_lsqr) << ','
                  << fmt(rec.norm_x_lsqr) << ',' << fmt(rec.e2_lsqr) << '\n';
            trace.flush();
        });
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        nlohmann::ordered_json j = summary_json("both-lockstep", both.lsmr, wall);
        j["lsqr"] = summary_json("lsqr", both.lsqr, wall);
        std::cout << j.dump() << "\n";

        result = std::move(both.lsmr);
        if (!args.solution_path.empty()) {
            const std::vector<double> x =
                scaling ? unscale_solution(*scaling, result.x) : result.x;
            write_vector_file(args.solution_path, x);
        }
        return exit_code_for(result.reason);
    }

    // Diagnostics columns beyond the solver's own (e1, mu_tilde) need the
    // dense oracle residual; materialize once per problem at desk scale.
    std::optional<DenseMatrix> dense;
    std::vector<double> r_hat;
    if (opts.diagnostics) {
        if (op.nrows() + op.ncols() <= 1000) {
            dense = DenseMatrix::from_csr(op.matrix());
            const std::vector<double> x_hat = dense_minnorm_solve(*dense, rhs);
            r_hat = dense->multiply(x_hat);
            for (std::size_t i = 0; i < r_hat.size(); ++i) r_hat[i] = rhs[i] - r_hat[i];
        } else {
            std::cerr << "lsqkit: problem too large for e1/mu_tilde oracle columns; "
                         "writing zeros\n";
        }
    }

    if (trace.is_open()) {
        trace << "k,normr_est,normAr_est,normx_est,normA_est,cond_est";
        if (opts.diagnostics)
            trace << ",normr_true,normAr_true,lemma31_resid,e1,e2,mu_tilde";
        trace << '\n';
        trace.flush();
    }

    TraceSink sink;
    if (trace.is_open()) {
        sink = [&](const IterationRecord& rec, std::span<const double> x) {
            trace << rec.k << ',' << fmt(rec.norm_r_est) << ',' << fmt(rec.norm_atr_est)
                  << ',' << fmt(rec.norm_x_est) << ',' << fmt(rec.norm_a_est) << ','
                  << fmt(rec.cond_est);
            if (opts.diagnostics) {
                double e1 = 0.0, mu = 0.0;
                if (dense && norm2(x) > 0.0) {
                    std::vector<double> r = dense->multiply(x);
                    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
                    e1 = stewart_e1(x, r, r_hat).value;
                    mu = optimal_backward_error(*dense, rhs, x);
                }
                trace << ',' << fmt(rec.norm_r_true) << ',' << fmt(rec.norm_atr_true) << ','
                      << fmt(rec.lemma31_residual) << ',' << fmt(e1) << ',' << fmt(rec.e2)
                      << ',' << fmt(mu);
            }
            trace << '\n';
            trace.flush();
        };
    }

    if (args.solver == "lsmr") {
        result = lsmr_solve(op, rhs, opts, sink);
    } else if (args.solver == "lsqr") {
        result = lsqr_solve(op, rhs, opts, sink);
    } else {
        throw std::runtime_error("solve: unknown solver '" + args.solver + "'");
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!args.solution_path.empty()) {
        const std::vector<double> x = scaling ? unscale_solution(*scaling, result.x) : result.x;
        write_vector_file(args.solution_path, x);
    }

    std::cout << summary_json(args.solver, result, wall).dump() << "\n";
    return exit_code_for(result.reason);
}

struct GenerateArgs {
    std::uint64_t seed = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t rank = 0;
    double cond = 1.0;
    bool consistent = false;
    std::string matrix_path;
    std::string rhs_path;
};

int run_generate(const GenerateArgs& args) {
    GenerateSpec spec;
    spec.seed = args.seed;
    spec.nrows = args.rows;
    spec.ncols = args.cols;
    spec.rank = args.rank;
    spec.cond = args.cond;
    spec.consistent = args.consistent;
    const GeneratedProblem p = generate_problem(spec);

    std::vector<CsrMatrix::Triplet> t;
    for (std::size_t i = 0; i < p.a.nrows; ++i)
        for (std::size_t j = 0; j < p.a.ncols; ++j)
            if (p.a.at(i, j) != 0.0) t.push_back({i, j, p.a.at(i, j)});
    write_matrix_market(args.matrix_path,
                        CsrMatrix::from_triplets(p.a.nrows, p.a.ncols, std::move(t)));
    write_vector_file(args.rhs_path, p.b);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lsqkit: iterative sparse least-squares solvers (LSMR/LSQR)"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "solve min ||Ax - b|| from files");
    solve->add_option("--matrix", solve_args.matrix_path, "Matrix Market file")->required();
    solve->add_option("--rhs", solve_args.rhs_path, "rhs file, one number per line");
    solve->add_option("--rhs-mode", solve_args.rhs_mode,
                      "file | ones | from-matrix-objective (transpose matrix, rhs = objective)")
        ->check(CLI::IsMember({"file", "ones", "from-matrix-objective"}));
    solve->add_option("--solver", solve_args.solver, "lsmr | lsqr | both-lockstep")
        ->check(CLI::IsMember({"lsmr", "lsqr", "both-lockstep"}));
    solve->add_option("--lambda", solve_args.lambda, "Tikhonov damping (default 0)");
    solve->add_option("--atol", solve_args.atol, "ATOL (default 1e-6)");
    solve->add_option("--btol", solve_args.btol, "BTOL (default 1e-6)");
    solve->add_option("--conlim", solve_args.conlim, "condition limit (default 1e8)");
    solve->add_option("--max-iter", solve_args.max_iter,
                      "iteration limit (default 4*min(m,n))");
    solve->add_option("--reorth", solve_args.reorth,
                      "none|v|u|both|local:<L>|restart:<L> (default none)");
    solve->add_flag("--scale", solve_args.scale,
                    "column-scale A and b to unit norms before solving; the solution "
                    "file is mapped back to original coordinates");
    solve->add_flag("--diagnostics", solve_args.diagnostics,
                    "add true-norm, chain-consistency and backward-error trace columns");
    solve->add_option("--trace", solve_args.trace_path, "stream per-iteration CSV here");
    solve->add_option("--solution", solve_args.solution_path,
                      "write the solution vector here, one number per line");

    GenerateArgs gen_args;
    CLI::App* gen = app.add_subcommand("generate", "write a seeded synthetic problem");
    gen->add_option("--seed", gen_args.seed, "rng seed")->required();
    gen->add_option("--rows", gen_args.rows, "rows")->required();
    gen->add_option("--cols", gen_args.cols, "cols")->required();
    gen->add_option("--rank", gen_args.rank, "rank (default full)");
    gen->add_option("--cond", gen_args.cond, "condition number of the nonzero spectrum");
    gen->add_flag("--consistent", gen_args.consistent, "make b = A x exactly");
    gen->add_option("--out-matrix", gen_args.matrix_path, "output Matrix Market path")
        ->required();
    gen->add_option("--out-rhs", gen_args.rhs_path, "output rhs path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors exit 1; --help exits 0
    }

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (gen->parsed()) return run_generate(gen_args);
    } catch (const std::exception& e) {
        std::cerr << "lsqkit: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
