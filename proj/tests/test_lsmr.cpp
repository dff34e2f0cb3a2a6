#include <doctest.h>

#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "lsqkit/backerr.hpp"
#include "lsqkit/generate.hpp"
#include "lsqkit/gk_bidiag.hpp"
#include "lsqkit/lsmr.hpp"
#include "lsqkit/vec.hpp"
#include "support/reference_lsmr.hpp"
#include "support/test_util.hpp"

using namespace lsqkit;
using namespace lsqkit::testing;

namespace {

struct TraceRow {
    IterationRecord rec;
    std::vector<double> x;
};

std::vector<TraceRow> trace_of(const LinearOperator& a, std::span<const double> b,
                               const SolveOptions& opts, SolveResult* out = nullptr) {
    std::vector<TraceRow> rows;
    const SolveResult res = lsmr_solve(a, b, opts, [&](const IterationRecord& r,
                                                       std::span<const double> x) {
        rows.push_back({r, std::vector<double>(x.begin(), x.end())});
    });
    if (out) *out = res;
    return rows;
}

}  // namespace

TEST_CASE("identity solves in one iteration by consistent breakdown") {
    CsrOperator a(CsrMatrix::identity(3));
    const std::vector<double> b{1.0, 2.0, 3.0};
    const SolveResult res = lsmr_solve(a, b, {});
    CHECK(res.reason == StopReason::BreakdownConsistent);
    CHECK(res.iterations == 1);
    for (std::size_t i = 0; i < 3; ++i) CHECK(res.x[i] == doctest::Approx(b[i]).epsilon(1e-12));
    CHECK(res.norm_a == doctest::Approx(1.0));
    CHECK(res.cond_a == doctest::Approx(1.0));
    CHECK(res.norm_x == doctest::Approx(norm2(b)).epsilon(1e-12));
}

TEST_CASE("averaging problem: x = 1 with exact least-squares breakdown") {
    DenseOperator a(2, 1, {1.0, 1.0});
    const std::vector<double> b{2.0, 0.0};
    const SolveResult res = lsmr_solve(a, b, {});
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(res.norm_r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK((res.reason == StopReason::BreakdownLs ||
           res.reason == StopReason::S2LeastSquares));
}

TEST_CASE("regularized scalar problem: minimize (x-1)^2 + x^2") {
    DenseOperator a(1, 1, {1.0});
    const std::vector<double> b{1.0};
    SolveOptions opts;
    opts.lambda = 1.0;
    const SolveResult res = lsmr_solve(a, b, opts);
    CHECK(res.x[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(res.norm_r == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("singular consistent system returns the minimum-norm solution") {
    DenseOperator a(2, 2, {1.0, 1.0, 1.0, 1.0});
    const std::vector<double> b{2.0, 2.0};
    const SolveResult res = lsmr_solve(a, b, {});
    CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.reason == StopReason::BreakdownConsistent);
}

TEST_CASE("b = 0 returns x = 0 immediately") {
    CsrOperator a(CsrMatrix::identity(4));
    const std::vector<double> b(4, 0.0);
    const SolveResult res = lsmr_solve(a, b, {});
    CHECK(res.reason == StopReason::BZero);
    CHECK(res.iterations == 0);
    CHECK(norm2(res.x) == 0.0);
}

TEST_CASE("A^T b = 0 returns x = 0 as an exact LS solution") {
    DenseOperator a(2, 1, {1.0, -1.0});
    const std::vector<double> b{1.0, 1.0};
    const SolveResult res = lsmr_solve(a, b, {});
    CHECK(res.reason == StopReason::BreakdownLs);
    CHECK(res.iterations == 0);
    CHECK(res.x[0] == 0.0);
    CHECK(res.norm_r == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("first-iteration scalars match the dense 2x2 oracle") {
    // For A = diag(1, 2), b = (1, 1): alpha_1 = sqrt(5/2), beta_2 = 3/sqrt(10),
    // so rho_1 = sqrt(alpha_1^2 + beta_2^2) = sqrt(3.4); with no damping this
    // equals ||B_1||_F, which the k = 1 trace row reports as normA_est.
    DenseOperator a(2, 2, {1.0, 0.0, 0.0, 2.0});
    const std::vector<double> b{1.0, 1.0};
    SolveOptions opts;
    opts.atol = 1e-14;
    opts.btol = 1e-14;
    const std::vector<TraceRow> rows = trace_of(a, b, opts);
    REQUIRE(rows.size() >= 1);
    const double rho1 = std::sqrt(3.4);
    CHECK(rho1 == doctest::Approx(1.8439088914585775).epsilon(1e-15));
    CHECK(rows[0].rec.norm_a_est == doctest::Approx(rho1).epsilon(1e-14));
    // The k = 1 row reports |zetabar_2| <= zetabar_1 = alpha_1 beta_1 = sqrt(5).
    CHECK(rows[0].rec.norm_atr_est <= std::sqrt(5.0));
}

TEST_CASE("random 50x20 problem matches the dense LS oracle") {
    GenerateSpec spec;
    spec.seed = 2024;
    spec.nrows = 50;
    spec.ncols = 20;
    spec.cond = 100.0;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);

    SolveOptions opts;
    opts.atol = 1e-12;
    opts.btol = 1e-12;
    opts.max_iter = 400;
    const SolveResult res = lsmr_solve(a, p.b, opts);
    const std::vector<double> oracle = dense_ls_solve(p.a, p.b);
    CHECK(rel_err(res.x, oracle) <= 1e-8);
}

TEST_CASE("normAr_est is exactly nonincreasing") {
    GenerateSpec spec;
    spec.seed = 31;
    spec.nrows = 40;
    spec.ncols = 25;
    spec.cond = 1e4;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);
    SolveOptions opts;
    opts.atol = 0.0;
    opts.btol = 0.0;
    opts.conlim = std::numeric_limits<double>::infinity();
    opts.max_iter = 120;
    const std::vector<TraceRow> rows = trace_of(a, p.b, opts);
    REQUIRE(rows.size() > 10);
    double prev = std::numeric_limits<double>::infinity();
    for (const TraceRow& row : rows) {
        CHECK(row.rec.norm_atr_est <= prev);
        prev = row.rec.norm_atr_est;
    }
}

TEST_CASE("estimator fidelity with full reorthogonalization (30x10)") {
    GenerateSpec spec;
    spec.seed = 88;
    spec.nrows = 30;
    spec.ncols = 10;
    spec.cond = 50.0;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);
    const double fro = p.a.frobenius_norm();
    const double normb = norm2(p.b);

    SolveOptions opts;
    opts.atol = 1e-13;
    opts.btol = 1e-13;
    opts.reorth = ReorthMode::both();
    opts.diagnostics = true;
    opts.max_iter = 40;

    const std::vector<TraceRow> rows = trace_of(a, p.b, opts);
    REQUIRE(!rows.empty());
    for (const TraceRow& row : rows) {
        const std::vector<double> r = residual(p.a, p.b, row.x);
        const double nr = norm2(r);
        const double natr = norm2(p.a.multiply_transpose(r));
        const double nx = norm2(row.x);
        CHECK(std::abs(row.rec.norm_r_est - nr) <= 1e-10 * (normb + fro * nx));
        CHECK(std::abs(row.rec.norm_atr_est - natr) <= 1e-8 * fro * std::max(nr, 1e-300));
        CHECK(std::abs(row.rec.norm_x_est - nx) <= 1e-10 * std::max(nx, 1e-300));
        // Diagnostics columns carry the same directly computed values.
        CHECK(row.rec.norm_r_true == doctest::Approx(nr).epsilon(1e-12));
        CHECK(row.rec.norm_atr_true == doctest::Approx(natr).epsilon(1e-10));
    }
}

TEST_CASE("lemma31_resid consistency column stays at roundoff in diagnostic runs") {
    GenerateSpec spec;
    spec.seed = 97;
    spec.nrows = 35;
    spec.ncols = 18;
    spec.cond = 1e3;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);
    const double normb = norm2(p.b);

    SolveOptions opts;
    opts.diagnostics = true;
    opts.reorth = ReorthMode::both();
    opts.atol = 1e-12;
    opts.btol = 1e-12;
    const std::vector<TraceRow> rows = trace_of(a, p.b, opts);
    REQUIRE(!rows.empty());
    for (const TraceRow& row : rows) CHECK(row.rec.lemma31_residual <= 1e-12 * normb);
}

TEST_CASE("norm_x chain base cases") {
    CsrOperator ident(CsrMatrix::identity(3));
    const std::vector<double> b{1.0, 2.0, 3.0};
    const std::vector<TraceRow> rows = trace_of(ident, b, {});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].rec.norm_x_est == doctest::Approx(norm2(b)).epsilon(1e-13));

    GenerateSpec spec;
    spec.seed = 12;
    spec.nrows = 9;
    spec.ncols = 6;
    spec.cond = 5.0;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);
    const std::vector<TraceRow> prows = trace_of(a, p.b, {});
    REQUIRE(!prows.empty());
    CHECK(prows[0].rec.norm_x_est == doctest::Approx(norm2(prows[0].x)).epsilon(1e-12));
}

TEST_CASE("regularized solve equals the explicit augmented-system solve") {
    for (double lambda : {0.1, 1.0, 10.0}) {
        GenerateSpec spec;
        spec.seed = 500 + static_cast<std::uint64_t>(lambda * 10);
        spec.nrows = 20;
        spec.ncols = 10;
        spec.cond = 100.0;
        const GeneratedProblem p = generate_problem(spec);
        DenseOperator a = dense_op(p.a);

        SolveOptions damped;
        damped.lambda = lambda;
        damped.atol = 1e-13;
        damped.btol = 1e-13;
        damped.reorth = ReorthMode::both();
        const SolveResult dres = lsmr_solve(a, p.b, damped);

        DenseMatrix stacked(30, 10);
        for (std::size_t i = 0; i < 20; ++i)
            for (std::size_t j = 0; j < 10; ++j) stacked.at(i, j) = p.a.at(i, j);
        for (std::size_t j = 0; j < 10; ++j) stacked.at(20 + j, j) = lambda;
        DenseOperator aug = dense_op(stacked);
        std::vector<double> b_aug(30, 0.0);
        std::copy(p.b.begin(), p.b.end(), b_aug.begin());
        SolveOptions plain;
        plain.atol = 1e-13;
        plain.btol = 1e-13;
        plain.reorth = ReorthMode::both();
        const SolveResult ares = lsmr_solve(aug, b_aug, plain);

        CHECK(rel_err(dres.x, ares.x) <= 1e-8);
        CHECK(dres.norm_r == doctest::Approx(ares.norm_r).epsilon(1e-8));
    }
}

TEST_CASE("lambda = 0 path is bitwise identical to the reference recurrence") {
    for (std::uint64_t seed : {1ULL, 2ULL}) {
        GenerateSpec spec;
        spec.seed = seed;
        spec.nrows = 25;
        spec.ncols = 12;
        spec.cond = 30.0;
        const GeneratedProblem p = generate_problem(spec);
        DenseOperator a = dense_op(p.a);

        SolveOptions opts;
        opts.atol = 1e-12;
        opts.btol = 1e-12;
        opts.max_iter = 30;
        const std::vector<TraceRow> rows = trace_of(a, p.b, opts);
        REQUIRE(!rows.empty());

        GolubKahan gk(a, p.b, {});
        ReferenceLsmr ref(gk.beta1(), gk.alpha1(), gk.v());
        for (const TraceRow& row : rows) {
            const GkStep s = gk.step();
            const bool broke = s.beta_breakdown || s.alpha_breakdown;
            ref.step(s.alpha_next, s.beta_next,
                     broke ? std::span<const double>() : gk.v());
            CHECK(row.rec.norm_r_est == ref.norm_r());
            CHECK(row.rec.norm_atr_est == ref.norm_atr());
            REQUIRE(row.x.size() == ref.x().size());
            for (std::size_t i = 0; i < row.x.size(); ++i) CHECK(row.x[i] == ref.x()[i]);
        }
    }
}

TEST_CASE("rank-deficient systems converge to the pseudoinverse solution") {
    for (bool consistent : {true, false}) {
        GenerateSpec spec;
        spec.seed = consistent ? 71 : 72;
        spec.nrows = 12;
        spec.ncols = 9;
        spec.rank = 4;
        spec.cond = 10.0;
        spec.consistent = consistent;
        const GeneratedProblem p = generate_problem(spec);
        DenseOperator a = dense_op(p.a);

        SolveOptions opts;
        opts.atol = 1e-12;
        opts.btol = 1e-12;
        opts.reorth = ReorthMode::both();
        const SolveResult res = lsmr_solve(a, p.b, opts);
        const std::vector<double> pinv = dense_minnorm_solve(p.a, p.b);
        CHECK(rel_err(res.x, pinv) <= 1e-6);
    }
}

TEST_CASE("storage discipline and one forward + one adjoint product per iteration") {
    GenerateSpec spec;
    spec.seed = 1234;
    spec.nrows = 30;
    spec.ncols = 14;
    spec.cond = 20.0;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator inner = dense_op(p.a);
    CountingOperator a(inner);

    SolveOptions opts;
    opts.atol = 1e-10;
    opts.btol = 1e-10;
    WorkStats stats;
    const SolveResult res = lsmr_solve(a, p.b, opts, {}, &stats);

    // {x, v, h, hbar} of length n; {u, Av workspace} of length m.
    CHECK(stats.n_buffers == 4);
    CHECK(stats.m_buffers == 2);
    // One adjoint at initialization, then one forward and one adjoint per
    // iteration (a beta breakdown skips that step's adjoint).
    CHECK(a.forward_calls == res.iterations);
    CHECK(a.adjoint_calls >= res.iterations);
    CHECK(a.adjoint_calls <= res.iterations + 1);
}

TEST_CASE("non-finite operator values abort with the iteration index") {
    DenseOperator a(2, 2, {1.0, 0.0, 0.0, std::numeric_limits<double>::quiet_NaN()});
    const std::vector<double> b{1.0, 1.0};
    CHECK_THROWS_WITH_AS(lsmr_solve(a, b, {}), doctest::Contains("iteration"),
                         std::runtime_error);
}

TEST_CASE("option validation") {
    CsrOperator a(CsrMatrix::identity(2));
    const std::vector<double> b{1.0, 1.0};
    SolveOptions bad;
    bad.atol = 1.5;
    CHECK_THROWS_AS(lsmr_solve(a, b, bad), std::invalid_argument);
    bad = {};
    bad.conlim = 0.5;
    CHECK_THROWS_AS(lsmr_solve(a, b, bad), std::invalid_argument);
    bad = {};
    bad.lambda = -1.0;
    CHECK_THROWS_AS(lsmr_solve(a, b, bad), std::invalid_argument);

    const std::vector<double> wrong(3, 1.0);
    CHECK_THROWS_AS(lsmr_solve(a, wrong, {}), std::invalid_argument);
}

TEST_CASE("norm_x chain holds machine precision even when ill-conditioned") {
    GenerateSpec spec;
    spec.seed = 99;
    spec.nrows = 60;
    spec.ncols = 30;
    spec.cond = 1e8;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);
    SolveOptions opts;
    opts.atol = 0.0;
    opts.btol = 0.0;
    opts.conlim = std::numeric_limits<double>::infinity();
    opts.reorth = ReorthMode::both();
    opts.max_iter = 30;
    const std::vector<TraceRow> rows = trace_of(a, p.b, opts);
    REQUIRE(rows.size() == 30);
    for (const TraceRow& row : rows) {
        const double nx = norm2(row.x);
        CHECK(std::abs(row.rec.norm_x_est - nx) <= 1e-12 * nx);
    }
}

TEST_CASE("local reorthogonalization: small windows idle, larger ones speed up") {
    GenerateSpec spec;
    spec.seed = 909;
    spec.nrows = 100;
    spec.ncols = 50;
    spec.cond = 1e6;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);
    SolveOptions opts;
    opts.atol = 1e-8;
    opts.btol = 1e-8;
    opts.max_iter = 4000;

    const std::size_t k_none = lsmr_solve(a, p.b, opts).iterations;
    opts.reorth = ReorthMode::local(5);
    const std::size_t k_local5 = lsmr_solve(a, p.b, opts).iterations;
    opts.reorth = ReorthMode::local(25);
    const std::size_t k_local25 = lsmr_solve(a, p.b, opts).iterations;
    opts.reorth = ReorthMode::both();
    const std::size_t k_both = lsmr_solve(a, p.b, opts).iterations;

    // A window of 5 changes little; 25 buys a partial speedup; full
    // reorthogonalization converges near the subspace dimension.
    CHECK(k_local5 <= k_none + k_none / 4);
    CHECK(k_local25 < k_none);
    CHECK(k_both < k_local25);
}

TEST_CASE("norm and cond estimates stay within the oracle bounds") {
    GenerateSpec spec;
    spec.seed = 404;
    spec.nrows = 40;
    spec.ncols = 10;
    spec.cond = 200.0;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);
    const double fro = p.a.frobenius_norm();
    const SvdResult svd = jacobi_svd(p.a);
    const double cond2 = svd.singular_values.front() / svd.singular_values.back();

    SolveOptions opts;
    opts.atol = 0.0;
    opts.btol = 0.0;
    opts.conlim = std::numeric_limits<double>::infinity();
    opts.reorth = ReorthMode::both();
    opts.max_iter = 10;  // run the bidiagonalization to completion (k = n)
    double last_norm_a = 0.0, last_cond = 0.0;
    (void)lsmr_solve(a, p.b, opts, [&](const IterationRecord& rec, std::span<const double>) {
        CHECK(rec.norm_a_est <= fro * (1.0 + 1e-12));
        CHECK(rec.cond_est <= cond2 * 10.0);
        last_norm_a = rec.norm_a_est;
        last_cond = rec.cond_est;
    });
    // At completion the factor carries the whole Frobenius mass and the QLP
    // diagonals have seen both spectral extremes.
    CHECK(last_norm_a == doctest::Approx(fro).epsilon(1e-10));
    CHECK(last_cond >= cond2 / 10.0);
}

TEST_CASE("zero tolerances stop at machine precision instead of stalling") {
    GenerateSpec spec;
    spec.seed = 27;
    spec.nrows = 24;
    spec.ncols = 12;
    spec.cond = 10.0;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);
    SolveOptions opts;
    opts.atol = 0.0;
    opts.btol = 0.0;
    opts.conlim = std::numeric_limits<double>::infinity();
    opts.max_iter = 100000;
    opts.reorth = ReorthMode::both();
    const SolveResult res = lsmr_solve(a, p.b, opts);
    CHECK((res.reason == StopReason::S1Eps || res.reason == StopReason::S2Eps ||
           res.reason == StopReason::BreakdownConsistent ||
           res.reason == StopReason::BreakdownLs));
    CHECK(res.iterations < 1000);
}

TEST_CASE("independent solves can share one immutable operator concurrently") {
    GenerateSpec spec;
    spec.seed = 58;
    spec.nrows = 40;
    spec.ncols = 16;
    spec.cond = 50.0;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);
    SolveOptions opts;
    opts.atol = 1e-10;
    opts.btol = 1e-10;

    const SolveResult serial = lsmr_solve(a, p.b, opts);
    std::vector<SolveResult> results(4);
    {
        std::vector<std::thread> workers;
        for (auto& slot : results)
            workers.emplace_back([&, out = &slot] { *out = lsmr_solve(a, p.b, opts); });
        for (auto& w : workers) w.join();
    }
    for (const SolveResult& r : results) {
        CHECK(r.iterations == serial.iterations);
        for (std::size_t i = 0; i < r.x.size(); ++i) CHECK(r.x[i] == serial.x[i]);
    }
}

TEST_CASE("iteration limit reports MAX_ITER") {
    GenerateSpec spec;
    spec.seed = 3;
    spec.nrows = 40;
    spec.ncols = 30;
    spec.cond = 1e6;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);
    SolveOptions opts;
    opts.atol = 1e-14;
    opts.btol = 1e-14;
    opts.max_iter = 1;
    const SolveResult res = lsmr_solve(a, p.b, opts);
    CHECK(res.reason == StopReason::MaxIter);
    CHECK(res.iterations == 1);
}

TEST_CASE("conlim triggers S3 on an ill-conditioned problem") {
    GenerateSpec spec;
    spec.seed = 41;
    spec.nrows = 30;
    spec.ncols = 20;
    spec.cond = 1e7;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);
    SolveOptions opts;
    opts.conlim = 100.0;
    opts.atol = 1e-14;
    opts.btol = 1e-14;
    const SolveResult res = lsmr_solve(a, p.b, opts);
    CHECK(res.reason == StopReason::S3CondLimit);
}

TEST_CASE("restart with a long period behaves like the plain solver on identity") {
    CsrOperator a(CsrMatrix::identity(3));
    const std::vector<double> b{1.0, 2.0, 3.0};
    SolveOptions opts;
    opts.reorth = ReorthMode::restart(10);
    const SolveResult res = lsmr_solve(a, b, opts);  // delegates to the restarted driver
    CHECK(res.iterations == 1);
    for (std::size_t i = 0; i < 3; ++i) CHECK(res.x[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("damped restart matches the plain damped solve") {
    GenerateSpec spec;
    spec.seed = 321;
    spec.nrows = 24;
    spec.ncols = 10;
    spec.cond = 30.0;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);

    SolveOptions damped;
    damped.lambda = 0.5;
    damped.atol = 1e-12;
    damped.btol = 1e-12;
    const SolveResult plain = lsmr_solve(a, p.b, damped);

    SolveOptions restarted = damped;
    restarted.reorth = ReorthMode::restart(6);
    restarted.max_iter = 600;
    const SolveResult res = lsmr_solve_restarted(a, p.b, restarted);
    CHECK(rel_err(res.x, plain.x) <= 1e-8);
    CHECK(res.norm_r == doctest::Approx(plain.norm_r).epsilon(1e-8));

    // Mode mismatches are rejected up front.
    CHECK_THROWS_AS(lsmr_solve_restarted(a, p.b, damped), std::invalid_argument);
}

TEST_CASE("restart(5) stagnates relative to plain LSMR on a hard problem") {
    GenerateSpec spec;
    spec.seed = 909;
    spec.nrows = 100;
    spec.ncols = 50;
    spec.cond = 1e6;
    const GeneratedProblem p = generate_problem(spec);
    DenseOperator a = dense_op(p.a);

    SolveOptions plain;
    plain.atol = 1e-8;
    plain.btol = 1e-8;
    plain.max_iter = 4000;
    const SolveResult pres = lsmr_solve(a, p.b, plain);
    REQUIRE(pres.reason != StopReason::MaxIter);

    SolveOptions restarted = plain;
    restarted.reorth = ReorthMode::restart(5);
    double prev_atr = std::numeric_limits<double>::infinity();
    const SolveResult rres = lsmr_solve_restarted(
        a, p.b, restarted, [&](const IterationRecord& rec, std::span<const double>) {
            // Within a segment the normAr estimate is nonincreasing; only a
            // restart boundary may raise it.
            if (rec.norm_atr_est > prev_atr) CHECK((rec.k - 1) % 5 == 0);
            prev_atr = rec.norm_atr_est;
        });
    CHECK(rres.iterations >= pres.iterations);
}
