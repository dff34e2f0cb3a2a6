/// @file solver_types.hpp
/// @brief Options, stop reasons, results and trace records shared by the
///        LSMR and LSQR solvers.

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lsqkit/gk_bidiag.hpp"

namespace lsqkit {

struct SolveOptions {
    double atol = 1e-6;
    double btol = 1e-6;
    double conlim = 1e8;  // may be infinity
    double lambda = 0.0;  // Tikhonov damping; solves min ||(A; lambda I) x - (b; 0)||
    std::size_t max_iter = 0;  // 0 means 4 * min(m, n)
    ReorthMode reorth;
    bool diagnostics = false;  // true-norm and chain-consistency trace columns

    void validate() const;
    std::size_t effective_max_iter(std::size_t m, std::size_t n) const;
};

enum class StopReason {
    BZero,                // b = 0; x = 0 is exact
    BreakdownConsistent,  // beta_{k+1} = 0: Ax = b exactly
    BreakdownLs,          // alpha_{k+1} = 0 (or damped breakdown): A^T r = 0 exactly
    S1Compatible,         // ||r|| <= BTOL ||b|| + ATOL ||A|| ||x||
    S2LeastSquares,       // ||A^T r|| <= ATOL ||A|| ||r||
    S3CondLimit,          // cond(A) >= CONLIM (or machine limit)
    S1Eps,                // S1 with machine-precision tolerances
    S2Eps,                // S2 with machine-precision tolerances
    MaxIter,
};

std::string to_string(StopReason reason);

struct SolveResult {
    std::vector<double> x;
    StopReason reason = StopReason::MaxIter;
    std::size_t iterations = 0;
    double norm_r = 0.0;    // final ||r||-bar estimate (augmented system when lambda > 0)
    double norm_atr = 0.0;  // final ||A-bar^T r-bar|| estimate
    double norm_x = 0.0;
    double norm_a = 0.0;    // Frobenius-based ||A-bar|| estimate
    double cond_a = 0.0;
};

/// One trace row per iteration. The diagnostics block is populated only
/// when SolveOptions::diagnostics is set.
struct IterationRecord {
    std::size_t k = 0;
    double norm_r_est = 0.0;
    double norm_atr_est = 0.0;
    double norm_x_est = 0.0;
    double norm_a_est = 0.0;
    double cond_est = 0.0;

    bool has_diagnostics = false;
    double norm_r_true = 0.0;
    double norm_atr_true = 0.0;
    double lemma31_residual = 0.0;  // running max |tau~_i - beta~_i|
    double e2 = 0.0;                // norm_atr_est / norm_r_est
};

/// Push-based trace consumer; receives each record together with the
/// current iterate so diagnostics can be computed downstream.
using TraceSink = std::function<void(const IterationRecord&, std::span<const double> x)>;

inline constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

/// Stopping decision shared by both solvers, evaluated in priority order:
/// breakdown, S1, S2, S3, machine-precision analogues, iteration limit.
/// Returns MaxIter only when k >= max_iter; callers treat "no reason" as
/// StopReason count sentinel via the bool.
struct StopCheck {
    bool stop = false;
    StopReason reason = StopReason::MaxIter;
};
StopCheck check_stop(bool beta_breakdown, bool alpha_breakdown, double lambda, double norm_r,
                     double norm_atr, double norm_x, double norm_a, double cond_a,
                     double norm_b, const SolveOptions& opts, std::size_t k,
                     std::size_t max_iter);

class LinearOperator;

namespace detail {
/// Directly recomputed residual norms for the diagnostics trace columns
/// (augmented-system quantities when lambda > 0). Costs one forward and one
/// adjoint product.
void fill_true_norms(const LinearOperator& a, std::span<const double> b, double lambda,
                     std::span<const double> x, std::vector<double>& r_buf,
                     std::vector<double>& atr_buf, IterationRecord& rec);
}  // namespace detail

}  // namespace lsqkit
