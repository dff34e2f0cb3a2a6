/// @file lsqr.hpp
/// @brief Reference LSQR implementation on the shared Golub-Kahan engine,
///        used as the comparison baseline for the backward-error ordering
///        between the two solvers, plus a lockstep runner that advances both
///        solvers on one bidiagonalization.

#pragma once

#include <functional>
#include <span>

#include "lsqkit/linop.hpp"
#include "lsqkit/lsmr.hpp"
#include "lsqkit/solver_types.hpp"

namespace lsqkit {

/// LSQR's single-QR recurrence with standard damping, advanced from an
/// externally driven bidiagonalization. Chooses y_k to minimize ||r_k||
/// over the same Krylov subspace LSMR works in.
class LsqrStepper {
public:
    LsqrStepper(double beta1, double alpha1, std::span<const double> v1, double lambda,
                WorkStats* stats = nullptr);

    void step(double alpha_next, double beta_next, std::span<const double> v_next);

    std::size_t k() const { return k_; }
    std::span<const double> x() const { return x_; }
    double norm_r() const { return norm_r_; }
    double norm_atr() const { return norm_atr_; }
    double norm_x() const { return norm_x_; }
    double norm_a() const { return norm_a_; }
    double cond_a() const { return cond_a_; }

    bool scalars_finite() const;

private:
    double lambda_;
    std::size_t n_;
    std::size_t k_ = 0;

    std::vector<double> x_;
    std::vector<double> w_;

    double phibar_, rhobar_;
    double cs2_ = -1.0, sn2_ = 0.0, z_ = 0.0, xxnorm_ = 0.0;  // ||x|| chain
    double ddnorm_ = 0.0;  // sum ||w_k / rho_k||^2, drives the cond estimate
    double res2_ = 0.0;    // damped residual contribution, sum of psi^2
    double fro2_;

    double norm_r_, norm_atr_, norm_x_ = 0.0, norm_a_, cond_a_ = 1.0;
};

/// Solve min ||(A; lambda I) x - (b; 0)|| with LSQR. Same stopping rules,
/// reorthogonalization modes and trace contract as lsmr_solve.
SolveResult lsqr_solve(const LinearOperator& a, std::span<const double> b,
                       const SolveOptions& opts, const TraceSink& sink = {},
                       WorkStats* stats = nullptr);

/// Per-iteration comparison row from the lockstep runner. e2 is the
/// Stewart backward-error ratio ||A^T r|| / ||r|| formed from each solver's
/// own estimates.
struct LockstepRecord {
    std::size_t k = 0;
    double norm_r_lsmr = 0.0, norm_atr_lsmr = 0.0, norm_x_lsmr = 0.0, e2_lsmr = 0.0;
    double norm_r_lsqr = 0.0, norm_atr_lsqr = 0.0, norm_x_lsqr = 0.0, e2_lsqr = 0.0;
};
using LockstepSink = std::function<void(const LockstepRecord&)>;

struct LockstepResult {
    SolveResult lsmr;
    SolveResult lsqr;
};

/// Advance LSMR and LSQR on a single shared bidiagonalization so both
/// consume identical alpha/beta sequences; comparisons are then purely
/// about the choice of y_k. Each solver's result is frozen at its own
/// first stop; stepping continues until both have stopped.
LockstepResult solve_lockstep(const LinearOperator& a, std::span<const double> b,
                              const SolveOptions& opts, const LockstepSink& sink = {});

}  // namespace lsqkit
