/// @file lsmr.hpp
/// @brief The LSMR solver: Golub-Kahan bidiagonalization plus the rotation
///        recurrences that minimize ||A^T r_k|| over the Krylov subspace,
///        with O(1)-per-iteration estimates of ||r_k||, ||A^T r_k||, ||x_k||,
///        ||A|| and cond(A) driving the stopping rules.

#pragma once

#include <span>

#include "lsqkit/linop.hpp"
#include "lsqkit/solver_types.hpp"

namespace lsqkit {

/// Plane rotation (c, s, r) with c*a + s*b = r, -s*a + c*b = 0, c^2+s^2 = 1
/// and r >= 0, computed without overflow by scaling with max(|a|,|b|).
/// Convention: sym_ortho(0, 0) = (1, 0, 0). The construction guarantees
/// |s| <= 1 and |c| <= 1 exactly as computed.
struct GivensRotation {
    double c;
    double s;
    double r;
};
GivensRotation sym_ortho(double a, double b);

/// One LSMR iteration's scalar recurrences, advanced from an externally
/// driven bidiagonalization. Used directly by lsmr_solve and by the
/// LSMR/LSQR lockstep runner, which shares one Golub-Kahan process.
class LsmrStepper {
public:
    /// beta1, alpha1, v1 from the Golub-Kahan initialization.
    LsmrStepper(double beta1, double alpha1, std::span<const double> v1, double lambda,
                WorkStats* stats = nullptr);

    /// Advance with fresh alpha_{k+1}, beta_{k+1}. v_next carries v_{k+1}
    /// and must be empty when the bidiagonalization broke down (the h update
    /// is skipped; the solve terminates after this step).
    void step(double alpha_next, double beta_next, std::span<const double> v_next);

    std::size_t k() const { return k_; }
    std::span<const double> x() const { return x_; }
    double norm_r() const { return norm_r_; }
    double norm_atr() const { return norm_atr_; }
    double norm_x() const { return norm_x_; }
    double norm_a() const { return norm_a_; }
    double cond_a() const { return cond_a_; }
    /// Running max |tau~_i - beta~_i| over finalized indices: the rhs chain
    /// and the forward substitution agree entrywise in exact arithmetic, so
    /// this measures accumulated rounding in the recurrences.
    double lemma31_residual() const { return lemma31_max_; }

    bool scalars_finite() const;

private:
    double lambda_;
    std::size_t n_;
    std::size_t k_ = 0;

    // Persistent work vectors: x, h, hbar (v lives in the bidiagonalization).
    std::vector<double> x_;
    std::vector<double> h_;
    std::vector<double> hbar_;

    // Main recurrence.
    double alphabar_, rho_ = 1.0, rhobar_ = 1.0, cbar_ = 1.0, sbar_ = 0.0;
    double zetabar_;

    // Residual-norm chain.
    double betadd_, betad_ = 0.0, rhodot_ = 1.0;
    double tautilde_ = 0.0, thetatilde_ = 0.0, d_ = 0.0;
    double zeta_prev_ = 0.0;
    double lemma31_max_ = 0.0;

    // ||A|| / cond chain.
    double fro2_;
    double max_rbar_ = 0.0;
    double min_rbar_;

    // ||x|| chain: LQ factorization of the product of the two bidiagonal
    // R factors, updated by two column rotations per iteration. Live
    // trailing entries (p, q, r) plus short histories of finalized rows.
    double xl_p_ = 1.0, xl_q_ = 0.0, xl_r_ = 1.0;
    double xl_g_[2] = {0.0, 0.0};     // L(j, j-2) for j = k-1, k
    double xl_sigma_carry_ = 0.0;     // L(k-1, k-2), finalized one step late
    double xl_w_[2] = {0.0, 0.0};     // finalized w_{k-4}, w_{k-3}
    double xl_zeta_[2] = {0.0, 0.0};  // zeta_{k-2}, zeta_{k-1}
    double xl_sum2_ = 0.0;            // sum of squares of finalized w entries
    double theta_cur_ = 0.0;          // theta_k (previous step's theta_{k+1})
    double thetabar_prev_ = 0.0;      // thetabar_{k-1}

    // Published estimates.
    double norm_r_, norm_atr_, norm_x_ = 0.0, norm_a_, cond_a_ = 1.0;
};

/// Solve min ||(A; lambda I) x - (b; 0)|| (plain least squares when
/// lambda = 0; the minimum-norm solution on singular consistent systems).
/// Each iteration costs exactly one forward and one adjoint product; long
/// vector storage is {x, v, h, hbar} of length n and {u, Av} of length m
/// plus any reorthogonalization buffers. One IterationRecord is pushed to
/// the sink per iteration. A RESTART reorthogonalization mode delegates to
/// lsmr_solve_restarted.
SolveResult lsmr_solve(const LinearOperator& a, std::span<const double> b,
                       const SolveOptions& opts, const TraceSink& sink = {},
                       WorkStats* stats = nullptr);

/// Restarted LSMR: runs segments of l iterations (reorthogonalizing V
/// within each segment) from the current residual, with x carried as a warm
/// start, until a global stopping rule fires at a segment boundary. The
/// global residual is recomputed directly at each boundary.
SolveResult lsmr_solve_restarted(const LinearOperator& a, std::span<const double> b,
                                 const SolveOptions& opts, const TraceSink& sink = {});

}  // namespace lsqkit
