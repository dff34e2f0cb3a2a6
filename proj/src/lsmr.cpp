#include "lsqkit/lsmr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lsqkit/vec.hpp"

namespace lsqkit {

// ---------------------------------------------------------------------------
// Shared solver plumbing (options, stop reasons, stopping decision).
// ---------------------------------------------------------------------------

void SolveOptions::validate() const {
    if (!(atol >= 0.0 && atol < 1.0) || !(btol >= 0.0 && btol < 1.0))
        throw std::invalid_argument("SolveOptions: atol and btol must lie in [0, 1)");
    if (!(conlim > 1.0))  // +inf passes
        throw std::invalid_argument("SolveOptions: conlim must exceed 1 (or be infinite)");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("SolveOptions: lambda must be finite and nonnegative");
}

std::size_t SolveOptions::effective_max_iter(std::size_t m, std::size_t n) const {
    return max_iter != 0 ? max_iter : 4 * std::min(m, n);
}

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::BZero: return "B_ZERO";
        case StopReason::BreakdownConsistent: return "BREAKDOWN_CONSISTENT";
        case StopReason::BreakdownLs: return "BREAKDOWN_LS";
        case StopReason::S1Compatible: return "S1_COMPATIBLE";
        case StopReason::S2LeastSquares: return "S2_LEAST_SQUARES";
        case StopReason::S3CondLimit: return "S3_COND_LIMIT";
        case StopReason::S1Eps: return "S1_EPS";
        case StopReason::S2Eps: return "S2_EPS";
        case StopReason::MaxIter: return "MAX_ITER";
    }
    return "UNKNOWN";
}

StopCheck check_stop(bool beta_breakdown, bool alpha_breakdown, double lambda, double norm_r,
                     double norm_atr, double norm_x, double norm_a, double cond_a,
                     double norm_b, const SolveOptions& opts, std::size_t k,
                     std::size_t max_iter) {
    // An exact Golub-Kahan termination solves the problem: beta = 0 means
    // Ax = b when undamped; with damping, either breakdown leaves an exact
    // regularized LS solution.
    if (beta_breakdown)
        return {true, lambda == 0.0 ? StopReason::BreakdownConsistent : StopReason::BreakdownLs};
    if (alpha_breakdown) return {true, StopReason::BreakdownLs};

    if (norm_r <= opts.btol * norm_b + opts.atol * norm_a * norm_x)
        return {true, StopReason::S1Compatible};
    if (norm_atr <= opts.atol * norm_a * norm_r) return {true, StopReason::S2LeastSquares};
    if (std::isfinite(opts.conlim) && cond_a >= opts.conlim)
        return {true, StopReason::S3CondLimit};

    // Machine-precision analogues guard against tolerances below attainable
    // accuracy; the cond analogue reports as S3.
    if (norm_r <= kMachineEps * (norm_b + norm_a * norm_x)) return {true, StopReason::S1Eps};
    if (norm_atr <= kMachineEps * norm_a * norm_r) return {true, StopReason::S2Eps};
    if (cond_a >= 1.0 / kMachineEps) return {true, StopReason::S3CondLimit};

    if (k >= max_iter) return {true, StopReason::MaxIter};
    return {};
}

// ---------------------------------------------------------------------------
// sym_ortho
// ---------------------------------------------------------------------------

GivensRotation sym_ortho(double a, double b) {
    if (b == 0.0) {
        if (a == 0.0) return {1.0, 0.0, 0.0};
        return {a >= 0.0 ? 1.0 : -1.0, 0.0, std::abs(a)};
    }
    if (a == 0.0) return {0.0, b >= 0.0 ? 1.0 : -1.0, std::abs(b)};
    if (std::abs(b) > std::abs(a)) {
        const double tau = a / b;
        const double s = (b >= 0.0 ? 1.0 : -1.0) / std::sqrt(1.0 + tau * tau);
        return {s * tau, s, b / s};
    }
    const double tau = b / a;
    const double c = (a >= 0.0 ? 1.0 : -1.0) / std::sqrt(1.0 + tau * tau);
    return {c, c * tau, a / c};
}

// ---------------------------------------------------------------------------
// LsmrStepper
// ---------------------------------------------------------------------------

LsmrStepper::LsmrStepper(double beta1, double alpha1, std::span<const double> v1, double lambda,
                         WorkStats* stats)
    : lambda_(lambda),
      n_(v1.size()),
      x_(detail::make_n_buffer(n_, stats)),
      h_(detail::make_n_buffer(n_, stats)),
      hbar_(detail::make_n_buffer(n_, stats)) {
    std::copy(v1.begin(), v1.end(), h_.begin());  // h_1 = v_1
    alphabar_ = alpha1;                           // alphabar_1 = alpha_1
    zetabar_ = alpha1 * beta1;                    // zetabar_1 = alpha_1 beta_1
    betadd_ = beta1;
    fro2_ = alpha1 * alpha1 + lambda * lambda;
    min_rbar_ = std::numeric_limits<double>::infinity();
    norm_r_ = beta1;
    norm_atr_ = zetabar_;
    norm_a_ = std::sqrt(fro2_);
}

void LsmrStepper::step(double alpha_next, double beta_next, std::span<const double> v_next) {
    k_ += 1;

    // Rotation P-hat folds the damping into alphabar (identity when
    // lambda = 0; the fast path keeps the beta chain bitwise identical to
    // the unregularized recurrence).
    double chat = 1.0, shat = 0.0, alphahat = alphabar_;
    if (lambda_ > 0.0) {
        const GivensRotation g = sym_ortho(alphabar_, lambda_);
        chat = g.c;
        shat = g.s;
        alphahat = g.r;
    }

    const double rho_old = rho_;        // rho_{k-1}
    const double rhobar_old = rhobar_;  // rhobar_{k-1}

    // Rotation P_k: rho_k = (alphahat_k^2 + beta_{k+1}^2)^(1/2).
    const GivensRotation pk = sym_ortho(alphahat, beta_next);
    const double c = pk.c, s = pk.s;
    rho_ = pk.r;
    const double theta_next = s * alpha_next;  // theta_{k+1}
    alphabar_ = c * alpha_next;                // alphabar_{k+1}

    // Rotation Pbar_k on the transposed R factor.
    const double thetabar = sbar_ * rho_;   // thetabar_k
    const double cbar_rho = cbar_ * rho_;   // provisional last QLP diagonal
    const GivensRotation pbar = sym_ortho(cbar_rho, theta_next);
    cbar_ = pbar.c;
    sbar_ = pbar.s;
    const double rhobar_new = pbar.r;       // rhobar_k
    const double zeta_k = cbar_ * zetabar_;  // zeta_k
    zetabar_ = -sbar_ * zetabar_;            // zetabar_{k+1}

    // Update hbar, x, h.
    const double hbar_coeff = thetabar * rho_ / (rho_old * rhobar_old);
    for (std::size_t i = 0; i < n_; ++i) hbar_[i] = h_[i] - hbar_coeff * hbar_[i];
    const double x_coeff = zeta_k / (rho_ * rhobar_new);
    for (std::size_t i = 0; i < n_; ++i) x_[i] += x_coeff * hbar_[i];
    if (!v_next.empty()) {
        const double h_coeff = theta_next / rho_;
        for (std::size_t i = 0; i < n_; ++i) h_[i] = v_next[i] - h_coeff * h_[i];
    }

    // Residual-norm chain: apply P-hat_k and P_k to the rhs ...
    const double betaacute = chat * betadd_;
    const double betacheck = -shat * betadd_;
    const double betahat = c * betaacute;
    betadd_ = -s * betaacute;  // betadd_{k+1}

    // ... then rotation Ptilde_{k-1} (a no-op at k = 1 since thetabar = 0).
    const double thetatilde_old = thetatilde_;
    const GivensRotation pt = sym_ortho(rhodot_, thetabar);
    const double ctilde = pt.c, stilde = pt.s;
    const double rhotilde_old = pt.r;          // rhotilde_{k-1}
    thetatilde_ = stilde * rhobar_new;         // thetatilde_k
    rhodot_ = ctilde * rhobar_new;             // rhodot_k
    const double betatilde_prev = ctilde * betad_ + stilde * betahat;  // betatilde_{k-1}
    betad_ = -stilde * betad_ + ctilde * betahat;                      // betad_k

    // Forward substitution for t-tilde, then ||r_k||.
    tautilde_ = (zeta_prev_ - thetatilde_old * tautilde_) / rhotilde_old;  // tautilde_{k-1}
    const double taud = (zeta_k - thetatilde_ * tautilde_) / rhodot_;      // taudot_k
    if (k_ >= 2)
        lemma31_max_ = std::max(lemma31_max_, std::abs(tautilde_ - betatilde_prev));
    d_ += betacheck * betacheck;
    norm_r_ = std::sqrt(d_ + (betad_ - taud) * (betad_ - taud) + betadd_ * betadd_);

    // ||A^T r_k|| = |zetabar_{k+1}|, monotone by construction.
    norm_atr_ = std::abs(zetabar_);

    // Frobenius accumulation for ||A||; with damping each column also
    // carries a lambda entry.
    fro2_ += beta_next * beta_next;
    norm_a_ = std::sqrt(fro2_);
    fro2_ += alpha_next * alpha_next + lambda_ * lambda_;

    // cond(A) from the QLP diagonals: finalized rhobar_1..rhobar_{k-1}
    // against the provisional cbar_{k-1} rho_k, which changes every
    // iteration and is therefore compared fresh rather than folded in.
    const double hi = std::max(max_rbar_, cbar_rho);
    const double lo = std::min(min_rbar_, cbar_rho);
    cond_a_ = hi / lo;
    max_rbar_ = std::max(max_rbar_, rhobar_new);
    min_rbar_ = std::min(min_rbar_, rhobar_new);

    // ||x_k|| chain. x_k solves (Rbar_k R_k) y = z with both factors upper
    // bidiagonal, so column k of the product has entries
    //   eps   = thetabar_{k-1} theta_k          (row k-2)
    //   delta = rhobar_{k-1} theta_k + thetabar_k rho_k   (row k-1)
    //   gamma = rhobar_k rho_k                  (row k)
    // all finalized on arrival.
    const double eps_col = thetabar_prev_ * theta_cur_;
    const double delta_col = rhobar_old * theta_cur_ + thetabar * rho_;
    const double gamma_col = rhobar_new * rho_;
    {
        // Two column rotations append the column to a running LQ
        // factorization whose lower factor is banded; only the trailing
        // 2x2 block stays live between iterations.
        const GivensRotation r1 = sym_ortho(xl_p_, eps_col);
        const double rho_hat = r1.r;                            // final diagonal, row k-2
        const double sigma_new = r1.c * xl_q_ + r1.s * delta_col;  // final L(k-1, k-2)
        const double delta_p = -r1.s * xl_q_ + r1.c * delta_col;
        const double g_new = r1.s * gamma_col;                  // final L(k, k-2)
        const double gamma_p = r1.c * gamma_col;

        const GivensRotation r2 = sym_ortho(xl_r_, delta_p);
        const double p_new = r2.r;
        const double q_new = r2.s * gamma_p;
        const double r_new = r2.c * gamma_p;

        // Row k-2 is now final: freeze w_{k-2} into the running sum; the
        // last two w entries are recomputed live each iteration.
        const double w_fin =
            (xl_zeta_[0] - xl_g_[0] * xl_w_[0] - xl_sigma_carry_ * xl_w_[1]) / rho_hat;
        xl_sum2_ += w_fin * w_fin;
        const double w_live1 = (xl_zeta_[1] - xl_g_[1] * xl_w_[1] - sigma_new * w_fin) / p_new;
        const double w_live2 = (zeta_k - g_new * w_fin - q_new * w_live1) / r_new;
        norm_x_ = std::sqrt(xl_sum2_ + w_live1 * w_live1 + w_live2 * w_live2);

        xl_p_ = p_new;
        xl_q_ = q_new;
        xl_r_ = r_new;
        xl_w_[0] = xl_w_[1];
        xl_w_[1] = w_fin;
        xl_zeta_[0] = xl_zeta_[1];
        xl_zeta_[1] = zeta_k;
        xl_g_[0] = xl_g_[1];
        xl_g_[1] = g_new;
        xl_sigma_carry_ = sigma_new;
    }

    zeta_prev_ = zeta_k;
    rhobar_ = rhobar_new;
    thetabar_prev_ = thetabar;
    theta_cur_ = theta_next;
}

bool LsmrStepper::scalars_finite() const {
    for (double v : {alphabar_, rho_, rhobar_, cbar_, sbar_, zetabar_, betadd_, betad_,
                     rhodot_, tautilde_, thetatilde_, d_, norm_r_, norm_atr_, norm_x_,
                     norm_a_, cond_a_})
        if (!std::isfinite(v)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// lsmr_solve
// ---------------------------------------------------------------------------

namespace detail {

void fill_true_norms(const LinearOperator& a, std::span<const double> b, double lambda,
                     std::span<const double> x, std::vector<double>& r_buf,
                     std::vector<double>& atr_buf, IterationRecord& rec) {
    a.apply(x, std::span<double>(r_buf));
    for (std::size_t i = 0; i < r_buf.size(); ++i) r_buf[i] = b[i] - r_buf[i];
    const double nr = norm2(r_buf);
    const double nx = norm2(x);
    rec.norm_r_true = lambda > 0.0 ? std::sqrt(nr * nr + lambda * lambda * nx * nx) : nr;
    a.apply_adjoint(r_buf, std::span<double>(atr_buf));
    if (lambda > 0.0)
        for (std::size_t j = 0; j < atr_buf.size(); ++j) atr_buf[j] -= lambda * lambda * x[j];
    rec.norm_atr_true = norm2(atr_buf);
}

}  // namespace detail

namespace {

SolveResult degenerate_result(std::size_t n, StopReason reason, double norm_r) {
    SolveResult res;
    res.x.assign(n, 0.0);
    res.reason = reason;
    res.iterations = 0;
    res.norm_r = norm_r;
    res.norm_atr = 0.0;
    res.norm_x = 0.0;
    res.norm_a = 0.0;
    res.cond_a = 1.0;
    return res;
}

}  // namespace

SolveResult lsmr_solve(const LinearOperator& a, std::span<const double> b,
                       const SolveOptions& opts, const TraceSink& sink, WorkStats* stats) {
    opts.validate();
    if (opts.reorth.kind == ReorthKind::Restart) return lsmr_solve_restarted(a, b, opts, sink);

    const std::size_t m = a.nrows(), n = a.ncols();
    if (b.size() != m) throw std::invalid_argument("lsmr_solve: rhs length mismatch");
    const std::size_t max_iter = opts.effective_max_iter(m, n);

    GolubKahan gk(a, b, GkOptions{opts.reorth, std::numeric_limits<std::size_t>::max(), 2},
                  stats);
    const double norm_b = gk.beta1();

    if (gk.b_is_zero()) return degenerate_result(n, StopReason::BZero, 0.0);
    if (gk.atb_is_zero())
        // x = 0 already satisfies A^T r = A^T b = 0.
        return degenerate_result(n, StopReason::BreakdownLs, norm_b);

    LsmrStepper st(gk.beta1(), gk.alpha1(), gk.v(), opts.lambda, stats);

    std::vector<double> diag_r, diag_atr;
    if (opts.diagnostics) {
        diag_r.resize(m);
        diag_atr.resize(n);
    }

    SolveResult res;
    // Work audit, per iteration (diagnostics off, reorth none):
    //   products: exactly 1 forward (A v into the m workspace) and
    //             1 adjoint (accumulated into v) -- counted structurally
    //             by the storage-discipline test.
    //   scalar*vector multiplies: m-length 2 (u update, u normalize),
    //             n-length 5 (v scale, v normalize, hbar update, x update,
    //             h update); a 3m + 6n count for the same recurrences
    //             attributes the products' fused work differently. No long
    //             vector beyond {x, v, h, hbar, u, Av} is touched.
    for (std::size_t k = 1; k <= max_iter; ++k) {
        const GkStep gs = gk.step();
        const bool broke = gs.beta_breakdown || gs.alpha_breakdown;
        st.step(gs.alpha_next, gs.beta_next,
                broke ? std::span<const double>() : gk.v());
        if (!st.scalars_finite())
            throw std::runtime_error("lsmr_solve: non-finite value in recurrence at iteration " +
                                     std::to_string(k));

        IterationRecord rec;
        rec.k = k;
        rec.norm_r_est = st.norm_r();
        rec.norm_atr_est = st.norm_atr();
        rec.norm_x_est = st.norm_x();
        rec.norm_a_est = st.norm_a();
        rec.cond_est = st.cond_a();
        if (opts.diagnostics) {
            rec.has_diagnostics = true;
            detail::fill_true_norms(a, b, opts.lambda, st.x(), diag_r, diag_atr, rec);
            rec.lemma31_residual = st.lemma31_residual();
            rec.e2 = rec.norm_r_est > 0.0 ? rec.norm_atr_est / rec.norm_r_est : 0.0;
        }
        if (sink) sink(rec, st.x());

        const StopCheck sc =
            check_stop(gs.beta_breakdown, gs.alpha_breakdown, opts.lambda, st.norm_r(),
                       st.norm_atr(), st.norm_x(), st.norm_a(), st.cond_a(), norm_b, opts, k,
                       max_iter);
        if (sc.stop) {
            res.x.assign(st.x().begin(), st.x().end());
            res.reason = sc.reason;
            res.iterations = k;
            res.norm_r = st.norm_r();
            res.norm_atr = st.norm_atr();
            res.norm_x = st.norm_x();
            res.norm_a = st.norm_a();
            res.cond_a = st.cond_a();
            return res;
        }
    }
    // check_stop returns MaxIter at k == max_iter, so this is unreachable.
    throw std::logic_error("lsmr_solve: loop exited without a stop reason");
}

// ---------------------------------------------------------------------------
// Restarted LSMR
// ---------------------------------------------------------------------------

namespace {

/// Matrix-free view of the stacked operator (A; lambda I).
class DampedAugmentedOperator final : public LinearOperator {
public:
    DampedAugmentedOperator(const LinearOperator& a, double lambda)
        : LinearOperator(a.nrows() + a.ncols(), a.ncols()), a_(&a), lambda_(lambda) {}

private:
    void do_apply(std::span<const double> x, std::span<double> y) const override {
        a_->apply(x, y.first(a_->nrows()));
        for (std::size_t j = 0; j < a_->ncols(); ++j) y[a_->nrows() + j] = lambda_ * x[j];
    }
    void do_apply_adjoint_add(std::span<const double> u, std::span<double> y) const override {
        a_->apply_adjoint_add(u.first(a_->nrows()), y);
        for (std::size_t j = 0; j < a_->ncols(); ++j) y[j] += lambda_ * u[a_->nrows() + j];
    }

    const LinearOperator* a_;
    double lambda_;
};

}  // namespace

SolveResult lsmr_solve_restarted(const LinearOperator& a, std::span<const double> b,
                                 const SolveOptions& opts, const TraceSink& sink) {
    opts.validate();
    if (opts.reorth.kind != ReorthKind::Restart)
        throw std::invalid_argument("lsmr_solve_restarted: reorth mode must be restart:<L>");
    const std::size_t period = opts.reorth.window;

    if (opts.lambda > 0.0) {
        // A warm start couples the offset into the damping block, so the
        // damped problem restarts as the explicit augmented system.
        DampedAugmentedOperator aug(a, opts.lambda);
        std::vector<double> b_aug(aug.nrows(), 0.0);
        std::copy(b.begin(), b.end(), b_aug.begin());
        SolveOptions aug_opts = opts;
        aug_opts.lambda = 0.0;
        return lsmr_solve_restarted(aug, b_aug, aug_opts, sink);
    }

    const std::size_t m = a.nrows(), n = a.ncols();
    if (b.size() != m) throw std::invalid_argument("lsmr_solve_restarted: rhs length mismatch");
    const std::size_t max_iter = opts.effective_max_iter(m, n);
    const double norm_b = norm2(b);
    if (norm_b == 0.0) return degenerate_result(n, StopReason::BZero, 0.0);

    std::vector<double> x_total(n, 0.0);
    std::vector<double> r_cur(b.begin(), b.end());
    std::vector<double> atr(n, 0.0);

    std::size_t total_iters = 0;
    double norm_a_seen = 0.0;
    double cond_seen = 1.0;

    while (true) {
        SolveOptions seg = opts;
        seg.reorth = ReorthMode::v_only();
        seg.diagnostics = false;
        seg.max_iter = std::min(period, max_iter - total_iters);

        const std::size_t k_offset = total_iters;
        TraceSink seg_sink;
        if (sink)
            seg_sink = [&, k_offset](const IterationRecord& rec, std::span<const double> xk) {
                IterationRecord shifted = rec;
                shifted.k = k_offset + rec.k;
                sink(shifted, xk);
            };

        const SolveResult segres = lsmr_solve(a, r_cur, seg, seg_sink);
        axpy(1.0, segres.x, std::span<double>(x_total));
        total_iters += segres.iterations;
        norm_a_seen = std::max(norm_a_seen, segres.norm_a);
        cond_seen = std::max(cond_seen, segres.cond_a);

        // Global progress check with directly recomputed residual.
        a.apply(x_total, std::span<double>(r_cur));
        for (std::size_t i = 0; i < m; ++i) r_cur[i] = b[i] - r_cur[i];
        const double norm_r = norm2(r_cur);
        a.apply_adjoint(r_cur, std::span<double>(atr));
        const double norm_atr = norm2(atr);
        const double norm_x = norm2(x_total);

        const bool seg_breakdown = segres.reason == StopReason::BreakdownConsistent ||
                                   segres.reason == StopReason::BreakdownLs;
        StopCheck sc = check_stop(false, false, 0.0, norm_r, norm_atr, norm_x, norm_a_seen,
                                  cond_seen, norm_b, opts, total_iters, max_iter);
        if (!sc.stop && seg_breakdown) sc = {true, segres.reason};
        if (sc.stop) {
            SolveResult res;
            res.x = std::move(x_total);
            res.reason = seg_breakdown && (sc.reason == StopReason::S1Compatible ||
                                           sc.reason == StopReason::S2LeastSquares ||
                                           sc.reason == StopReason::S1Eps ||
                                           sc.reason == StopReason::S2Eps)
                             ? segres.reason
                             : sc.reason;
            res.iterations = total_iters;
            res.norm_r = norm_r;
            res.norm_atr = norm_atr;
            res.norm_x = norm_x;
            res.norm_a = norm_a_seen;
            res.cond_a = cond_seen;
            return res;
        }
    }
}

}  // namespace lsqkit
