#include "lsqkit/lsqr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lsqkit/vec.hpp"

namespace lsqkit {

LsqrStepper::LsqrStepper(double beta1, double alpha1, std::span<const double> v1, double lambda,
                         WorkStats* stats)
    : lambda_(lambda),
      n_(v1.size()),
      x_(detail::make_n_buffer(n_, stats)),
      w_(detail::make_n_buffer(n_, stats)) {
    std::copy(v1.begin(), v1.end(), w_.begin());  // w_1 = v_1
    phibar_ = beta1;
    rhobar_ = alpha1;
    fro2_ = alpha1 * alpha1 + lambda * lambda;
    norm_r_ = beta1;
    norm_atr_ = alpha1 * beta1;
    norm_a_ = std::sqrt(fro2_);
}

void LsqrStepper::step(double alpha_next, double beta_next, std::span<const double> v_next) {
    k_ += 1;

    // Fold the damping into rhobar, splitting off psi from phibar.
    const GivensRotation g1 = sym_ortho(rhobar_, lambda_);
    const double rhobar1 = g1.r;
    const double psi = g1.s * phibar_;
    const double phibar_damped = g1.c * phibar_;

    // Eliminate beta_{k+1} from the lower-bidiagonal factor.
    const GivensRotation g = sym_ortho(rhobar1, beta_next);
    const double cs = g.c, sn = g.s, rho = g.r;
    const double theta = sn * alpha_next;
    rhobar_ = -cs * alpha_next;
    const double phi = cs * phibar_damped;
    phibar_ = sn * phibar_damped;

    // x and the direction w; d_k = w_k / rho_k accumulates the cond estimate.
    const double t1 = phi / rho;
    const double t2 = -theta / rho;
    double wnorm2 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        wnorm2 += w_[i] * w_[i];
        x_[i] += t1 * w_[i];
    }
    ddnorm_ += wnorm2 / (rho * rho);
    if (!v_next.empty())
        for (std::size_t i = 0; i < n_; ++i) w_[i] = v_next[i] + t2 * w_[i];

    // ||x|| estimate: one extra rotation triangularizes R_k^T on the fly;
    // the finalized entries accumulate in xxnorm and the live last entry
    // is zbar.
    const double delta = sn2_ * rho;
    const double gambar = -cs2_ * rho;
    const double rhs = phi - delta * z_;
    const double zbar = rhs / gambar;
    norm_x_ = std::sqrt(xxnorm_ + zbar * zbar);
    const GivensRotation g2 = sym_ortho(gambar, theta);
    cs2_ = g2.c;
    sn2_ = g2.s;
    z_ = rhs / g2.r;
    xxnorm_ += z_ * z_;

    fro2_ += beta_next * beta_next;
    norm_a_ = std::sqrt(fro2_);
    fro2_ += alpha_next * alpha_next + lambda_ * lambda_;
    cond_a_ = norm_a_ * std::sqrt(ddnorm_);

    res2_ += psi * psi;
    norm_r_ = std::sqrt(phibar_ * phibar_ + res2_);
    norm_atr_ = alpha_next * std::abs(sn * phi);
}

bool LsqrStepper::scalars_finite() const {
    for (double v : {phibar_, rhobar_, cs2_, sn2_, z_, xxnorm_, ddnorm_, res2_, norm_r_,
                     norm_atr_, norm_x_, norm_a_, cond_a_})
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

SolveResult snapshot(const StopReason reason, std::size_t k, std::span<const double> x,
                     double norm_r, double norm_atr, double norm_x, double norm_a,
                     double cond_a) {
    SolveResult res;
    res.x.assign(x.begin(), x.end());
    res.reason = reason;
    res.iterations = k;
    res.norm_r = norm_r;
    res.norm_atr = norm_atr;
    res.norm_x = norm_x;
    res.norm_a = norm_a;
    res.cond_a = cond_a;
    return res;
}

SolveResult degenerate(std::size_t n, StopReason reason, double norm_r) {
    SolveResult res;
    res.x.assign(n, 0.0);
    res.reason = reason;
    res.norm_r = norm_r;
    res.cond_a = 1.0;
    return res;
}

}  // namespace

SolveResult lsqr_solve(const LinearOperator& a, std::span<const double> b,
                       const SolveOptions& opts, const TraceSink& sink, WorkStats* stats) {
    opts.validate();
    if (opts.reorth.kind == ReorthKind::Restart)
        throw std::invalid_argument("lsqr_solve: restart mode is provided for LSMR only");

    const std::size_t m = a.nrows(), n = a.ncols();
    if (b.size() != m) throw std::invalid_argument("lsqr_solve: rhs length mismatch");
    const std::size_t max_iter = opts.effective_max_iter(m, n);

    GolubKahan gk(a, b, GkOptions{opts.reorth, std::numeric_limits<std::size_t>::max(), 2},
                  stats);
    const double norm_b = gk.beta1();
    if (gk.b_is_zero()) return degenerate(n, StopReason::BZero, 0.0);
    if (gk.atb_is_zero()) return degenerate(n, StopReason::BreakdownLs, norm_b);

    LsqrStepper st(gk.beta1(), gk.alpha1(), gk.v(), opts.lambda, stats);

    std::vector<double> diag_r, diag_atr;
    if (opts.diagnostics) {
        diag_r.resize(m);
        diag_atr.resize(n);
    }

    for (std::size_t k = 1; k <= max_iter; ++k) {
        const GkStep gs = gk.step();
        const bool broke = gs.beta_breakdown || gs.alpha_breakdown;
        st.step(gs.alpha_next, gs.beta_next, broke ? std::span<const double>() : gk.v());
        if (!st.scalars_finite())
            throw std::runtime_error("lsqr_solve: non-finite value in recurrence at iteration " +
                                     std::to_string(k));

        if (sink) {
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
                rec.e2 = rec.norm_r_est > 0.0 ? rec.norm_atr_est / rec.norm_r_est : 0.0;
                // lemma31_residual stays 0: that consistency chain is
                // specific to the double-QR recurrence.
            }
            sink(rec, st.x());
        }

        const StopCheck sc =
            check_stop(gs.beta_breakdown, gs.alpha_breakdown, opts.lambda, st.norm_r(),
                       st.norm_atr(), st.norm_x(), st.norm_a(), st.cond_a(), norm_b, opts, k,
                       max_iter);
        if (sc.stop)
            return snapshot(sc.reason, k, st.x(), st.norm_r(), st.norm_atr(), st.norm_x(),
                            st.norm_a(), st.cond_a());
    }
    throw std::logic_error("lsqr_solve: loop exited without a stop reason");
}

LockstepResult solve_lockstep(const LinearOperator& a, std::span<const double> b,
                              const SolveOptions& opts, const LockstepSink& sink) {
    opts.validate();
    if (opts.reorth.kind == ReorthKind::Restart)
        throw std::invalid_argument("solve_lockstep: restart mode not supported");

    const std::size_t m = a.nrows(), n = a.ncols();
    if (b.size() != m) throw std::invalid_argument("solve_lockstep: rhs length mismatch");
    const std::size_t max_iter = opts.effective_max_iter(m, n);

    GolubKahan gk(a, b, GkOptions{opts.reorth, std::numeric_limits<std::size_t>::max(), 2});
    const double norm_b = gk.beta1();
    if (gk.b_is_zero())
        return {degenerate(n, StopReason::BZero, 0.0), degenerate(n, StopReason::BZero, 0.0)};
    if (gk.atb_is_zero())
        return {degenerate(n, StopReason::BreakdownLs, norm_b),
                degenerate(n, StopReason::BreakdownLs, norm_b)};

    LsmrStepper sm(gk.beta1(), gk.alpha1(), gk.v(), opts.lambda);
    LsqrStepper sq(gk.beta1(), gk.alpha1(), gk.v(), opts.lambda);

    LockstepResult out;
    bool sm_done = false, sq_done = false;

    for (std::size_t k = 1; k <= max_iter && !(sm_done && sq_done); ++k) {
        const GkStep gs = gk.step();
        const bool broke = gs.beta_breakdown || gs.alpha_breakdown;
        const std::span<const double> vn = broke ? std::span<const double>() : gk.v();
        sm.step(gs.alpha_next, gs.beta_next, vn);
        sq.step(gs.alpha_next, gs.beta_next, vn);
        if (!sm.scalars_finite() || !sq.scalars_finite())
            throw std::runtime_error("solve_lockstep: non-finite value at iteration " +
                                     std::to_string(k));

        if (sink) {
            LockstepRecord rec;
            rec.k = k;
            rec.norm_r_lsmr = sm.norm_r();
            rec.norm_atr_lsmr = sm.norm_atr();
            rec.norm_x_lsmr = sm.norm_x();
            rec.e2_lsmr = sm.norm_r() > 0.0 ? sm.norm_atr() / sm.norm_r() : 0.0;
            rec.norm_r_lsqr = sq.norm_r();
            rec.norm_atr_lsqr = sq.norm_atr();
            rec.norm_x_lsqr = sq.norm_x();
            rec.e2_lsqr = sq.norm_r() > 0.0 ? sq.norm_atr() / sq.norm_r() : 0.0;
            sink(rec);
        }

        if (!sm_done) {
            const StopCheck sc =
                check_stop(gs.beta_breakdown, gs.alpha_breakdown, opts.lambda, sm.norm_r(),
                           sm.norm_atr(), sm.norm_x(), sm.norm_a(), sm.cond_a(), norm_b, opts,
                           k, max_iter);
            if (sc.stop) {
                out.lsmr = snapshot(sc.reason, k, sm.x(), sm.norm_r(), sm.norm_atr(),
                                    sm.norm_x(), sm.norm_a(), sm.cond_a());
                sm_done = true;
            }
        }
        if (!sq_done) {
            const StopCheck sc =
                check_stop(gs.beta_breakdown, gs.alpha_breakdown, opts.lambda, sq.norm_r(),
                           sq.norm_atr(), sq.norm_x(), sq.norm_a(), sq.cond_a(), norm_b, opts,
                           k, max_iter);
            if (sc.stop) {
                out.lsqr = snapshot(sc.reason, k, sq.x(), sq.norm_r(), sq.norm_atr(),
                                    sq.norm_x(), sq.norm_a(), sq.cond_a());
                sq_done = true;
            }
        }
    }
    return out;
}

}  // namespace lsqkit
