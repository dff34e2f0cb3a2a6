/// Test-only transcription of the unregularized LSMR recurrences: the main
/// two-rotation update plus the residual-norm chain, written without any
/// damping machinery. The production solver's lambda = 0 path must agree
/// with this bitwise on the beta chain and on x.

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "lsqkit/lsmr.hpp"

namespace lsqkit::testing {

class ReferenceLsmr {
public:
    ReferenceLsmr(double beta1, double alpha1, std::span<const double> v1)
        : n_(v1.size()),
          x_(n_, 0.0),
          h_(v1.begin(), v1.end()),
          hbar_(n_, 0.0),
          alphabar_(alpha1),
          zetabar_(alpha1 * beta1),
          betadd_(beta1) {
        norm_r_ = beta1;
        norm_atr_ = zetabar_;
    }

    void step(double alpha_next, double beta_next, std::span<const double> v_next) {
        const double rho_old = rho_;
        const double rhobar_old = rhobar_;

        const GivensRotation pk = sym_ortho(alphabar_, beta_next);
        const double c = pk.c, s = pk.s;
        rho_ = pk.r;
        const double theta_next = s * alpha_next;
        alphabar_ = c * alpha_next;

        const double thetabar = sbar_ * rho_;
        const GivensRotation pbar = sym_ortho(cbar_ * rho_, theta_next);
        cbar_ = pbar.c;
        sbar_ = pbar.s;
        rhobar_ = pbar.r;
        const double zeta = cbar_ * zetabar_;
        zetabar_ = -sbar_ * zetabar_;

        const double hbar_coeff = thetabar * rho_ / (rho_old * rhobar_old);
        for (std::size_t i = 0; i < n_; ++i) hbar_[i] = h_[i] - hbar_coeff * hbar_[i];
        const double x_coeff = zeta / (rho_ * rhobar_);
        for (std::size_t i = 0; i < n_; ++i) x_[i] += x_coeff * hbar_[i];
        if (!v_next.empty()) {
            const double h_coeff = theta_next / rho_;
            for (std::size_t i = 0; i < n_; ++i) h_[i] = v_next[i] - h_coeff * h_[i];
        }

        // Residual chain, undamped form.
        const double betahat = c * betadd_;
        betadd_ = -s * betadd_;

        const double thetatilde_old = thetatilde_;
        const GivensRotation pt = sym_ortho(rhodot_, thetabar);
        thetatilde_ = pt.s * rhobar_;
        rhodot_ = pt.c * rhobar_;
        betad_ = -pt.s * betad_ + pt.c * betahat;

        tautilde_ = (zeta_prev_ - thetatilde_old * tautilde_) / pt.r;
        const double taud = (zeta - thetatilde_ * tautilde_) / rhodot_;
        norm_r_ = std::sqrt((betad_ - taud) * (betad_ - taud) + betadd_ * betadd_);
        norm_atr_ = std::abs(zetabar_);

        zeta_prev_ = zeta;
    }

    std::span<const double> x() const { return x_; }
    double norm_r() const { return norm_r_; }
    double norm_atr() const { return norm_atr_; }

private:
    std::size_t n_;
    std::vector<double> x_, h_, hbar_;
    double alphabar_, rho_ = 1.0, rhobar_ = 1.0, cbar_ = 1.0, sbar_ = 0.0, zetabar_;
    double betadd_, betad_ = 0.0, rhodot_ = 1.0;
    double tautilde_ = 0.0, thetatilde_ = 0.0, zeta_prev_ = 0.0;
    double norm_r_ = 0.0, norm_atr_ = 0.0;
};

}  // namespace lsqkit::testing
