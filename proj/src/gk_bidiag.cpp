#include "lsqkit/gk_bidiag.hpp"

#include <cfloat>
#include <cmath>
#include <stdexcept>

#include "lsqkit/vec.hpp"

namespace lsqkit {

ReorthMode ReorthMode::local(std::size_t l) {
    if (l < 1) throw std::invalid_argument("ReorthMode::local: window must be >= 1");
    return {ReorthKind::Local, l};
}

ReorthMode ReorthMode::restart(std::size_t l) {
    if (l < 1) throw std::invalid_argument("ReorthMode::restart: period must be >= 1");
    return {ReorthKind::Restart, l};
}

ReorthMode ReorthMode::parse(const std::string& spec) {
    if (spec == "none") return none();
    if (spec == "v") return v_only();
    if (spec == "u") return u_only();
    if (spec == "both") return both();
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const std::string head = spec.substr(0, colon);
        std::size_t l = 0;
        try {
            l = std::stoul(spec.substr(colon + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("ReorthMode::parse: bad window in '" + spec + "'");
        }
        if (head == "local") return local(l);
        if (head == "restart") return restart(l);
    }
    throw std::invalid_argument("ReorthMode::parse: unknown spec '" + spec +
                                "' (expected none|v|u|both|local:<L>|restart:<L>)");
}

std::string ReorthMode::to_string() const {
    switch (kind) {
        case ReorthKind::None: return "none";
        case ReorthKind::VOnly: return "v";
        case ReorthKind::UOnly: return "u";
        case ReorthKind::Both: return "both";
        case ReorthKind::Local: return "local:" + std::to_string(window);
        case ReorthKind::Restart: return "restart:" + std::to_string(window);
    }
    return "none";
}

void reorthogonalize(std::span<double> w, std::span<const std::vector<double>> basis,
                     int passes) {
    for (int pass = 0; pass < passes; ++pass) {
        for (const std::vector<double>& q : basis) {
            const double proj = dot(w, q);
            axpy(-proj, q, w);
        }
    }
}

GolubKahan::GolubKahan(const LinearOperator& a, std::span<const double> b, GkOptions options,
                       WorkStats* stats)
    : a_(&a),
      options_(options),
      u_(detail::make_m_buffer(a.nrows(), stats)),
      ws_(detail::make_m_buffer(a.nrows(), stats)),
      v_(detail::make_n_buffer(a.ncols(), stats)) {
    if (b.size() != a.nrows())
        throw std::invalid_argument("GolubKahan: rhs length does not match operator rows");

    // beta_1 u_1 = b
    std::copy(b.begin(), b.end(), u_.begin());
    beta1_ = norm2(u_);
    if (is_negligible(beta1_)) {
        beta1_ = 0.0;
        b_is_zero_ = true;
        terminated_ = true;
        return;
    }
    scale(1.0 / beta1_, std::span<double>(u_));
    store_u();

    // alpha_1 v_1 = A^T u_1
    a_->apply_adjoint(u_, std::span<double>(v_));
    alpha1_ = norm2(v_);
    if (is_negligible(alpha1_)) {
        alpha1_ = 0.0;
        atb_is_zero_ = true;
        terminated_ = true;
        return;
    }
    scale(1.0 / alpha1_, std::span<double>(v_));
    store_v();

    alpha_ = alpha1_;
    beta_ = beta1_;
    fro2_ = alpha1_ * alpha1_;
    k_ = 1;
}

bool GolubKahan::is_negligible(double norm) const {
    // The exact-arithmetic breakdown (alpha or beta equal to zero) needs a
    // relative threshold in floating point: the pre-normalization vector
    // acts on unit-norm predecessors, so its natural scale is the running
    // ||B_k||_F. The factor 8 absorbs the few rounding errors an exact
    // cancellation accumulates through the update and the norm.
    return norm <= 8.0 * DBL_EPSILON * (std::sqrt(fro2_) + DBL_MIN);
}

void GolubKahan::store_u() {
    if (!options_.mode.reorth_u()) return;
    if (stored_u_.size() + stored_v_.size() >= options_.storage_cap)
        throw std::runtime_error("GolubKahan: reorthogonalization storage cap exceeded");
    stored_u_.emplace_back(u_);
}

void GolubKahan::store_v() {
    if (!options_.mode.reorth_v()) return;
    if (options_.mode.kind == ReorthKind::Local) {
        if (stored_v_.size() < options_.mode.window) {
            stored_v_.emplace_back(v_);
        } else {
            stored_v_[ring_next_] = v_;
            ring_next_ = (ring_next_ + 1) % options_.mode.window;
        }
        return;
    }
    if (stored_u_.size() + stored_v_.size() >= options_.storage_cap)
        throw std::runtime_error("GolubKahan: reorthogonalization storage cap exceeded");
    stored_v_.emplace_back(v_);
}

GkStep GolubKahan::step() {
    if (terminated_) throw std::logic_error("GolubKahan::step: process already terminated");

    GkStep out;

    // beta_{k+1} u_{k+1} = A v_k - alpha_k u_k
    a_->apply(v_, std::span<double>(ws_));
    for (std::size_t i = 0; i < u_.size(); ++i) u_[i] = ws_[i] - alpha_ * u_[i];
    if (options_.mode.reorth_u()) reorthogonalize(u_, stored_u_, options_.mgs_passes);
    double beta_next = norm2(u_);
    if (is_negligible(beta_next)) {
        // Exact consistent termination; alpha_{k+1} is never computed.
        out.beta_breakdown = true;
        terminated_ = true;
        return out;
    }
    out.beta_next = beta_next;
    fro2_ += beta_next * beta_next;
    scale(1.0 / beta_next, std::span<double>(u_));
    store_u();

    // alpha_{k+1} v_{k+1} = A^T u_{k+1} - beta_{k+1} v_k
    scale(-beta_next, std::span<double>(v_));
    a_->apply_adjoint_add(u_, std::span<double>(v_));
    if (options_.mode.reorth_v()) reorthogonalize(v_, stored_v_, options_.mgs_passes);
    double alpha_next = norm2(v_);
    if (is_negligible(alpha_next)) {
        // Exact least-squares termination.
        out.alpha_breakdown = true;
        terminated_ = true;
        return out;
    }
    out.alpha_next = alpha_next;
    fro2_ += alpha_next * alpha_next;
    scale(1.0 / alpha_next, std::span<double>(v_));
    store_v();

    alpha_ = alpha_next;
    beta_ = beta_next;
    k_ += 1;
    return out;
}

double GolubKahan::bnorm_estimate() const { return std::sqrt(fro2_); }

}  // namespace lsqkit
