/// @file gk_bidiag.hpp
/// @brief Golub-Kahan bidiagonalization with pluggable reorthogonalization,
///        shared by the LSMR and LSQR solvers.

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lsqkit/linop.hpp"

namespace lsqkit {

enum class ReorthKind { None, VOnly, UOnly, Both, Local, Restart };

/// Reorthogonalization strategy. Local(l) keeps a ring of the last l
/// v-vectors; Restart(l) is handled at the solver level (the process is
/// re-initialized every l iterations) and behaves like None inside the
/// bidiagonalization itself.
struct ReorthMode {
    ReorthKind kind = ReorthKind::None;
    std::size_t window = 0;  // l for Local / Restart

    static ReorthMode none() { return {ReorthKind::None, 0}; }
    static ReorthMode v_only() { return {ReorthKind::VOnly, 0}; }
    static ReorthMode u_only() { return {ReorthKind::UOnly, 0}; }
    static ReorthMode both() { return {ReorthKind::Both, 0}; }
    static ReorthMode local(std::size_t l);
    static ReorthMode restart(std::size_t l);

    bool reorth_v() const {
        return kind == ReorthKind::VOnly || kind == ReorthKind::Both ||
               kind == ReorthKind::Local;
    }
    bool reorth_u() const { return kind == ReorthKind::UOnly || kind == ReorthKind::Both; }

    /// Grammar: none | v | u | both | local:<L> | restart:<L>
    static ReorthMode parse(const std::string& spec);
    std::string to_string() const;
};

/// Allocation tally for the storage-discipline checks.
struct WorkStats {
    std::size_t m_buffers = 0;
    std::size_t n_buffers = 0;
};

namespace detail {
inline std::vector<double> make_m_buffer(std::size_t m, WorkStats* stats) {
    if (stats) stats->m_buffers += 1;
    return std::vector<double>(m, 0.0);
}
inline std::vector<double> make_n_buffer(std::size_t n, WorkStats* stats) {
    if (stats) stats->n_buffers += 1;
    return std::vector<double>(n, 0.0);
}
}  // namespace detail

/// Remove from w its projections onto each basis vector, `passes` modified
/// Gram-Schmidt sweeps in sequence. A (numerically) zero result is legal and
/// signals linear dependence.
void reorthogonalize(std::span<double> w, std::span<const std::vector<double>> basis,
                     int passes);

struct GkOptions {
    ReorthMode mode;
    /// Hard cap on stored basis vectors; exceeding it is an error rather
    /// than silent degradation.
    std::size_t storage_cap = std::numeric_limits<std::size_t>::max();
    int mgs_passes = 2;
};

/// Result of one bidiagonalization step: beta_{k+1} and alpha_{k+1} and the
/// exact-termination flags of the process. After a beta breakdown the alpha
/// value is not computed (reported as zero, never to be consumed).
struct GkStep {
    double beta_next = 0.0;
    double alpha_next = 0.0;
    bool beta_breakdown = false;
    bool alpha_breakdown = false;
};

/// The Golub-Kahan process: beta_1 u_1 = b, alpha_1 v_1 = A^T u_1, then
///   beta_{k+1} u_{k+1} = A v_k - alpha_k u_k
///   alpha_{k+1} v_{k+1} = A^T u_{k+1} - beta_{k+1} v_k
/// with the configured reorthogonalization applied to each new vector
/// before normalization. The bidiagonal matrix B_k is never materialized;
/// its entries stream out of step().
///
/// Single-owner mutable state; not safe for concurrent mutation.
class GolubKahan {
public:
    GolubKahan(const LinearOperator& a, std::span<const double> b, GkOptions options,
               WorkStats* stats = nullptr);

    double beta1() const { return beta1_; }
    double alpha1() const { return alpha1_; }
    bool b_is_zero() const { return b_is_zero_; }
    bool atb_is_zero() const { return atb_is_zero_; }

    /// Completed steps (k = 1 after construction when not terminated).
    std::size_t k() const { return k_; }
    bool terminated() const { return terminated_; }

    double alpha_k() const { return alpha_; }
    double beta_k() const { return beta_; }
    std::span<const double> u() const { return u_; }
    std::span<const double> v() const { return v_; }

    GkStep step();

    std::size_t stored_u_count() const { return stored_u_.size(); }
    std::size_t stored_v_count() const { return stored_v_.size(); }

    /// Running Frobenius norm of B_k, also the scale of the breakdown test.
    double bnorm_estimate() const;

private:
    bool is_negligible(double norm) const;
    void store_u();
    void store_v();

    const LinearOperator* a_;
    GkOptions options_;
    std::size_t k_ = 0;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double beta1_ = 0.0;
    double alpha1_ = 0.0;
    double fro2_ = 0.0;  // sum of alpha_i^2 + beta_{i+1}^2 seen so far
    bool terminated_ = false;
    bool b_is_zero_ = false;
    bool atb_is_zero_ = false;

    std::vector<double> u_;   // m
    std::vector<double> ws_;  // m, workspace for A v
    std::vector<double> v_;   // n

    std::vector<std::vector<double>> stored_u_;
    std::vector<std::vector<double>> stored_v_;
    std::size_t ring_next_ = 0;  // next slot to overwrite in Local mode
};

}  // namespace lsqkit
