/// @file backerr.hpp
/// @brief Backward-error estimators and the dense factorizations used as
///        brute-force oracles in the test suites.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lsqkit/linop.hpp"

namespace lsqkit {

/// Row-major dense matrix, the substrate for all oracle computations.
struct DenseMatrix {
    std::size_t nrows = 0;
    std::size_t ncols = 0;
    std::vector<double> data;  // nrows * ncols, row-major

    DenseMatrix() = default;
    DenseMatrix(std::size_t nrows_, std::size_t ncols_)
        : nrows(nrows_), ncols(ncols_), data(nrows_ * ncols_, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * ncols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * ncols + j]; }

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_csr(const CsrMatrix& m);
    /// Materialize any operator by applying it to unit vectors.
    static DenseMatrix from_operator(const LinearOperator& op);

    DenseMatrix transposed() const;
    std::vector<double> multiply(std::span<const double> x) const;
    std::vector<double> multiply_transpose(std::span<const double> u) const;
    double frobenius_norm() const;
};

/// Householder QR of a tall matrix (nrows >= ncols). The orthogonal factor
/// is kept as reflectors and applied on demand; R is stored explicitly.
class HouseholderQr {
public:
    explicit HouseholderQr(DenseMatrix m);

    std::size_t nrows() const { return qr_.nrows; }
    std::size_t ncols() const { return qr_.ncols; }

    double r_at(std::size_t i, std::size_t j) const;

    /// y = Q^T y (in place, length nrows).
    void apply_qt(std::span<double> y) const;
    /// y = Q y (in place, length nrows).
    void apply_q(std::span<double> y) const;

    /// Least-squares solve min ||M x - rhs||. Throws when a diagonal of R is
    /// numerically zero (|R_jj| <= 1e-14 ||M||_F).
    std::vector<double> solve_ls(std::span<const double> rhs) const;

    double min_abs_r_diag() const;
    double source_frobenius_norm() const { return source_fro_; }

    /// Self-check quantities: max |Q^T Q - I| and ||M - Q R||_F / ||M||_F.
    struct Verification {
        double q_orthogonality;
        double relative_reconstruction;
    };
    Verification verify(const DenseMatrix& original) const;

private:
    DenseMatrix qr_;             // R in the upper triangle, reflectors below
    std::vector<double> tau_;    // reflector coefficients
    std::vector<double> sign_;   // column sign flips keeping R_jj >= 0
    double source_fro_ = 0.0;
};

/// x minimizing ||M x - rhs|| for full-column-rank M.
std::vector<double> dense_ls_solve(const DenseMatrix& m, std::span<const double> rhs);

/// Thin SVD M = U diag(sigma) V^T computed by one-sided Jacobi rotations.
/// Singular values are sorted in decreasing order; U is nrows x r and
/// V is ncols x r with r = min(nrows, ncols).
struct SvdResult {
    DenseMatrix u;
    std::vector<double> singular_values;
    DenseMatrix v;
};
SvdResult jacobi_svd(const DenseMatrix& m);

/// Minimum-norm least-squares solution x = M^+ rhs via the Jacobi SVD;
/// singular values below 1e-12 * sigma_max are truncated.
std::vector<double> dense_minnorm_solve(const DenseMatrix& m, std::span<const double> rhs);

/// Stewart's ||E_2|| = ||A^T r|| / ||r||. An exact solve (norm_r = 0) is
/// reported as 0 with the flag set.
struct E2Result {
    double value;
    bool exact_residual;  // norm_r was zero
};
E2Result stewart_e2(double norm_atr, double norm_r);

/// Stewart's ||E_1|| = ||r - r_hat|| / ||x|| given the oracle residual r_hat.
/// Also checks ||r||^2 = ||r_hat||^2 + ||e||^2 and flags a violation, which
/// indicates an inaccurate r_hat.
struct E1Result {
    double value;
    bool pythagorean_ok;
};
E1Result stewart_e1(std::span<const double> x, std::span<const double> r,
                    std::span<const double> r_hat);

/// Near-optimal backward error mu~(x): solve min ||K y - v|| with the
/// stacked matrix K = [A; (||r||/||x||) I], v = [r; 0], and return
/// ||K y|| / ||x||. A zero residual returns 0. Diagnostic tool only; costs
/// a full dense QR per call.
double optimal_backward_error(const DenseMatrix& a, std::span<const double> b,
                              std::span<const double> x);

}  // namespace lsqkit
