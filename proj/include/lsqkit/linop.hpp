/// @file linop.hpp
/// @brief Linear operator abstraction with sparse (CSR) and dense backends,
///        plus the diagonal column scaling used to normalize test problems.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lsqkit {

/// Abstract m x n operator. Implementations provide the forward product
/// y = A x and the accumulating adjoint product y += A^T u, which is the
/// natural form for the bidiagonalization update v <- A^T u - beta v.
/// Operators are immutable after construction and safe for concurrent
/// read-only use.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;

    std::size_t nrows() const { return nrows_; }
    std::size_t ncols() const { return ncols_; }

    /// y = A x  (overwrites y)
    void apply(std::span<const double> x, std::span<double> y) const;

    /// y += A^T u
    void apply_adjoint_add(std::span<const double> u, std::span<double> y) const;

    /// y = A^T u  (overwrites y)
    void apply_adjoint(std::span<const double> u, std::span<double> y) const;

    /// Allocating conveniences.
    std::vector<double> apply(std::span<const double> x) const;
    std::vector<double> apply_adjoint(std::span<const double> u) const;

protected:
    LinearOperator(std::size_t nrows, std::size_t ncols);

    virtual void do_apply(std::span<const double> x, std::span<double> y) const = 0;
    virtual void do_apply_adjoint_add(std::span<const double> u, std::span<double> y) const = 0;

private:
    std::size_t nrows_ = 0;
    std::size_t ncols_ = 0;
};

/// Compressed sparse row storage. Invariants checked by validate():
/// row_starts is nondecreasing with row_starts.back() == values.size(),
/// and column indices are strictly increasing within each row.
struct CsrMatrix {
    std::size_t nrows = 0;
    std::size_t ncols = 0;
    std::vector<std::size_t> row_starts;  // length nrows + 1
    std::vector<std::size_t> col_indices;
    std::vector<double> values;

    std::size_t nnz() const { return values.size(); }

    /// Build from (row, col, value) triplets; duplicates are summed.
    struct Triplet {
        std::size_t row, col;
        double value;
    };
    static CsrMatrix from_triplets(std::size_t nrows, std::size_t ncols,
                                   std::vector<Triplet> entries);

    static CsrMatrix identity(std::size_t n);

    /// Throws std::runtime_error when a structural invariant is violated.
    void validate() const;

    std::vector<double> column_norms() const;
};

class CsrOperator final : public LinearOperator {
public:
    explicit CsrOperator(CsrMatrix matrix);

    const CsrMatrix& matrix() const { return matrix_; }

private:
    void do_apply(std::span<const double> x, std::span<double> y) const override;
    void do_apply_adjoint_add(std::span<const double> u, std::span<double> y) const override;

    CsrMatrix matrix_;
};

/// Row-major dense operator for small problems and oracle tests.
class DenseOperator final : public LinearOperator {
public:
    DenseOperator(std::size_t nrows, std::size_t ncols, std::vector<double> entries);

    double at(std::size_t i, std::size_t j) const { return entries_[i * ncols() + j]; }
    const std::vector<double>& entries() const { return entries_; }

private:
    void do_apply(std::span<const double> x, std::span<double> y) const override;
    void do_apply_adjoint_add(std::span<const double> u, std::span<double> y) const override;

    std::vector<double> entries_;
};

/// Original column and right-hand-side norms recorded by column_unit_scale,
/// kept so solutions of the scaled problem can be mapped back:
/// x_original[j] = x_scaled[j] / column_norms_before[j] * rhs_norm_before.
struct ScalingReport {
    std::vector<double> column_norms_before;
    double rhs_norm_before = 0.0;
};

struct ScaledProblem {
    CsrMatrix matrix;
    std::vector<double> rhs;
    ScalingReport report;
};

/// Rescale so every column of A and the vector b have unit 2-norm.
/// A zero column or zero b is an error; callers must drop such problems.
ScaledProblem column_unit_scale(const CsrMatrix& a, std::span<const double> b);

std::vector<double> unscale_solution(const ScalingReport& report,
                                     std::span<const double> x_scaled);

}  // namespace lsqkit
