#include "lsqkit/linop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lsqkit/vec.hpp"

namespace lsqkit {

LinearOperator::LinearOperator(std::size_t nrows, std::size_t ncols)
    : nrows_(nrows), ncols_(ncols) {
    if (nrows == 0 || ncols == 0)
        throw std::invalid_argument("LinearOperator: dimensions must be positive");
}

void LinearOperator::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != ncols_ || y.size() != nrows_)
        throw std::invalid_argument("LinearOperator::apply: dimension mismatch");
    do_apply(x, y);
}

void LinearOperator::apply_adjoint_add(std::span<const double> u, std::span<double> y) const {
    if (u.size() != nrows_ || y.size() != ncols_)
        throw std::invalid_argument("LinearOperator::apply_adjoint_add: dimension mismatch");
    do_apply_adjoint_add(u, y);
}

void LinearOperator::apply_adjoint(std::span<const double> u, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    apply_adjoint_add(u, y);
}

std::vector<double> LinearOperator::apply(std::span<const double> x) const {
    std::vector<double> y(nrows_);
    apply(x, std::span<double>(y));
    return y;
}

std::vector<double> LinearOperator::apply_adjoint(std::span<const double> u) const {
    std::vector<double> y(ncols_);
    apply_adjoint(u, std::span<double>(y));
    return y;
}

CsrMatrix CsrMatrix::from_triplets(std::size_t nrows, std::size_t ncols,
                                   std::vector<Triplet> entries) {
    for (const Triplet& t : entries) {
        if (t.row >= nrows || t.col >= ncols)
            throw std::runtime_error("CsrMatrix::from_triplets: entry index out of bounds");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    CsrMatrix m;
    m.nrows = nrows;
    m.ncols = ncols;
    m.row_starts.assign(nrows + 1, 0);
    m.col_indices.reserve(entries.size());
    m.values.reserve(entries.size());

    for (std::size_t i = 0; i < entries.size();) {
        std::size_t j = i + 1;
        double sum = entries[i].value;
        while (j < entries.size() && entries[j].row == entries[i].row &&
               entries[j].col == entries[i].col) {
            sum += entries[j].value;  // duplicate coordinates are summed
            ++j;
        }
        m.col_indices.push_back(entries[i].col);
        m.values.push_back(sum);
        m.row_starts[entries[i].row + 1] += 1;
        i = j;
    }
    for (std::size_t r = 0; r < nrows; ++r) m.row_starts[r + 1] += m.row_starts[r];
    m.validate();
    return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
    CsrMatrix m;
    m.nrows = m.ncols = n;
    m.row_starts.resize(n + 1);
    m.col_indices.resize(n);
    m.values.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        m.row_starts[i] = i;
        m.col_indices[i] = i;
    }
    m.row_starts[n] = n;
    return m;
}

void CsrMatrix::validate() const {
    if (row_starts.size() != nrows + 1)
        throw std::runtime_error("CsrMatrix: row_starts has wrong length");
    if (row_starts.front() != 0 || row_starts.back() != values.size() ||
        col_indices.size() != values.size())
        throw std::runtime_error("CsrMatrix: row_starts does not match stored entries");
    for (std::size_t r = 0; r < nrows; ++r) {
        if (row_starts[r] > row_starts[r + 1])
            throw std::runtime_error("CsrMatrix: row_starts must be nondecreasing");
        for (std::size_t k = row_starts[r]; k < row_starts[r + 1]; ++k) {
            if (col_indices[k] >= ncols)
                throw std::runtime_error("CsrMatrix: column index out of range");
            if (k > row_starts[r] && col_indices[k] <= col_indices[k - 1])
                throw std::runtime_error("CsrMatrix: column indices not strictly increasing");
        }
    }
}

std::vector<double> CsrMatrix::column_norms() const {
    std::vector<double> sq(ncols, 0.0);
    for (std::size_t k = 0; k < values.size(); ++k) sq[col_indices[k]] += values[k] * values[k];
    for (double& s : sq) s = std::sqrt(s);
    return sq;
}

CsrOperator::CsrOperator(CsrMatrix matrix)
    : LinearOperator(matrix.nrows, matrix.ncols), matrix_(std::move(matrix)) {
    matrix_.validate();
}

void CsrOperator::do_apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < matrix_.nrows; ++i) {
        double sum = 0.0;
        for (std::size_t k = matrix_.row_starts[i]; k < matrix_.row_starts[i + 1]; ++k)
            sum += matrix_.values[k] * x[matrix_.col_indices[k]];
        y[i] = sum;
    }
}

void CsrOperator::do_apply_adjoint_add(std::span<const double> u, std::span<double> y) const {
    for (std::size_t i = 0; i < matrix_.nrows; ++i) {
        const double ui = u[i];
        for (std::size_t k = matrix_.row_starts[i]; k < matrix_.row_starts[i + 1]; ++k)
            y[matrix_.col_indices[k]] += matrix_.values[k] * ui;
    }
}

DenseOperator::DenseOperator(std::size_t nrows, std::size_t ncols, std::vector<double> entries)
    : LinearOperator(nrows, ncols), entries_(std::move(entries)) {
    if (entries_.size() != nrows * ncols)
        throw std::invalid_argument("DenseOperator: entry count does not match dimensions");
}

void DenseOperator::do_apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < nrows(); ++i) {
        const double* row = entries_.data() + i * ncols();
        double sum = 0.0;
        for (std::size_t j = 0; j < ncols(); ++j) sum += row[j] * x[j];
        y[i] = sum;
    }
}

void DenseOperator::do_apply_adjoint_add(std::span<const double> u, std::span<double> y) const {
    for (std::size_t i = 0; i < nrows(); ++i) {
        const double* row = entries_.data() + i * ncols();
        const double ui = u[i];
        for (std::size_t j = 0; j < ncols(); ++j) y[j] += row[j] * ui;
    }
}

ScaledProblem column_unit_scale(const CsrMatrix& a, std::span<const double> b) {
    if (b.size() != a.nrows)
        throw std::invalid_argument("column_unit_scale: rhs length does not match matrix");

    ScaledProblem out;
    out.report.column_norms_before = a.column_norms();
    for (std::size_t j = 0; j < a.ncols; ++j) {
        if (out.report.column_norms_before[j] == 0.0)
            throw std::runtime_error("column_unit_scale: column " + std::to_string(j) +
                                     " is zero; drop the column or skip the problem");
    }
    const double bnorm = norm2(b);
    if (bnorm == 0.0)
        throw std::runtime_error("column_unit_scale: rhs is zero; skip the problem");
    out.report.rhs_norm_before = bnorm;

    out.matrix = a;
    for (std::size_t k = 0; k < out.matrix.values.size(); ++k)
        out.matrix.values[k] /= out.report.column_norms_before[out.matrix.col_indices[k]];
    out.rhs.assign(b.begin(), b.end());
    for (double& bi : out.rhs) bi /= bnorm;
    return out;
}

std::vector<double> unscale_solution(const ScalingReport& report,
                                     std::span<const double> x_scaled) {
    if (x_scaled.size() != report.column_norms_before.size())
        throw std::invalid_argument("unscale_solution: length mismatch");
    std::vector<double> x(x_scaled.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        x[j] = x_scaled[j] / report.column_norms_before[j] * report.rhs_norm_before;
    return x;
}

}  // namespace lsqkit
