#include "lsqkit/backerr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lsqkit/vec.hpp"

namespace lsqkit {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_csr(const CsrMatrix& s) {
    DenseMatrix m(s.nrows, s.ncols);
    for (std::size_t r = 0; r < s.nrows; ++r)
        for (std::size_t k = s.row_starts[r]; k < s.row_starts[r + 1]; ++k)
            m.at(r, s.col_indices[k]) += s.values[k];
    return m;
}

DenseMatrix DenseMatrix::from_operator(const LinearOperator& op) {
    DenseMatrix m(op.nrows(), op.ncols());
    std::vector<double> e(op.ncols(), 0.0), col(op.nrows());
    for (std::size_t j = 0; j < op.ncols(); ++j) {
        e[j] = 1.0;
        op.apply(e, std::span<double>(col));
        for (std::size_t i = 0; i < op.nrows(); ++i) m.at(i, j) = col[i];
        e[j] = 0.0;
    }
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(ncols, nrows);
    for (std::size_t i = 0; i < nrows; ++i)
        for (std::size_t j = 0; j < ncols; ++j) t.at(j, i) = at(i, j);
    return t;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
    if (x.size() != ncols) throw std::invalid_argument("DenseMatrix::multiply: length mismatch");
    std::vector<double> y(nrows, 0.0);
    for (std::size_t i = 0; i < nrows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < ncols; ++j) s += at(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> DenseMatrix::multiply_transpose(std::span<const double> u) const {
    if (u.size() != nrows)
        throw std::invalid_argument("DenseMatrix::multiply_transpose: length mismatch");
    std::vector<double> y(ncols, 0.0);
    for (std::size_t i = 0; i < nrows; ++i)
        for (std::size_t j = 0; j < ncols; ++j) y[j] += at(i, j) * u[i];
    return y;
}

double DenseMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data) s += v * v;
    return std::sqrt(s);
}

HouseholderQr::HouseholderQr(DenseMatrix m) : qr_(std::move(m)) {
    if (qr_.nrows < qr_.ncols)
        throw std::invalid_argument("HouseholderQr: requires nrows >= ncols");
    source_fro_ = qr_.frobenius_norm();

    const std::size_t mr = qr_.nrows, nc = qr_.ncols;
    tau_.assign(nc, 0.0);
    sign_.assign(nc, 1.0);
    for (std::size_t j = 0; j < nc; ++j) {
        // Householder vector for column j, rows j..m-1.
        double xnorm2 = 0.0;
        for (std::size_t i = j; i < mr; ++i) xnorm2 += qr_.at(i, j) * qr_.at(i, j);
        const double xnorm = std::sqrt(xnorm2);
        if (xnorm == 0.0) continue;  // column already zero; rank deficiency

        const double a0 = qr_.at(j, j);
        const double alpha = a0 >= 0.0 ? -xnorm : xnorm;
        const double v0 = a0 - alpha;
        // Normalize so v_j = 1 implicitly; store v_i / v0 below the diagonal.
        for (std::size_t i = j + 1; i < mr; ++i) qr_.at(i, j) /= v0;
        tau_[j] = (alpha - a0) / alpha;
        qr_.at(j, j) = alpha;

        // Apply (I - tau v v^T) to the remaining columns.
        for (std::size_t c = j + 1; c < nc; ++c) {
            double s = qr_.at(j, c);
            for (std::size_t i = j + 1; i < mr; ++i) s += qr_.at(i, j) * qr_.at(i, c);
            s *= tau_[j];
            qr_.at(j, c) -= s;
            for (std::size_t i = j + 1; i < mr; ++i) qr_.at(i, c) -= s * qr_.at(i, j);
        }
    }
    // Keep the convention R_jj >= 0 by folding signs into Q.
    for (std::size_t j = 0; j < nc; ++j) {
        if (qr_.at(j, j) < 0.0) {
            sign_[j] = -1.0;
            for (std::size_t c = j; c < nc; ++c) qr_.at(j, c) = -qr_.at(j, c);
        }
    }
}

double HouseholderQr::r_at(std::size_t i, std::size_t j) const {
    return i <= j ? qr_.at(i, j) : 0.0;
}

void HouseholderQr::apply_qt(std::span<double> y) const {
    if (y.size() != qr_.nrows) throw std::invalid_argument("HouseholderQr::apply_qt: length");
    for (std::size_t j = 0; j < qr_.ncols; ++j) {
        if (tau_[j] == 0.0) continue;
        double s = y[j];
        for (std::size_t i = j + 1; i < qr_.nrows; ++i) s += qr_.at(i, j) * y[i];
        s *= tau_[j];
        y[j] -= s;
        for (std::size_t i = j + 1; i < qr_.nrows; ++i) y[i] -= s * qr_.at(i, j);
    }
    for (std::size_t j = 0; j < qr_.ncols; ++j) y[j] *= sign_[j];
}

void HouseholderQr::apply_q(std::span<double> y) const {
    if (y.size() != qr_.nrows) throw std::invalid_argument("HouseholderQr::apply_q: length");
    for (std::size_t j = 0; j < qr_.ncols; ++j) y[j] *= sign_[j];
    for (std::size_t jj = qr_.ncols; jj-- > 0;) {
        if (tau_[jj] == 0.0) continue;
        double s = y[jj];
        for (std::size_t i = jj + 1; i < qr_.nrows; ++i) s += qr_.at(i, jj) * y[i];
        s *= tau_[jj];
        y[jj] -= s;
        for (std::size_t i = jj + 1; i < qr_.nrows; ++i) y[i] -= s * qr_.at(i, jj);
    }
}

double HouseholderQr::min_abs_r_diag() const {
    double mn = std::abs(qr_.at(0, 0));
    for (std::size_t j = 1; j < qr_.ncols; ++j) mn = std::min(mn, std::abs(qr_.at(j, j)));
    return mn;
}

std::vector<double> HouseholderQr::solve_ls(std::span<const double> rhs) const {
    if (rhs.size() != qr_.nrows) throw std::invalid_argument("HouseholderQr::solve_ls: length");
    if (min_abs_r_diag() <= 1e-14 * source_fro_)
        throw std::runtime_error("HouseholderQr::solve_ls: numerically singular R diagonal");

    std::vector<double> y(rhs.begin(), rhs.end());
    apply_qt(y);
    std::vector<double> x(qr_.ncols, 0.0);
    for (std::size_t jj = qr_.ncols; jj-- > 0;) {
        double s = y[jj];
        for (std::size_t c = jj + 1; c < qr_.ncols; ++c) s -= qr_.at(jj, c) * x[c];
        x[jj] = s / qr_.at(jj, jj);
    }
    return x;
}

HouseholderQr::Verification HouseholderQr::verify(const DenseMatrix& original) const {
    const std::size_t mr = qr_.nrows, nc = qr_.ncols;
    // Q^T Q - I, examined column by column through the reflector applier.
    double ortho = 0.0;
    std::vector<double> e(mr, 0.0);
    DenseMatrix q(mr, nc);
    for (std::size_t j = 0; j < nc; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        apply_q(e);
        for (std::size_t i = 0; i < mr; ++i) q.at(i, j) = e[i];
    }
    for (std::size_t a = 0; a < nc; ++a)
        for (std::size_t b = 0; b < nc; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < mr; ++i) s += q.at(i, a) * q.at(i, b);
            ortho = std::max(ortho, std::abs(s - (a == b ? 1.0 : 0.0)));
        }

    double err2 = 0.0;
    for (std::size_t j = 0; j < nc; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        for (std::size_t i = 0; i <= j; ++i) e[i] = qr_.at(i, j);
        apply_q(e);  // j-th column of Q R
        for (std::size_t i = 0; i < mr; ++i) {
            const double d = e[i] - original.at(i, j);
            err2 += d * d;
        }
    }
    const double fro = original.frobenius_norm();
    return {ortho, fro > 0.0 ? std::sqrt(err2) / fro : std::sqrt(err2)};
}

std::vector<double> dense_ls_solve(const DenseMatrix& m, std::span<const double> rhs) {
    return HouseholderQr(m).solve_ls(rhs);
}

SvdResult jacobi_svd(const DenseMatrix& m) {
    // One-sided Jacobi on the tall orientation; columns of the work matrix
    // converge to U * diag(sigma) while V accumulates the rotations.
    const bool transposed = m.nrows < m.ncols;
    DenseMatrix work = transposed ? m.transposed() : m;
    const std::size_t rows = work.nrows, cols = work.ncols;

    DenseMatrix v = DenseMatrix::identity(cols);
    const double fro = work.frobenius_norm();
    const double tol = 1e-14 * fro;
    const int max_sweeps = 60;

    if (fro > 0.0) {
        bool rotated = true;
        int sweep = 0;
        for (; sweep < max_sweeps && rotated; ++sweep) {
            rotated = false;
            for (std::size_t p = 0; p + 1 < cols; ++p) {
                for (std::size_t q = p + 1; q < cols; ++q) {
                    double app = 0.0, aqq = 0.0, apq = 0.0;
                    for (std::size_t i = 0; i < rows; ++i) {
                        const double cp = work.at(i, p), cq = work.at(i, q);
                        app += cp * cp;
                        aqq += cq * cq;
                        apq += cp * cq;
                    }
                    if (std::abs(apq) <= tol * std::max(std::sqrt(app), std::sqrt(aqq)))
                        continue;
                    rotated = true;
                    const double zeta = (aqq - app) / (2.0 * apq);
                    const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                     (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = c * t;
                    for (std::size_t i = 0; i < rows; ++i) {
                        const double cp = work.at(i, p), cq = work.at(i, q);
                        work.at(i, p) = c * cp - s * cq;
                        work.at(i, q) = s * cp + c * cq;
                    }
                    for (std::size_t i = 0; i < cols; ++i) {
                        const double vp = v.at(i, p), vq = v.at(i, q);
                        v.at(i, p) = c * vp - s * vq;
                        v.at(i, q) = s * vp + c * vq;
                    }
                }
            }
        }
        if (sweep == max_sweeps && rotated)
            throw std::runtime_error("jacobi_svd: no convergence within sweep cap");
    }

    std::vector<double> sigma(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        double s2 = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s2 += work.at(i, j) * work.at(i, j);
        sigma[j] = std::sqrt(s2);
    }

    std::vector<std::size_t> order(cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

    SvdResult out;
    out.singular_values.resize(cols);
    out.u = DenseMatrix(rows, cols);
    out.v = DenseMatrix(cols, cols);
    for (std::size_t j = 0; j < cols; ++j) {
        const std::size_t src = order[j];
        out.singular_values[j] = sigma[src];
        const double inv = sigma[src] > 0.0 ? 1.0 / sigma[src] : 0.0;
        for (std::size_t i = 0; i < rows; ++i) out.u.at(i, j) = work.at(i, src) * inv;
        for (std::size_t i = 0; i < cols; ++i) out.v.at(i, j) = v.at(i, src);
    }
    if (transposed) std::swap(out.u, out.v);
    return out;
}

std::vector<double> dense_minnorm_solve(const DenseMatrix& m, std::span<const double> rhs) {
    if (rhs.size() != m.nrows) throw std::invalid_argument("dense_minnorm_solve: length mismatch");
    SvdResult svd = jacobi_svd(m);
    const double smax = svd.singular_values.empty() ? 0.0 : svd.singular_values.front();
    const double cutoff = 1e-12 * smax;

    std::vector<double> x(m.ncols, 0.0);
    for (std::size_t j = 0; j < svd.singular_values.size(); ++j) {
        const double s = svd.singular_values[j];
        if (s <= cutoff || s == 0.0) break;  // sorted decreasing
        double uj_b = 0.0;
        for (std::size_t i = 0; i < m.nrows; ++i) uj_b += svd.u.at(i, j) * rhs[i];
        const double coeff = uj_b / s;
        for (std::size_t i = 0; i < m.ncols; ++i) x[i] += coeff * svd.v.at(i, j);
    }
    return x;
}

E2Result stewart_e2(double norm_atr, double norm_r) {
    if (norm_r == 0.0) return {0.0, true};
    return {norm_atr / norm_r, false};
}

E1Result stewart_e1(std::span<const double> x, std::span<const double> r,
                    std::span<const double> r_hat) {
    const double xnorm = norm2(x);
    if (xnorm == 0.0) throw std::invalid_argument("stewart_e1: x is zero");
    if (r.size() != r_hat.size()) throw std::invalid_argument("stewart_e1: residual lengths");

    double e2sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double d = r[i] - r_hat[i];
        e2sum += d * d;
    }
    const double rr = dot(r, r);
    const double rhrh = dot(r_hat, r_hat);
    // ||r||^2 = ||r_hat||^2 + ||e||^2 holds when r_hat is the exact residual.
    const bool ok = std::abs(rr - rhrh - e2sum) <= 1e-8 * std::max(rr, 1e-300);
    return {std::sqrt(e2sum) / xnorm, ok};
}

double optimal_backward_error(const DenseMatrix& a, std::span<const double> b,
                              std::span<const double> x) {
    if (b.size() != a.nrows || x.size() != a.ncols)
        throw std::invalid_argument("optimal_backward_error: dimension mismatch");
    const double xnorm = norm2(x);
    if (xnorm == 0.0) throw std::invalid_argument("optimal_backward_error: x is zero");

    std::vector<double> r = a.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const double rnorm = norm2(r);
    if (rnorm == 0.0) return 0.0;  // exact consistent solve

    const double eta = rnorm / xnorm;
    const std::size_t mr = a.nrows, nc = a.ncols;
    DenseMatrix k(mr + nc, nc);
    for (std::size_t i = 0; i < mr; ++i)
        for (std::size_t j = 0; j < nc; ++j) k.at(i, j) = a.at(i, j);
    for (std::size_t j = 0; j < nc; ++j) k.at(mr + j, j) = eta;

    std::vector<double> v(mr + nc, 0.0);
    std::copy(r.begin(), r.end(), v.begin());

    HouseholderQr qr(std::move(k));
    qr.apply_qt(v);
    // ||K y|| at the minimizer equals the norm of the first ncols
    // coordinates of Q^T v.
    double c2 = 0.0;
    for (std::size_t j = 0; j < nc; ++j) c2 += v[j] * v[j];
    return std::sqrt(c2) / xnorm;
}

}  // namespace lsqkit
