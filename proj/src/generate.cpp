#include "lsqkit/generate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lsqkit/vec.hpp"

namespace lsqkit {

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

std::vector<double> Rng::gaussian_vector(std::size_t n) {
    std::vector<double> v(n);
    for (double& vi : v) vi = gaussian();
    return v;
}

namespace {

/// Orthonormal rows x cols factor: QR of a seeded gaussian matrix.
DenseMatrix random_orthonormal(Rng& rng, std::size_t rows, std::size_t cols) {
    DenseMatrix g(rows, cols);
    for (double& v : g.data) v = rng.gaussian();
    HouseholderQr qr(std::move(g));
    DenseMatrix q(rows, cols);
    std::vector<double> e(rows, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        qr.apply_q(e);
        for (std::size_t i = 0; i < rows; ++i) q.at(i, j) = e[i];
    }
    return q;
}

}  // namespace

GeneratedProblem generate_problem(const GenerateSpec& spec) {
    if (spec.nrows == 0 || spec.ncols == 0)
        throw std::invalid_argument("generate_problem: dimensions must be positive");
    const std::size_t full = std::min(spec.nrows, spec.ncols);
    const std::size_t rank = spec.rank == 0 ? full : spec.rank;
    if (rank > full) throw std::invalid_argument("generate_problem: rank exceeds min(m, n)");
    if (!(spec.cond >= 1.0)) throw std::invalid_argument("generate_problem: cond must be >= 1");

    Rng rng(spec.seed);
    const DenseMatrix u = random_orthonormal(rng, spec.nrows, rank);
    const DenseMatrix v = random_orthonormal(rng, spec.ncols, rank);

    GeneratedProblem out;
    out.singular_values.resize(rank);
    for (std::size_t i = 0; i < rank; ++i)
        out.singular_values[i] =
            rank == 1 ? 1.0
                      : std::pow(spec.cond, -static_cast<double>(i) /
                                                static_cast<double>(rank - 1));

    out.a = DenseMatrix(spec.nrows, spec.ncols);
    for (std::size_t i = 0; i < spec.nrows; ++i)
        for (std::size_t j = 0; j < spec.ncols; ++j) {
            double s = 0.0;
            for (std::size_t l = 0; l < rank; ++l)
                s += u.at(i, l) * out.singular_values[l] * v.at(j, l);
            out.a.at(i, j) = s;
        }

    const std::vector<double> x_true = rng.gaussian_vector(spec.ncols);
    out.b = out.a.multiply(x_true);
    if (!spec.consistent) {
        const std::vector<double> w = rng.gaussian_vector(spec.nrows);
        const double bn = norm2(out.b);
        const double wn = norm2(w);
        const double scale = wn > 0.0 ? spec.noise * (bn > 0.0 ? bn : 1.0) / wn : 0.0;
        for (std::size_t i = 0; i < out.b.size(); ++i) out.b[i] += scale * w[i];
    }
    return out;
}

}  // namespace lsqkit
