/// @file generate.hpp
/// @brief Seeded synthetic least-squares problem generation with a
///        constructed singular spectrum. Deterministic across platforms:
///        the generator uses its own splitmix64 / Box-Muller stream rather
///        than implementation-defined standard-library distributions.

#pragma once

#include <cstdint>
#include <vector>

#include "lsqkit/backerr.hpp"

namespace lsqkit {

/// splitmix64 stream with uniform and gaussian draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double gaussian();

    std::vector<double> gaussian_vector(std::size_t n);

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct GenerateSpec {
    std::uint64_t seed = 0;
    std::size_t nrows = 0;
    std::size_t ncols = 0;
    std::size_t rank = 0;   // 0 selects full rank min(nrows, ncols)
    double cond = 1.0;      // sigma_max / sigma_min over the nonzero spectrum
    bool consistent = false;
    double noise = 0.25;    // size of the out-of-range rhs component, relative to ||A x||
};

struct GeneratedProblem {
    DenseMatrix a;
    std::vector<double> b;
    std::vector<double> singular_values;  // the constructed spectrum
};

/// A = U diag(sigma) V^T with orthonormal factors drawn from the seeded
/// stream and sigma geometric from 1 down to 1/cond over `rank` values.
/// consistent=true makes b = A x_true exactly; otherwise a noise component
/// is added so the optimal residual is nonzero.
GeneratedProblem generate_problem(const GenerateSpec& spec);

}  // namespace lsqkit
