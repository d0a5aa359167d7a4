#pragma once

#include "bsc/types.h"

#include <cstdint>
#include <random>

namespace bsc {

// mt19937_64 + Box-Muller. std::normal_distribution is avoided on purpose:
// its output sequence differs between standard libraries, and model/index
// files must reproduce bit-identically for a fixed seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0,1).
    double uniform();

    /// Standard normal deviate.
    double gaussian();

    /// Matrix of iid standard normals, filled column by column.
    Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols);

    std::uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Orthonormal columns from the thin QR of a seeded Gaussian matrix (rows >= cols).
Matrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace bsc
