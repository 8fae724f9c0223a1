#pragma once

#include "nestderiv/linalg.hpp"

#include <cstdint>
#include <random>

namespace nestderiv {

/// Seeded source of random scalars, vectors and matrices. Sequences are
/// reproducible for a fixed seed on a given standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }

    /// Complex standard normal: E|z|^2 = 1.
    Complex complex_normal();

    CMatrix gaussian_matrix(Index rows, Index cols);
    CVector gaussian_vector(Index n);
    CVector unit_vector(Index n);

    /// Haar-distributed unitary (QR of a complex Ginibre matrix with phase fix).
    CMatrix unitary(Index n);

    /// Uniform integer in [lo, hi].
    Index uniform_index(Index lo, Index hi);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace nestderiv
