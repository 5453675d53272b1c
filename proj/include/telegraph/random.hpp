#pragma once

#include <cstdint>
#include <random>

#include "telegraph/line.hpp"

namespace telegraph {

using Rng = std::mt19937_64;

/// Seeds a generator from a base seed and a stream tag so independent
/// consumers never share a sequence.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Eigenvalue ranges for randomly drawn constants. L and C get log-uniform
/// spectra, R and G uniform ones (which may straddle zero).
struct RandomLineOptions {
  double lc_min = 0.5;
  double lc_max = 2.0;
  double loss_min = -0.2;
  double loss_max = 1.0;
};

/// Random orthogonal n x n matrix (QR of a Gaussian matrix, sign-fixed).
RealMatrix random_orthogonal(int n, Rng& rng);

/// Q diag(values) Q^T with a random orthogonal Q.
RealMatrix random_symmetric(int n, Rng& rng, double lo, double hi, bool log_uniform);

LineConstants random_line(int n, Rng& rng, const RandomLineOptions& options = {});

/// Gaussian complex matrix with unit-variance real and imaginary parts.
ComplexMatrix random_complex(int rows, int cols, Rng& rng);

/// Haar-distributed unitary matrix.
ComplexMatrix random_unitary(int n, Rng& rng);

}  // namespace telegraph
