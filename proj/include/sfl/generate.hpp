#pragma once

#include <cstdint>
#include <random>

#include "sfl/core.hpp"

namespace sfl {

using Rng = std::mt19937_64;

// Deterministic per-trial sub-seed (splitmix64 over seed and index).
std::uint64_t subseed(std::uint64_t seed, std::uint64_t index);

HermitianMatrix random_hermitian(Rng& rng, int dim, double scale = 1.0);

// Random triple at lambda = 0 with 0 strictly inside the spectral range of H
// and a margin from the spectrum itself.
Triple random_triple(Rng& rng, int dim);

// H with an exact m-dimensional kernel (lambda = 0) and a random direction.
Triple degenerate_triple(Rng& rng, int dim, int m);

// The U-turn family: H = [[0,1],[1,0]], V = diag(1,-1), lambda = 1; the
// eigenvalue sqrt(1+s^2) touches 1 at s = 0 to second order.
Triple uturn_triple();

// The cubic-touch instance H = diag(0,1,-1), V = [[0,1,1],[1,1,0],[1,0,0]],
// lambda = 0: det(H+sV) = -s^3, single Jordan block of size 3.
Triple order3_triple();

// m = 1 instance of prescribed direction order d (1..4) at lambda = 0,
// constructed from the crossing-operator conditions: alpha = 0 and the chain
// <(Rhat Vhat)^j Rhat v, v> vanishing for j <= d-3 with the d-2 term nonzero.
// Seed 0 with d = 3, dim = 3 reproduces order3_triple().
Triple order_d_triple(Rng& rng, int d, int dim);

// Block-diagonal direct sum; lambdas must agree.
Triple direct_sum(const Triple& a, const Triple& b);

// Piecewise-linear path with non-resonant vertices at the given lambda.
OperatorPath random_path(Rng& rng, int dim, int segments, double lambda = 0.0);

// Structure check for generated instances: Jordan profile at r = 0 must be a
// single block of size d. Returns false instead of throwing.
bool validates_order_d(const Triple& t, int d, const Config& cfg = {});

} // namespace sfl
