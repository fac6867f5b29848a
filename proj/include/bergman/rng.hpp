#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace bergman {

// Deterministic seed derivation: every worker/chain/substream gets its own
// engine from (root, path...) so that parallel runs are reproducible and
// reductions can be done in a fixed order.
uint64_t splitmix64(uint64_t& state);
uint64_t derive_seed(uint64_t root, uint64_t a = 0, uint64_t b = 0, uint64_t c = 0);
std::mt19937_64 make_engine(uint64_t root, uint64_t a = 0, uint64_t b = 0, uint64_t c = 0);

// standard complex Gaussian: E c = 0, E c^2 = 0, E |c|^2 = 1
std::complex<double> complex_gaussian(std::mt19937_64& rng);

}  // namespace bergman
