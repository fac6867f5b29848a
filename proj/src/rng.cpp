#include "bergman/rng.hpp"

namespace bergman {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t root, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t s = root;
  uint64_t h = splitmix64(s);
  s ^= a + 0x165667b19e3779f9ULL;
  h ^= splitmix64(s);
  s ^= b + 0x27d4eb2f165667c5ULL;
  h ^= splitmix64(s);
  s ^= c + 0x85ebca77c2b2ae63ULL;
  h ^= splitmix64(s);
  return h;
}

std::mt19937_64 make_engine(uint64_t root, uint64_t a, uint64_t b, uint64_t c) {
  return std::mt19937_64(derive_seed(root, a, b, c));
}

std::complex<double> complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  return {n(rng), n(rng)};
}

}  // namespace bergman
