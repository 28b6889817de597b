#include "guardrail/random.hpp"

namespace guardrail {

double Rng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Largest multiple of `bound` representable; draws above it are rejected.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    auto x = next();
    if (x < limit) return x % bound;
  }
}

}  // namespace guardrail
