#include "randfeat/rng.hpp"

#include <limits>

namespace randfeat {

std::uint64_t uniform_index(std::mt19937_64& engine, std::uint64_t n) {
  // Rejection on the top multiple of n.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine();
  } while (x >= limit);
  return x % n;
}

}  // namespace randfeat
