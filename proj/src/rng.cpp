#include "gime/rng.hpp"

#include <algorithm>
#include <numeric>

namespace gime {

std::vector<uint64_t> sample_without_replacement(std::vector<uint64_t>& scratch,
                                                 uint64_t n, Rng& rng) {
  const uint64_t pool_size = scratch.size();
  std::vector<uint64_t> swapped(n);
  for (uint64_t t = 0; t < n; ++t) {
    const uint64_t j = t + rng.bounded(pool_size - t);
    std::swap(scratch[t], scratch[j]);
    swapped[t] = j;
  }
  std::vector<uint64_t> out(scratch.begin(),
                            scratch.begin() + static_cast<ptrdiff_t>(n));
  // Undo swaps in reverse so scratch stays the identity permutation.
  for (uint64_t t = n; t-- > 0;) {
    std::swap(scratch[t], scratch[swapped[t]]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<uint64_t> sample_without_replacement(uint64_t pool_size, uint64_t n,
                                                 Rng& rng) {
  std::vector<uint64_t> scratch(pool_size);
  std::iota(scratch.begin(), scratch.end(), 0);
  return sample_without_replacement(scratch, n, rng);
}

}  // namespace gime
