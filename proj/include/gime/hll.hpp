#pragma once

// Dense HyperLogLog distinct-count sketch for pools whose exact value sets
// do not fit in memory. Standard error is 1.04/sqrt(2^precision); the
// default precision 14 keeps relative error under 1%. Merge is register-wise
// max, associative and commutative.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "gime/digest.hpp"

namespace gime {

class HllSketch {
 public:
  explicit HllSketch(unsigned precision = 14) : precision_(precision) {
    registers_.assign(size_t{1} << precision_, 0);
  }

  void add(std::string_view key) {
    const uint64_t h = mix64(fnv1a64(key));
    const uint64_t bucket = h >> (64 - precision_);
    const uint64_t rest = (h << precision_) | (uint64_t{1} << (precision_ - 1));
    const uint8_t rank = static_cast<uint8_t>(std::countl_zero(rest) + 1);
    registers_[bucket] = std::max(registers_[bucket], rank);
  }

  void merge(const HllSketch& other) {
    for (size_t i = 0; i < registers_.size(); ++i) {
      registers_[i] = std::max(registers_[i], other.registers_[i]);
    }
  }

  double estimate() const {
    const double m = static_cast<double>(registers_.size());
    double sum = 0;
    size_t zeros = 0;
    for (uint8_t r : registers_) {
      sum += std::ldexp(1.0, -r);
      if (r == 0) ++zeros;
    }
    const double alpha = 0.7213 / (1.0 + 1.079 / m);
    double estimate = alpha * m * m / sum;
    if (estimate <= 2.5 * m && zeros > 0) {
      estimate = m * std::log(m / static_cast<double>(zeros));  // linear counting
    }
    return estimate;
  }

  unsigned precision() const { return precision_; }

 private:
  unsigned precision_;
  std::vector<uint8_t> registers_;
};

}  // namespace gime
