// Copyright (c) 2026 softcreep contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace softcreep {

// Counter-based random streams.
//
// Every variate is a pure function of (seed, stream path, counter), so a
// computation partitioned across workers or chunk sizes draws exactly the
// same numbers as a serial run. There is no mutable generator state to
// advance or hand off.
//
// The word function is the SplitMix64 sequence evaluated at an arbitrary
// offset: state = key + counter * golden gamma, then the usual finalizer.
// Statistical quality matches SplitMix64; not cryptographic.

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace detail

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_(detail::mix64((seed + detail::kGolden) ^
                           detail::mix64(stream_id * 0xA0761D6478BD642Full + 1))) {}

  // Child stream addressed by index; children of distinct parents or
  // distinct indices are statistically independent.
  RandomStream derive(std::uint64_t child) const {
    RandomStream s(*this);
    s.key_ = detail::mix64(key_ ^ detail::mix64((child + 1) * detail::kGolden));
    return s;
  }

  std::uint64_t word(std::uint64_t counter) const {
    return detail::mix64(key_ + counter * detail::kGolden);
  }

  // Uniform on the open interval (0, 1); never returns an endpoint, so the
  // value is always a valid quantile argument.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(word(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

}  // namespace softcreep
