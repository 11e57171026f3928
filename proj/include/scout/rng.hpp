#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "scout/core.hpp"

/**
 * \file rng.hpp
 *
 * @brief Counter-based random streams.
 *
 * Every stream is a pure function of (seed, stream tag, particle, step), so a particle's noise does not depend on
 * which worker advances it or in which order particles are visited.
 */

namespace scout {

  /// SplitMix64 finaliser.
  [[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// SplitMix64 engine, satisfies UniformRandomBitGenerator.
  class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
      state_ += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = state_;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
  };

  enum class Stream : std::uint64_t { noise = 1, resample = 2, init = 3, misc = 4 };

  /// Engine for one (seed, stream, particle, step) counter.
  [[nodiscard]] inline SplitMix64 stream_engine(std::uint64_t seed, Stream tag, std::uint64_t particle,
                                                std::uint64_t step) noexcept {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(tag));
    h = mix64(h ^ particle);
    h = mix64(h ^ (step * 0xD1B54A32D192ED03ULL));
    return SplitMix64{h};
  }

  /// Uniform double on the open interval (0, 1).
  template <typename URBG>
  [[nodiscard]] double uniform_open01(URBG& g) {
    // 53 random mantissa bits, shifted half an ulp off zero.
    return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Fill with independent standard normals.
  template <typename URBG>
  void fill_standard_normal(URBG& g, VectorRef out) {
    std::normal_distribution<double> normal{0.0, 1.0};
    for (Index i = 0; i < out.size(); ++i) {
      out[i] = normal(g);
    }
  }

}  // namespace scout
