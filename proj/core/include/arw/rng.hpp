#pragma once

#include <cstdint>

#include "arw/numeric.hpp"

namespace arw {

/// SplitMix64 step.
u64 splitmix64(u64& state);

/// Stateless mix of (seed, index) into an independent stream key; the
/// splittable per-trial seeding scheme.
u64 mix_seed(u64 seed, u64 index);

/// Deterministic keyed RNG: SplitMix64 stream plus Box-Muller normals with
/// fixed consumption (two uniforms per pair). Identical output for identical
/// (seed, stream) on any platform with IEEE doubles.
class CounterRng {
  public:
    CounterRng(u64 seed, u64 stream = 0);
    u64 next_u64();
    /// uniform in (0, 1]
    double next_unit();
    double next_normal();

  private:
    u64 state_;
    double cached_ = 0;
    bool have_cached_ = false;
};

}  // namespace arw
