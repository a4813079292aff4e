#include "arw/rng.hpp"

#include <cmath>
#include <numbers>

namespace arw {

u64 splitmix64(u64& state) {
    u64 z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

u64 mix_seed(u64 seed, u64 index) {
    u64 s = seed ^ (0x9e3779b97f4a7c15ull * (index + 1));
    u64 a = splitmix64(s);
    u64 b = splitmix64(s);
    return a ^ (b << 1);
}

CounterRng::CounterRng(u64 seed, u64 stream) : state_(mix_seed(seed, stream)) {}

u64 CounterRng::next_u64() {
    return splitmix64(state_);
}

double CounterRng::next_unit() {
    // 53 mantissa bits; shifted to (0,1]
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double CounterRng::next_normal() {
    if (have_cached_) {
        have_cached_ = false;
        return cached_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * std::numbers::pi * u2;
    cached_ = rad * std::sin(ang);
    have_cached_ = true;
    return rad * std::cos(ang);
}

}  // namespace arw
