#pragma once

#include <string>
#include <utility>
#include <vector>

#include "arw/numeric.hpp"

namespace arw {

/// Integer lattice vector.
struct Vec2 {
    i64 x = 0;
    i64 y = 0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    /// rotation by i: (x,y) -> (-y,x)
    Vec2 rot90() const { return {-y, x}; }
};

/// <a,b> as i128 (components can be ~1e9, products ~1e18).
inline i128 dot(const Vec2& a, const Vec2& b) {
    return static_cast<i128>(a.x) * b.x + static_cast<i128>(a.y) * b.y;
}

/// Exact angular order on nonzero lattice vectors, ascending in [0, 2pi).
bool angle_less(const Vec2& a, const Vec2& b);

struct Factorization {
    u64 n = 0;
    std::vector<std::pair<u64, int>> factors;  // (prime, exponent), ascending primes
};

/// Trial division up to sqrt(n). Rejects n = 0.
Factorization factorize(u64 n);

/// Trial-division primality test (desk scale).
bool is_prime(u64 p);

/// r_2(n) from the factorization: 0 if some q = 3 (mod 4) divides n to an odd
/// power, else 4 * prod_{p = 1 (4)} (e_p + 1).
u64 r2(u64 n);
u64 r2_from_factorization(const Factorization& f);

/// Oracle: direct enumeration of a^2 + b^2 = n over all signed pairs.
u64 r2_bruteforce(u64 n);

/// The lattice points on the circle of radius sqrt(n), in ascending angular
/// order. multiplicity() = r2(n); energy() = 4 pi^2 n.
struct FrequencySet {
    u64 n = 0;
    std::vector<Vec2> points;

    int multiplicity() const { return static_cast<int>(points.size()); }
    double energy() const;
    bool contains(const Vec2& v) const;
    /// Representatives of the {v, -v} pairs: x > 0, or x = 0 and y > 0.
    std::vector<Vec2> half_lattice() const;
};

/// Primary enumeration. Uses the O(sqrt n) scan at desk scale and the
/// Gaussian-integer product construction for larger n (both exact).
FrequencySet enumerate_lambda(u64 n);

/// O(sqrt n) scan with exact integer square-root tests.
FrequencySet enumerate_lambda_scan(u64 n);

/// Independent second path: units * (1+i)^e2 * prod (x+iy)^(e-l) (x-iy)^l * prod q^eq.
FrequencySet enumerate_lambda_from_factorization(const Factorization& f);

/// The unique x >= y >= 0 with x^2 + y^2 = p and theta = atan2(y, x) in [0, pi/4].
struct PrimeAngle {
    u64 p = 0;
    u64 x = 0;
    u64 y = 0;
    double theta = 0;
};

/// Requires p prime with p = 1 (mod 4); rejects anything else.
PrimeAngle prime_angle(u64 p);

enum class SequenceKind { generic, cilleruelo, nu_a };

std::string to_string(SequenceKind k);

/// A constructed sequence of energy levels with strictly increasing
/// multiplicities, tending to a named limiting angular measure.
struct EnergySequence {
    SequenceKind kind = SequenceKind::generic;
    double a = 0;  // nu_a half-width, meaningful for kind = nu_a
    std::vector<u64> terms;
    std::vector<Factorization> term_factors;  // known from construction
    std::string target;                       // description of the limit measure
};

/// generic:    products of the first count primes = 1 (mod 4); limit uniform.
/// cilleruelo: n_k = p_k^k over split primes with shrinking angles, chosen so
///             that mu_hat(4) increases toward 1 along the sequence.
/// nu_a:       n_k = p_k^floor(a/theta_k) over a shrinking-angle prime stream,
///             keeping terms whose multiplicity strictly increases.
/// Throws SearchExhausted when fewer than count suitable terms exist below
/// search_bound (or above the word size).
EnergySequence build_sequence(SequenceKind kind, double a, int count, u64 search_bound);

}  // namespace arw
