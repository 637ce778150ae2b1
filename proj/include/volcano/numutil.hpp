#ifndef VOLCANO_NUMUTIL_HPP
#define VOLCANO_NUMUTIL_HPP

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace volcano {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// Raised when a configured search/size cap is exceeded (CLI exit code 3).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an internal invariant fails (CLI exit code 4).
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline u64 add_mod(u64 a, u64 b, u64 m) {
    u64 s = a + b;
    if (s < a || s >= m) s -= m;
    return s;
}

inline u64 sub_mod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + m - b; }

inline u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>((u128(a) * b) % m); }

u64 pow_mod(u64 a, u128 e, u64 m);

// Inverse of a mod m, gcd(a, m) must be 1.
u64 inv_mod(u64 a, u64 m);

u64 gcd_u64(u64 a, u64 b);

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime_u64(u64 n);

u64 next_prime(u64 n);

// Largest r with r*r <= n.
u64 isqrt_u64(u64 n);

bool is_square_u64(u64 n, u64* root = nullptr);

// Kronecker symbol (a / n) extended to all integers, n != 0.
int kronecker(i64 a, i64 n);

// Square root mod an odd prime via Tonelli-Shanks; a must be a QR (or 0).
u64 sqrt_mod_prime(u64 a, u64 p);

// Prime factorization, ascending (trial division + Pollard-Brent rho).
std::vector<std::pair<u64, int>> factorize(u64 n);

// l-adic valuation.
int valuation(u64 n, u64 l);

// All divisors of n, ascending.
std::vector<u64> divisors(u64 n);

}  // namespace volcano

#endif
