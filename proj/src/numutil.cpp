#include "volcano/numutil.hpp"

#include <algorithm>
#include <cmath>

namespace volcano {

u64 pow_mod(u64 a, u128 e, u64 m) {
    u64 r = m == 1 ? 0 : 1;
    a %= m;
    while (e) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

u64 inv_mod(u64 a, u64 m) {
    i64 t = 0, nt = 1;
    i64 r = static_cast<i64>(m), nr = static_cast<i64>(a % m);
    while (nr != 0) {
        i64 q = r / nr;
        i64 tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) throw std::invalid_argument("inv_mod: not invertible");
    if (t < 0) t += static_cast<i64>(m);
    return static_cast<u64>(t);
}

u64 gcd_u64(u64 a, u64 b) {
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

static bool miller_rabin(u64 n, u64 a) {
    if (a % n == 0) return true;
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    u64 x = pow_mod(a % n, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    // This witness set is deterministic for n < 3.3e24.
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (!miller_rabin(n, a)) return false;
    }
    return true;
}

u64 next_prime(u64 n) {
    if (n < 2) return 2;
    ++n;
    if (n % 2 == 0) ++n;
    while (!is_prime_u64(n)) n += 2;
    return n;
}

u64 isqrt_u64(u64 n) {
    if (n == 0) return 0;
    u64 r = static_cast<u64>(std::max(0.0L, sqrtl(static_cast<long double>(n))));
    while (r > 0 && (u128(r) * r) > n) --r;
    while (u128(r + 1) * (r + 1) <= n) ++r;
    return r;
}

bool is_square_u64(u64 n, u64* root) {
    u64 r = isqrt_u64(n);
    if (r * r != n) return false;
    if (root) *root = r;
    return true;
}

int kronecker(i64 a, i64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int sign = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) sign = -sign;
    }
    if (n % 2 == 0) {
        if (a % 2 == 0) return 0;
        int v = 0;
        while (n % 2 == 0) n /= 2, ++v;
        i64 am8 = ((a % 8) + 8) % 8;
        if ((v & 1) && (am8 == 3 || am8 == 5)) sign = -sign;
    }
    a %= n;
    if (a < 0) a += n;
    // Now (a / n) with n odd positive, via quadratic reciprocity.
    while (a != 0) {
        int v = 0;
        while (a % 2 == 0) a /= 2, ++v;
        i64 nm8 = n % 8;
        if ((v & 1) && (nm8 == 3 || nm8 == 5)) sign = -sign;
        if ((a % 4) == 3 && (n % 4) == 3) sign = -sign;
        std::swap(a, n);
        a %= n;
    }
    return n == 1 ? sign : 0;
}

u64 sqrt_mod_prime(u64 a, u64 p) {
    a %= p;
    if (a == 0) return 0;
    if (p == 2) return a;
    if (pow_mod(a, (p - 1) / 2, p) != 1) throw std::invalid_argument("sqrt_mod_prime: not a residue");
    if (p % 4 == 3) return pow_mod(a, (p + 1) / 4, p);
    // Tonelli-Shanks.
    u64 q = p - 1;
    int s = 0;
    while ((q & 1) == 0) q >>= 1, ++s;
    u64 z = 2;
    while (pow_mod(z, (p - 1) / 2, p) != p - 1) ++z;
    u64 m = s;
    u64 c = pow_mod(z, q, p);
    u64 t = pow_mod(a, q, p);
    u64 r = pow_mod(a, (q + 1) / 2, p);
    while (t != 1) {
        u64 i = 0, tt = t;
        while (tt != 1) {
            tt = mul_mod(tt, tt, p);
            ++i;
        }
        u64 b = c;
        for (u64 k = 0; k + i + 1 < m; ++k) b = mul_mod(b, b, p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    return r;
}

static u64 pollard_rho(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        auto f = [&](u64 x) { return add_mod(mul_mod(x, x, n), c, n); };
        u64 x = 2, y = 2, d = 1;
        u64 power = 1, lam = 0, xs = x;
        // Brent's cycle detection with batched gcds.
        while (d == 1) {
            if (lam == power) {
                xs = y;
                power *= 2;
                lam = 0;
            }
            u64 q = 1;
            u64 steps = std::min<u64>(128, power - lam);
            u64 ysave = y;
            for (u64 i = 0; i < steps; ++i) {
                y = f(y);
                q = mul_mod(q, xs > y ? xs - y : y - xs, n);
            }
            lam += steps;
            d = gcd_u64(q, n);
            if (d == n) {
                // Backtrack step by step.
                y = ysave;
                d = 1;
                for (u64 i = 0; i < steps && d == 1; ++i) {
                    y = f(y);
                    d = gcd_u64(xs > y ? xs - y : y - xs, n);
                }
                break;
            }
        }
        if (d != 1 && d != n) return d;
    }
}

static void factor_rec(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

std::vector<std::pair<u64, int>> factorize(u64 n) {
    std::vector<u64> fl;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull, 41ull, 43ull,
                  47ull, 53ull, 59ull, 61ull, 67ull, 71ull, 73ull, 79ull, 83ull, 89ull, 97ull}) {
        while (n % p == 0) {
            fl.push_back(p);
            n /= p;
        }
    }
    for (u64 p = 101; p * p <= n && p < 20000; p += 2) {
        while (n % p == 0) {
            fl.push_back(p);
            n /= p;
        }
    }
    factor_rec(n, fl);
    std::sort(fl.begin(), fl.end());
    std::vector<std::pair<u64, int>> out;
    for (u64 p : fl) {
        if (!out.empty() && out.back().first == p)
            ++out.back().second;
        else
            out.emplace_back(p, 1);
    }
    return out;
}

int valuation(u64 n, u64 l) {
    if (n == 0) throw std::invalid_argument("valuation of 0");
    int v = 0;
    while (n % l == 0) n /= l, ++v;
    return v;
}

std::vector<u64> divisors(u64 n) {
    auto f = factorize(n);
    std::vector<u64> out{1};
    for (auto [p, e] : f) {
        size_t sz = out.size();
        u64 pk = 1;
        for (int i = 1; i <= e; ++i) {
            pk *= p;
            for (size_t j = 0; j < sz; ++j) out.push_back(out[j] * pk);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace volcano
