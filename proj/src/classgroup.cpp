#include "volcano/classgroup.hpp"

#include <algorithm>
#include <numeric>

namespace volcano {

namespace {

constexpr i64 kEnumerationCap = 100000000;  // |D| bound for exhaustive form enumeration

void check_disc(i64 D) {
    if (D >= 0) throw std::invalid_argument("discriminant must be negative");
    i64 r = ((D % 4) + 4) % 4;
    if (r != 0 && r != 1) throw std::invalid_argument("discriminant must be 0 or 1 mod 4");
}

i64 gcd_i64(i64 a, i64 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

// Normalize b into (-a, a] keeping the discriminant, in 128-bit arithmetic.
void normalize128(i128& a, i128& b, i128& c) {
    if (b > -a && b <= a) return;
    i128 twoa = 2 * a;
    i128 r = b % twoa;
    if (r <= -a) r += twoa;
    if (r > a) r -= twoa;
    c += (r * r - b * b) / (4 * a);
    b = r;
}

QuadraticForm reduce128(i128 a, i128 b, i128 c) {
    normalize128(a, b, c);
    while (a > c) {
        std::swap(a, c);
        b = -b;
        normalize128(a, b, c);
    }
    if (a == c && b < 0) b = -b;
    return {static_cast<i64>(a), static_cast<i64>(b), static_cast<i64>(c)};
}

// Equivalent form (A, B, *) of f with gcd(A, m) = 1, via a small unimodular
// change of variables. Returns A > 0 and B reduced into [0, 2A).
std::pair<i64, i64> coprime_representative(const QuadraticForm& f, i64 m) {
    for (i64 bound = 1; bound <= 64; ++bound) {
        for (i64 x = -bound; x <= bound; ++x) {
            for (i64 y = -bound; y <= bound; ++y) {
                if (std::max(std::abs(x), std::abs(y)) != bound) continue;
                if (gcd_i64(x, y) != 1) continue;
                i128 val = i128(f.a) * x * x + i128(f.b) * x * y + i128(f.c) * y * y;
                if (val <= 0 || gcd_i64(static_cast<i64>(val % m), m) != 1) continue;
                // Complete (x, y) to [[x, u], [y, w]] with x w - y u = 1.
                i64 a0 = x, b0 = y, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
                while (b0 != 0) {
                    i64 q = a0 / b0, r = a0 - q * b0;
                    a0 = b0;
                    b0 = r;
                    i64 ns = s0 - q * s1;
                    s0 = s1;
                    s1 = ns;
                    i64 nt = t0 - q * t1;
                    t0 = t1;
                    t1 = nt;
                }
                i64 s = s0, t = t0;
                if (a0 < 0) {
                    s = -s;
                    t = -t;
                }
                i64 w = s, u = -t;
                i128 B = 2 * (i128(f.a) * x * u + i128(f.c) * y * w) +
                         i128(f.b) * (i128(x) * w + i128(y) * u);
                i64 A = static_cast<i64>(val);
                i128 Br = ((B % (2 * i128(A))) + 2 * i128(A)) % (2 * i128(A));
                return {A, static_cast<i64>(Br)};
            }
        }
    }
    throw InternalError("coprime_representative: search exhausted");
}

}  // namespace

bool is_reduced(const QuadraticForm& f) {
    i64 ab = f.b < 0 ? -f.b : f.b;
    if (!(ab <= f.a && f.a <= f.c)) return false;
    if ((ab == f.a || f.a == f.c) && f.b < 0) return false;
    return true;
}

QuadraticForm reduce(QuadraticForm f) {
    if (f.a <= 0) throw std::invalid_argument("reduce: leading coefficient must be positive");
    check_disc(f.disc());
    return reduce128(f.a, f.b, f.c);
}

QuadraticForm principal_form(i64 D) {
    check_disc(D);
    if (((D % 4) + 4) % 4 == 0) return {1, 0, -D / 4};
    return {1, 1, (1 - D) / 4};
}

QuadraticForm conjugate(const QuadraticForm& f) { return reduce({f.a, -f.b, f.c}); }

QuadraticForm compose(const QuadraticForm& f_in, const QuadraticForm& g_in) {
    QuadraticForm f = reduce(f_in), g = reduce(g_in);
    i64 D = f.disc();
    if (D != g.disc()) throw std::invalid_argument("compose: mismatched discriminants");
    // United forms: g ~ (A2, B2, *) with gcd(A2, f.a) = 1, then CRT the middle
    // coefficients to a common B and read the composite off the discriminant.
    auto [A2, B2] = coprime_representative(g, f.a);
    i64 a1 = f.a;
    // B = f.b + 2 a1 k with a1 k = (B2 - f.b)/2 (mod A2).
    i64 diff_half = static_cast<i64>((i128(B2) - f.b) / 2 % A2);
    diff_half = ((diff_half % A2) + A2) % A2;
    u64 a1inv = A2 == 1 ? 0 : inv_mod(static_cast<u64>(((a1 % A2) + A2) % A2), static_cast<u64>(A2));
    i64 k = A2 == 1 ? 0 : static_cast<i64>(mul_mod(static_cast<u64>(diff_half), a1inv, static_cast<u64>(A2)));
    i128 B = i128(f.b) + 2 * i128(a1) * k;
    i128 A = i128(a1) * A2;
    i128 C = (B * B - D) / (4 * A);
    if ((B * B - D) % (4 * A) != 0) throw InternalError("compose: non-concordant middle coefficient");
    return reduce128(A, B, C);
}

QuadraticForm form_pow(const QuadraticForm& f, u64 e) {
    QuadraticForm acc = principal_form(f.disc());
    QuadraticForm base = reduce(f);
    while (e) {
        if (e & 1) acc = compose(acc, base);
        base = compose(base, base);
        e >>= 1;
    }
    return acc;
}

u64 order_of_class(const QuadraticForm& f) {
    QuadraticForm id = principal_form(f.disc());
    QuadraticForm cur = reduce(f);
    u64 n = 1;
    while (cur != id) {
        cur = compose(cur, f);
        if (++n > 100000000) throw InternalError("order_of_class: runaway");
    }
    return n;
}

std::vector<QuadraticForm> enumerate_reduced_forms(i64 D) {
    check_disc(D);
    if (-D > kEnumerationCap) throw ResourceError("enumerate_reduced_forms: |D| exceeds the enumeration cap");
    std::vector<QuadraticForm> out;
    for (i64 b = (-D) % 2; b * b * 3 <= -D; b += 2) {
        i64 m = (b * b - D) / 4;
        for (i64 a = std::max<i64>(b, 1); a * a <= m; ++a) {
            if (m % a) continue;
            i64 c = m / a;
            if (gcd_i64(gcd_i64(a, b), c) != 1) continue;
            out.push_back({a, b, c});
            if (b > 0 && b < a && a < c) out.push_back({a, -b, c});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

u64 class_number(i64 D) { return enumerate_reduced_forms(D).size(); }

OrderSpec OrderSpec::of(i64 D) {
    check_disc(D);
    u64 n = static_cast<u64>(-D);
    u64 m = 1, n0 = 1;
    for (auto [p, e] : factorize(n)) {
        for (int i = 0; i + 1 < e; i += 2) m *= p;
        if (e % 2) n0 *= p;
    }
    OrderSpec os;
    os.D = D;
    if (n0 % 4 == 3) {
        os.D_K = -static_cast<i64>(n0);
        os.f = m;
    } else {
        if (m % 2 != 0) throw std::invalid_argument("OrderSpec: invalid discriminant");
        os.D_K = -4 * static_cast<i64>(n0);
        os.f = m / 2;
    }
    return os;
}

u64 kronecker_class_number(i64 delta) {
    check_disc(delta);
    OrderSpec os = OrderSpec::of(delta);
    u64 total = 0;
    for (u64 fp : divisors(os.f)) total += class_number(static_cast<i64>(fp * fp) * os.D_K);
    return total;
}

std::optional<QuadraticForm> prime_form(i64 D, u64 ell) {
    check_disc(D);
    if (!is_prime_u64(ell)) throw std::invalid_argument("prime_form: ell must be prime");
    if (kronecker(D, static_cast<i64>(ell)) < 0) return std::nullopt;
    if (OrderSpec::of(D).f % ell == 0) return std::nullopt;
    i64 L = static_cast<i64>(ell);
    for (i64 b = (-D) % 2; b <= L; b += 2) {
        if (((b * b - D) % (4 * L)) == 0) {
            i64 c = (b * b - D) / (4 * L);
            QuadraticForm f{L, b, c};
            if (gcd_i64(gcd_i64(f.a, f.b), f.c) != 1) return std::nullopt;
            return f;
        }
    }
    return std::nullopt;
}

const std::vector<u32>& ClassPresentation::dlog(const QuadraticForm& reduced_class) const {
    auto it = table_.find(reduced_class);
    if (it == table_.end()) throw std::invalid_argument("dlog: class not in the table (wrong discriminant?)");
    return it->second;
}

QuadraticForm ClassPresentation::form_from_vector(const std::vector<u32>& e) const {
    QuadraticForm acc = principal_form(D);
    for (size_t i = 0; i < generators.size() && i < e.size(); ++i) {
        if (e[i]) acc = compose(acc, form_pow(generators[i].form, e[i]));
    }
    return acc;
}

std::optional<ClassPresentation> optimal_presentation_capped(i64 D, u64 max_norm) {
    check_disc(D);
    ClassPresentation pres;
    pres.D = D;
    pres.h = class_number(D);
    pres.table_[principal_form(D)] = {};
    u64 ell = 2;
    while (pres.table_.size() < pres.h) {
        if (max_norm != 0 && ell >= max_norm) return std::nullopt;
        if (ell > 100000) throw InternalError("optimal_presentation: generator search runaway");
        auto pf = prime_form(D, ell);
        if (!pf) {
            ell = next_prime(ell);
            continue;
        }
        QuadraticForm g = reduce(*pf);
        if (pres.table_.count(g)) {
            ell = next_prime(ell);
            continue;
        }
        // Relative order: first power of g landing in the current subgroup.
        u64 r = 1;
        QuadraticForm cur = g;
        while (!pres.table_.count(cur)) {
            cur = compose(cur, g);
            ++r;
        }
        std::vector<u32> rel = pres.table_.at(cur);
        rel.resize(pres.generators.size(), 0);
        // Extend the table with the cosets g^e * (span so far).
        std::vector<std::pair<QuadraticForm, std::vector<u32>>> base(pres.table_.begin(), pres.table_.end());
        QuadraticForm ge = principal_form(D);
        for (u64 e = 1; e < r; ++e) {
            ge = compose(ge, g);
            for (auto& [form, vec] : base) {
                QuadraticForm nf = compose(form, ge);
                std::vector<u32> nv = vec;
                nv.resize(pres.generators.size() + 1, 0);
                nv[pres.generators.size()] = static_cast<u32>(e);
                pres.table_[nf] = std::move(nv);
            }
        }
        pres.generators.push_back({g, ell, r, rel});
        ell = next_prime(ell);
    }
    for (auto& [form, vec] : pres.table_) vec.resize(pres.generators.size(), 0);
    return pres;
}

ClassPresentation optimal_presentation(i64 D) {
    auto p = optimal_presentation_capped(D, 0);
    if (!p) throw InternalError("optimal_presentation: unreachable");
    return *p;
}

std::optional<u64> minimal_single_generator_norm(i64 D, u64 cap) {
    u64 h = class_number(D);
    for (u64 ell = 2; ell <= cap; ell = next_prime(ell)) {
        auto pf = prime_form(D, ell);
        if (pf && order_of_class(*pf) == h) return ell;
    }
    return std::nullopt;
}

TorsorStepper::TorsorStepper(const ClassPresentation& pres) {
    for (const auto& g : pres.generators) orders_.push_back(g.rel_order);
    counters_.assign(orders_.size(), 0);
}

int TorsorStepper::next() {
    for (size_t i = 0; i < orders_.size(); ++i) {
        if (counters_[i] < orders_[i] - 1) {
            ++counters_[i];
            for (size_t j = 0; j < i; ++j) counters_[j] = 0;
            return static_cast<int>(i);
        }
    }
    return -1;
}

std::vector<TorsorStep> enumerate_torsor_steps(const ClassPresentation& pres) {
    std::vector<TorsorStep> out;
    out.reserve(pres.h);
    QuadraticForm cur = principal_form(pres.D);
    out.push_back({-1, cur, pres.dlog(cur)});
    TorsorStepper stepper(pres);
    for (int g = stepper.next(); g != -1; g = stepper.next()) {
        cur = compose(cur, pres.generators[g].form);
        out.push_back({g, cur, pres.dlog(cur)});
    }
    if (out.size() != pres.h) throw InternalError("enumerate_torsor_steps: wrong class count");
    return out;
}

QuadraticForm lift_class(const QuadraticForm& f_in, u64 ell) {
    QuadraticForm f = reduce(f_in);
    i64 Dp = f.disc();
    i64 L = static_cast<i64>(ell);
    if (Dp % (L * L) != 0) throw std::invalid_argument("lift_class: disc not divisible by ell^2");
    i64 D = Dp / (L * L);
    check_disc(D);
    if (OrderSpec::of(D).f % ell == 0)
        throw std::invalid_argument("lift_class: ell divides the conductor of the target order");
    auto [A, B] = coprime_representative(f, 2 * L);
    // The extended ideal has the same norm A; its middle coefficient solves
    // ell * b' = B (mod 2A).
    i64 bp;
    if (ell % 2 == 1) {
        u64 inv = inv_mod(ell % (2 * static_cast<u64>(A)), 2 * static_cast<u64>(A));
        bp = static_cast<i64>(mul_mod(static_cast<u64>(B % (2 * A)), inv, 2 * static_cast<u64>(A)));
    } else {
        if (B % 2 != 0) throw InternalError("lift_class: odd middle coefficient at ell = 2");
        bp = (B / 2) % A;
        i64 want_parity = ((D % 2) + 2) % 2;
        if (((bp % 2) + 2) % 2 != want_parity) bp += A;
    }
    if ((i128(bp) * bp - D) % (4 * i128(A)) != 0) throw InternalError("lift_class: non-integral image");
    i128 c128 = (i128(bp) * bp - D) / (4 * i128(A));
    return reduce128(A, bp, c128);
}

}  // namespace volcano
