#include "volcano/curve.hpp"

#include <algorithm>
#include <unordered_map>

namespace volcano {

static FieldElement compute_j(const FieldCtx& ctx, const FieldElement& a, const FieldElement& b) {
    FieldElement four(ctx, 4), tsseven(ctx, 27), c1728(ctx, 1728);
    FieldElement a3 = four * a * a * a;
    FieldElement disc = a3 + tsseven * b * b;
    if (disc.is_zero()) throw std::invalid_argument("singular curve: 4a^3 + 27b^2 = 0");
    return c1728 * a3 * disc.inverse();
}

CurveModel::CurveModel(const FieldCtx& ctx, const FieldElement& a, const FieldElement& b)
    : ctx_(&ctx), a_(a), b_(b), j_(compute_j(ctx, a, b)) {}

CurvePoint::CurvePoint(const CurveModel& E, const FieldElement& x_, const FieldElement& y_)
    : infinity(false), x(x_), y(y_) {
    if (y * y != E.rhs(x)) throw std::invalid_argument("point is not on the curve");
}

CurvePoint point_negate(const CurvePoint& P) {
    if (P.infinity) return P;
    CurvePoint R = P;
    R.y = -R.y;
    return R;
}

CurvePoint point_add(const CurveModel& E, const CurvePoint& P, const CurvePoint& Q) {
    if (P.infinity) return Q;
    if (Q.infinity) return P;
    const FieldCtx& ctx = E.ctx();
    if (P.x == Q.x) {
        if (P.y != Q.y || P.y.is_zero()) return CurvePoint::at_infinity();
        // doubling
        FieldElement three(ctx, 3), two(ctx, 2);
        FieldElement lam = (three * P.x * P.x + E.a()) * (two * P.y).inverse();
        FieldElement x3 = lam * lam - P.x - Q.x;
        FieldElement y3 = lam * (P.x - x3) - P.y;
        CurvePoint R;
        R.infinity = false;
        R.x = x3;
        R.y = y3;
        return R;
    }
    FieldElement lam = (Q.y - P.y) * (Q.x - P.x).inverse();
    FieldElement x3 = lam * lam - P.x - Q.x;
    FieldElement y3 = lam * (P.x - x3) - P.y;
    CurvePoint R;
    R.infinity = false;
    R.x = x3;
    R.y = y3;
    return R;
}

CurvePoint scalar_mul(const CurveModel& E, u128 n, const CurvePoint& P) {
    CurvePoint R = CurvePoint::at_infinity();
    CurvePoint B = P;
    while (n) {
        if (n & 1) R = point_add(E, R, B);
        B = point_add(E, B, B);
        n >>= 1;
    }
    return R;
}

CurvePoint random_point(const CurveModel& E, Rng& rng) {
    const FieldCtx& ctx = E.ctx();
    if (ctx.degree() != 1) throw std::invalid_argument("random_point: prime field contexts only");
    std::uniform_int_distribution<u64> d(0, ctx.p() - 1);
    for (int i = 0; i < 1 << 20; ++i) {
        FieldElement x(ctx, d(rng));
        FieldElement f = E.rhs(x);
        if (f.is_zero()) {
            CurvePoint P;
            P.infinity = false;
            P.x = x;
            P.y = FieldElement(ctx, 0);
            return P;
        }
        if (pow_mod(f.c0(), (ctx.p() - 1) / 2, ctx.p()) == 1) {
            u64 y = sqrt_mod_prime(f.c0(), ctx.p());
            if (rng() & 1) y = ctx.p() - y;
            CurvePoint P;
            P.infinity = false;
            P.x = x;
            P.y = FieldElement(ctx, y);
            return P;
        }
    }
    throw InternalError("random_point: no point found");
}

FieldElement j_invariant(const CurveModel& E) { return E.j_invariant(); }

CurveModel curve_from_j(const FieldCtx& ctx, const FieldElement& j) {
    FieldElement zero(ctx, 0), one(ctx, 1), c1728(ctx, 1728);
    if (j.is_zero()) return CurveModel(ctx, zero, one);
    if (j == c1728) return CurveModel(ctx, one, zero);
    FieldElement k = c1728 - j;
    FieldElement a = FieldElement(ctx, 3) * j * k;
    FieldElement b = FieldElement(ctx, 2) * j * k * k;
    return CurveModel(ctx, a, b);
}

CurveModel quadratic_twist(const CurveModel& E) {
    const FieldCtx& ctx = E.ctx();
    if (ctx.degree() != 1) throw std::invalid_argument("quadratic_twist: prime field contexts only");
    FieldElement d(ctx, ctx.nonresidue());
    return CurveModel(ctx, E.a() * d * d, E.b() * d * d * d);
}

QrTable QrTable::build(u64 p) {
    QrTable t;
    t.p = p;
    t.is_sq.assign(p, 0);
    for (u64 r = 0; r <= p / 2; ++r) t.is_sq[mul_mod(r, r, p)] = 1;
    return t;
}

u64 point_count_exhaustive(const CurveModel& E, const QrTable* table) {
    const FieldCtx& ctx = E.ctx();
    if (ctx.degree() != 1) throw std::invalid_argument("point_count: prime field contexts only");
    u64 p = ctx.p();
    QrTable local;
    if (!table || table->p != p) {
        local = QrTable::build(p);
        table = &local;
    }
    u64 a = E.a().c0(), b = E.b().c0();
    i64 sum = 0;
    for (u64 x = 0; x < p; ++x) {
        u64 f = add_mod(mul_mod(add_mod(mul_mod(x, x, p), a, p), x, p), b, p);
        sum += table->chi(f);
    }
    return p + 1 + sum;
}

// Some positive m with m*P = 0 (a multiple of ord(P)), found by baby-step
// giant-step over the Hasse interval [lo, hi].
static std::optional<u64> bsgs_find_annihilator(const CurveModel& E, const CurvePoint& P, u64 lo, u64 hi) {
    if (P.infinity) return 1;
    u64 width = hi - lo + 1;
    u64 bs = isqrt_u64(width) + 1;
    std::unordered_map<u64, u64> baby;  // x-coordinate -> smallest j
    baby.reserve(bs * 2);
    CurvePoint Pj = CurvePoint::at_infinity();
    for (u64 j = 0; j < bs; ++j) {
        if (j > 0 && Pj.infinity) return j;
        if (!Pj.infinity) baby.emplace(Pj.x.c0(), j);
        Pj = point_add(E, Pj, P);
    }
    CurvePoint G = scalar_mul(E, bs, P);
    CurvePoint Q = scalar_mul(E, lo, P);
    for (u64 i = 0; lo + i * bs <= hi + bs; ++i) {
        if (Q.infinity) {
            return lo + i * bs;
        } else {
            auto it = baby.find(Q.x.c0());
            if (it != baby.end()) {
                u64 j = it->second;
                // x-match means Q = +-jP; either candidate that annihilates P
                // is a multiple of ord(P), which is all the caller needs.
                for (u64 m : {lo + i * bs - j, lo + i * bs + j}) {
                    if (m >= 1 && scalar_mul(E, m, P).infinity) return m;
                }
            }
        }
        Q = point_add(E, Q, G);
    }
    return std::nullopt;
}

static u64 exact_order(const CurveModel& E, const CurvePoint& P, u64 m) {
    for (auto [q, e] : factorize(m)) {
        for (int i = 0; i < e; ++i) {
            if (scalar_mul(E, m / q, P).infinity)
                m /= q;
            else
                break;
        }
    }
    return m;
}

u64 point_count_bsgs(const CurveModel& E, Rng& rng) {
    const FieldCtx& ctx = E.ctx();
    if (ctx.degree() != 1) throw std::invalid_argument("point_count: prime field contexts only");
    u64 p = ctx.p();
    if (p < 500) return point_count_exhaustive(E);
    u64 s = isqrt_u64(4 * p);
    u64 lo = p + 1 - s, hi = p + 1 + s;
    CurveModel Et = quadratic_twist(E);
    u64 L = 1, Lt = 1;
    for (int iter = 0; iter < 64; ++iter) {
        const CurveModel& C = (iter % 2 == 0) ? E : Et;
        CurvePoint P = random_point(C, rng);
        auto m = bsgs_find_annihilator(C, P, lo, hi);
        if (!m) throw InternalError("point_count_bsgs: no annihilator in the Hasse interval");
        u64 ord = exact_order(C, P, *m);
        u64& acc = (iter % 2 == 0) ? L : Lt;
        acc = acc / gcd_u64(acc, ord) * ord;
        // Candidates: N in [lo,hi], L | N and Lt | 2p+2-N.
        u64 found = 0, candidate = 0;
        for (u64 N = ((lo + L - 1) / L) * L; N <= hi; N += L) {
            if ((2 * p + 2 - N) % Lt == 0) {
                ++found;
                candidate = N;
            }
        }
        if (found == 1) return candidate;
        if (found == 0) throw InternalError("point_count_bsgs: constraints eliminated all candidates");
    }
    throw InternalError("point_count_bsgs: ambiguous after combining twist information");
}

u64 point_count(const CurveModel& E, Rng& rng) {
    if (E.ctx().p() < (u64(1) << 20)) return point_count_exhaustive(E);
    return point_count_bsgs(E, rng);
}

i64 trace_of_frobenius(const CurveModel& E, Rng& rng) {
    u64 N = point_count(E, rng);
    return static_cast<i64>(E.ctx().p()) + 1 - static_cast<i64>(N);
}

NormEquationData solve_norm_equation(u64 q, i64 t) {
    u128 t2 = u128(t < 0 ? -t : t) * u128(t < 0 ? -t : t);
    if (t2 >= u128(4) * q) throw std::invalid_argument("solve_norm_equation: t^2 >= 4q");
    if (t % static_cast<i64>(q) == 0) throw SupersingularInputError("solve_norm_equation: p | t (supersingular)");
    u64 n = 4 * q - static_cast<u64>(t2);
    u64 v = 1, n0 = 1;
    for (auto [pr, e] : factorize(n)) {
        for (int i = 0; i + 1 < e; i += 2) v *= pr;
        if (e % 2) n0 *= pr;
    }
    NormEquationData ne;
    ne.q = q;
    ne.t = t;
    if (n0 % 4 == 3) {
        ne.D_K = -static_cast<i64>(n0);
        ne.v = v;
    } else {
        if (v % 2 != 0) throw InternalError("solve_norm_equation: parity violation");
        ne.D_K = -4 * static_cast<i64>(n0);
        ne.v = v / 2;
    }
    return ne;
}

std::vector<Poly> divpoly_sequence(const CurveModel& E, int n) {
    const FieldCtx& ctx = E.ctx();
    const FieldElement& a = E.a();
    const FieldElement& b = E.b();
    FieldElement a2 = a * a, b2 = b * b, ab = a * b;
    std::vector<Poly> f;
    f.reserve(n + 3);
    f.push_back(Poly(ctx));                                      // f_0 = 0
    f.push_back(Poly::constant(ctx, FieldElement(ctx, 1)));      // f_1
    f.push_back(Poly::constant(ctx, FieldElement(ctx, 1)));      // f_2
    // f_3 = 3x^4 + 6a x^2 + 12b x - a^2
    f.push_back(Poly(ctx, {-a2, FieldElement(ctx, 12) * b, FieldElement(ctx, 6) * a, FieldElement(ctx, 0),
                           FieldElement(ctx, 3)}));
    // f_4 = 2(x^6 + 5a x^4 + 20b x^3 - 5a^2 x^2 - 4ab x - a^3 - 8b^2)
    Poly f4(ctx, {-(a2 * a) - FieldElement(ctx, 8) * b2, -(FieldElement(ctx, 4) * ab),
                  -(FieldElement(ctx, 5) * a2), FieldElement(ctx, 20) * b, FieldElement(ctx, 5) * a,
                  FieldElement(ctx, 0), FieldElement(ctx, 1)});
    f.push_back(f4 * FieldElement(ctx, 2));
    // F = x^3 + a x + b; (2y)^4 = 16 F^2.
    Poly F(ctx, {b, a, FieldElement(ctx, 0), FieldElement(ctx, 1)});
    Poly F2_16 = F * F * FieldElement(ctx, 16);
    for (int m = 5; m <= n; ++m) {
        int k = m / 2;
        if (m % 2) {
            Poly t1 = f[k + 2] * f[k] * f[k] * f[k];
            Poly t2 = f[k - 1] * f[k + 1] * f[k + 1] * f[k + 1];
            f.push_back(k % 2 == 0 ? t1 * F2_16 - t2 : t1 - t2 * F2_16);
        } else {
            Poly inner = f[k + 2] * f[k - 1] * f[k - 1] - f[k - 2] * f[k + 1] * f[k + 1];
            f.push_back(f[k] * inner);
        }
    }
    return f;
}

Poly division_polynomial(const CurveModel& E, int n) {
    if (n < 1 || n > 100) throw std::invalid_argument("division_polynomial: n out of [1, 100]");
    auto fs = divpoly_sequence(E, n);
    if (n % 2 == 1) return fs[n];
    const FieldCtx& ctx = E.ctx();
    Poly F(ctx, {E.b(), E.a(), FieldElement(ctx, 0), FieldElement(ctx, 1)});
    return F * fs[n];
}

std::pair<Poly, Poly> x_multiple_mod(const CurveModel& E, const std::vector<Poly>& fs, int m,
                                     const Poly& h) {
    const FieldCtx& ctx = E.ctx();
    Poly x = Poly::identity_x(ctx);
    if (m == 1) return {poly_mod(x, h), Poly::constant(ctx, FieldElement(ctx, 1))};
    Poly F(ctx, {E.b(), E.a(), FieldElement(ctx, 0), FieldElement(ctx, 1)});
    Poly num = poly_mod(fs[m - 1] * fs[m + 1], h);
    Poly den = poly_mod(fs[m] * fs[m], h);
    if (m % 2 == 1) {
        num = poly_mod(num * F * FieldElement(ctx, 4), h);
    } else {
        den = poly_mod(den * F * FieldElement(ctx, 4), h);
    }
    // x(mP) = x - num/den
    return {poly_mod(x * den - num, h), den};
}

}  // namespace volcano
