#include "volcano/poly.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace volcano {

Poly Poly::from_ints(const FieldCtx& ctx, std::initializer_list<i64> coeffs) {
    std::vector<FieldElement> c;
    c.reserve(coeffs.size());
    for (i64 v : coeffs) c.push_back(from_signed(ctx, v));
    return Poly(ctx, std::move(c));
}

Poly Poly::constant(const FieldCtx& ctx, const FieldElement& a) { return Poly(ctx, {a}); }

Poly Poly::identity_x(const FieldCtx& ctx) {
    return Poly(ctx, {FieldElement(ctx, 0), FieldElement(ctx, 1)});
}

Poly Poly::from_roots(const FieldCtx& ctx, const std::vector<FieldElement>& roots) {
    Poly r = Poly::constant(ctx, FieldElement(ctx, 1));
    for (const auto& root : roots) r = r * Poly(ctx, {-root, FieldElement(ctx, 1)});
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    std::vector<FieldElement> r(std::max(c_.size(), o.c_.size()), FieldElement(*ctx_, 0));
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) + o.coeff(i);
    return Poly(*ctx_, std::move(r));
}

Poly Poly::operator-(const Poly& o) const {
    std::vector<FieldElement> r(std::max(c_.size(), o.c_.size()), FieldElement(*ctx_, 0));
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) - o.coeff(i);
    return Poly(*ctx_, std::move(r));
}

Poly Poly::operator*(const Poly& o) const {
    if (is_zero() || o.is_zero()) return Poly(*ctx_);
    std::vector<FieldElement> r(c_.size() + o.c_.size() - 1, FieldElement(*ctx_, 0));
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    }
    return Poly(*ctx_, std::move(r));
}

Poly Poly::operator*(const FieldElement& s) const {
    std::vector<FieldElement> r(c_);
    for (auto& x : r) x *= s;
    return Poly(*ctx_, std::move(r));
}

FieldElement Poly::eval(const FieldElement& x) const {
    FieldElement acc(*ctx_, 0);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return Poly(*ctx_);
    std::vector<FieldElement> r;
    r.reserve(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) {
        FieldElement k(*ctx_, static_cast<u64>(i % ctx_->p()));
        r.push_back(c_[i] * k);
    }
    return Poly(*ctx_, std::move(r));
}

Poly Poly::monic() const {
    if (is_zero()) throw std::invalid_argument("monic of zero polynomial");
    if (is_monic()) return *this;
    return *this * leading().inverse();
}

Poly Poly::shifted(int k) const {
    if (is_zero()) return *this;
    std::vector<FieldElement> r(c_.size() + k, FieldElement(*ctx_, 0));
    for (size_t i = 0; i < c_.size(); ++i) r[i + k] = c_[i];
    return Poly(*ctx_, std::move(r));
}

std::string Poly::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    for (size_t i = c_.size(); i-- > 0;) {
        if (c_[i].is_zero()) continue;
        os << "(" << c_[i].str() << ")*Y^" << i;
        if (i) os << " + ";
    }
    return os.str();
}

std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw std::invalid_argument("division by zero polynomial");
    const FieldCtx& ctx = a.ctx();
    if (a.degree() < b.degree()) return {Poly(ctx), a};
    std::vector<FieldElement> rem(a.coeffs());
    std::vector<FieldElement> quot(a.degree() - b.degree() + 1, FieldElement(ctx, 0));
    FieldElement lc_inv = b.leading().inverse();
    for (int i = a.degree(); i >= b.degree(); --i) {
        if (rem[i].is_zero()) continue;
        FieldElement q = rem[i] * lc_inv;
        quot[i - b.degree()] = q;
        for (int j = 0; j <= b.degree(); ++j) rem[i - b.degree() + j] -= q * b[j];
    }
    return {Poly(ctx, std::move(quot)), Poly(ctx, std::move(rem))};
}

Poly poly_mod(const Poly& a, const Poly& b) { return poly_divmod(a, b).second; }

bool poly_divides(const Poly& b, const Poly& a, Poly* quotient) {
    auto [q, r] = poly_divmod(a, b);
    if (!r.is_zero()) return false;
    if (quotient) *quotient = q;
    return true;
}

Poly poly_gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly r = poly_mod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero()) return a;
    return a.monic();
}

Poly poly_invmod(const Poly& a, const Poly& f) {
    const FieldCtx& ctx = a.ctx();
    Poly r0 = f, r1 = poly_mod(a, f);
    Poly s0(ctx), s1 = Poly::constant(ctx, FieldElement(ctx, 1));
    while (!r1.is_zero()) {
        auto [q, r2] = poly_divmod(r0, r1);
        Poly s2 = s0 - q * s1;
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    if (r0.degree() != 0) throw std::invalid_argument("poly_invmod: not invertible");
    return poly_mod(s0 * r0[0].inverse(), f);
}

Poly poly_powmod(const Poly& base, u128 e, const Poly& f) {
    if (f.degree() < 1) throw std::invalid_argument("powmod modulus must have degree >= 1");
    const FieldCtx& ctx = base.ctx();
    Poly r = Poly::constant(ctx, FieldElement(ctx, 1));
    Poly b = poly_mod(base, f);
    while (e) {
        if (e & 1) r = poly_mod(r * b, f);
        b = poly_mod(b * b, f);
        e >>= 1;
    }
    return r;
}

Poly frobenius_powmod(const Poly& f) {
    if (f.degree() < 1) throw std::invalid_argument("frobenius_powmod: modulus must have degree >= 1");
    return poly_powmod(Poly::identity_x(f.ctx()), f.ctx().cardinality(), f);
}

// Product of the distinct linear factors of f (monic).
static Poly linear_part(const Poly& f) {
    Poly x = Poly::identity_x(f.ctx());
    Poly xq = frobenius_powmod(f);
    return poly_gcd(xq - x, f);
}

// Splits a monic product of distinct linear factors into roots.
static void split_linear(const Poly& g, std::vector<FieldElement>& out, Rng& rng, int depth = 0) {
    const FieldCtx& ctx = g.ctx();
    if (g.degree() == 0) return;
    if (g.degree() == 1) {
        out.push_back(-g[0]);
        return;
    }
    u128 q = ctx.cardinality();
    for (int attempt = 0; attempt < 64; ++attempt) {
        FieldElement a = random_element(ctx, rng);
        // gcd((Y+a)^((q-1)/2) - 1, g) separates roots into residue classes.
        Poly shift(ctx, {a, FieldElement(ctx, 1)});
        Poly t = poly_powmod(shift, (q - 1) / 2, g);
        Poly h = poly_gcd(t - Poly::constant(ctx, FieldElement(ctx, 1)), g);
        if (h.degree() > 0 && h.degree() < g.degree()) {
            auto [quot, rem] = poly_divmod(g, h);
            (void)rem;
            split_linear(h, out, rng, depth + 1);
            split_linear(quot.monic(), out, rng, depth + 1);
            return;
        }
    }
    throw InternalError("split_linear: randomized splitting failed to converge");
}

std::vector<std::pair<FieldElement, int>> poly_roots(const Poly& f, bool want_multiplicity, Rng& rng) {
    if (f.is_zero()) throw std::invalid_argument("poly_roots: zero polynomial");
    std::vector<std::pair<FieldElement, int>> out;
    if (f.degree() == 0) return out;
    Poly g = linear_part(f);
    std::vector<FieldElement> roots;
    split_linear(g, roots, rng);
    std::sort(roots.begin(), roots.end());
    for (const auto& r : roots) {
        int mult = 1;
        if (want_multiplicity) {
            Poly lin(f.ctx(), {-r, FieldElement(f.ctx(), 1)});
            Poly rest = poly_divmod(f, lin).first;
            while (true) {
                auto [q2, r2] = poly_divmod(rest, lin);
                if (!r2.is_zero()) break;
                ++mult;
                rest = q2;
            }
        }
        out.emplace_back(r, mult);
    }
    return out;
}

std::vector<FieldElement> poly_distinct_roots(const Poly& f, Rng& rng) {
    std::vector<FieldElement> out;
    for (auto& [r, m] : poly_roots(f, false, rng)) out.push_back(r);
    return out;
}

std::optional<FieldElement> poly_random_root(const Poly& f, Rng& rng) {
    if (f.is_zero()) throw std::invalid_argument("poly_random_root: zero polynomial");
    const FieldCtx& ctx = f.ctx();
    if (f.degree() == 0) return std::nullopt;
    Poly g = linear_part(f);
    u128 q = ctx.cardinality();
    int guard = 0;
    while (g.degree() > 1) {
        if (++guard > 64 * 64) throw InternalError("poly_random_root: splitting failed to converge");
        FieldElement a = random_element(ctx, rng);
        Poly shift(ctx, {a, FieldElement(ctx, 1)});
        Poly t = poly_powmod(shift, (q - 1) / 2, g);
        Poly h = poly_gcd(t - Poly::constant(ctx, FieldElement(ctx, 1)), g);
        if (h.degree() == 0 || h.degree() == g.degree()) continue;
        Poly other = poly_divmod(g, h).first.monic();
        // Branch weighted by root count, so each root is equally likely.
        std::uniform_int_distribution<int> d(1, g.degree());
        g = (d(rng) <= h.degree()) ? h : other;
    }
    if (g.degree() == 0) return std::nullopt;
    return -g[0];
}

// Frobenius-norm based equal-degree splitting, valid for q up to 2^124.
static void equal_degree_split(const Poly& g, int d, std::vector<Poly>& out, Rng& rng, int depth = 0) {
    const FieldCtx& ctx = g.ctx();
    if (g.degree() == d) {
        out.push_back(g);
        return;
    }
    if (depth > 200) throw InternalError("equal_degree_split: recursion runaway");
    u128 q = ctx.cardinality();
    for (int attempt = 0; attempt < 128; ++attempt) {
        std::vector<FieldElement> uc(g.degree());
        for (auto& x : uc) x = random_element(ctx, rng);
        Poly u(ctx, std::move(uc));
        if (u.is_zero()) continue;
        // T = prod_{i<d} u^(q^i) mod g, then T^((q-1)/2): equals u^((q^d-1)/2).
        Poly t = poly_mod(u, g);
        Poly frob = t;
        for (int i = 1; i < d; ++i) {
            frob = poly_powmod(frob, q, g);
            t = poly_mod(t * frob, g);
        }
        t = poly_powmod(t, (q - 1) / 2, g);
        Poly h = poly_gcd(t - Poly::constant(ctx, FieldElement(ctx, 1)), g);
        if (h.degree() > 0 && h.degree() < g.degree()) {
            equal_degree_split(h, d, out, rng, depth + 1);
            equal_degree_split(poly_divmod(g, h).first.monic(), d, out, rng, depth + 1);
            return;
        }
    }
    throw InternalError("equal_degree_split: failed to converge");
}

std::vector<Poly> poly_factors_up_to(const Poly& f, int max_degree, Rng& rng) {
    if (f.is_zero()) throw std::invalid_argument("poly_factors_up_to: zero polynomial");
    const FieldCtx& ctx = f.ctx();
    std::vector<Poly> out;
    Poly rest = f.monic();
    // Distinct-degree stage on the squarefree input.
    Poly xq = Poly::identity_x(ctx);
    u128 q = ctx.cardinality();
    for (int d = 1; d <= max_degree && rest.degree() >= 1; ++d) {
        if (rest.degree() < 2 * d) {
            // Remainder is irreducible; belongs to degree rest.degree().
            if (rest.degree() <= max_degree) {
                out.push_back(rest);
                rest = Poly::constant(ctx, FieldElement(ctx, 1));
            }
            break;
        }
        xq = poly_powmod(xq, q, rest);
        Poly part = poly_gcd(xq - Poly::identity_x(ctx), rest);
        if (part.degree() > 0) {
            equal_degree_split(part, d, out, rng);
            rest = poly_divmod(rest, part).first.monic();
            xq = poly_mod(xq, rest);
        }
    }
    std::sort(out.begin(), out.end(), [](const Poly& a, const Poly& b) {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        for (int i = a.degree(); i >= 0; --i) {
            if (a[i] != b[i]) return a[i] < b[i];
        }
        return false;
    });
    return out;
}

Poly poly_interpolate(const FieldCtx& ctx, const std::vector<FieldElement>& xs,
                      const std::vector<FieldElement>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("poly_interpolate: size mismatch");
    size_t n = xs.size();
    Poly acc(ctx);
    for (size_t i = 0; i < n; ++i) {
        Poly basis = Poly::constant(ctx, FieldElement(ctx, 1));
        FieldElement denom(ctx, 1);
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            basis = basis * Poly(ctx, {-xs[j], FieldElement(ctx, 1)});
            denom *= xs[i] - xs[j];
        }
        if (denom.is_zero()) throw InternalError("poly_interpolate: duplicate interpolation node");
        acc = acc + basis * (ys[i] * denom.inverse());
    }
    return acc;
}

}  // namespace volcano
