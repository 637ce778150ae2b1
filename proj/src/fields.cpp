#include "volcano/fields.hpp"

#include <sstream>

namespace volcano {

static u64 smallest_nonresidue(u64 p) {
    for (u64 c = 2;; ++c) {
        if (pow_mod(c, (p - 1) / 2, p) == p - 1) return c;
    }
}

FieldCtx::FieldCtx(u64 p, int degree, u64 nonresidue) : p_(p), degree_(degree), nonresidue_(nonresidue) {
    if (p <= 3 || p >= (u64(1) << 62)) throw std::invalid_argument("FieldCtx: p out of range (3, 2^62)");
    if (!is_prime_u64(p)) throw std::invalid_argument("FieldCtx: p is not prime");
    if (pow_mod(nonresidue_ % p, (p - 1) / 2, p) != p - 1)
        throw std::invalid_argument("FieldCtx: nonresidue is a square");
}

FieldCtx FieldCtx::prime_field(u64 p) {
    if (p <= 3 || !is_prime_u64(p)) throw std::invalid_argument("FieldCtx: p must be an odd prime > 3");
    return FieldCtx(p, 1, smallest_nonresidue(p));
}

FieldCtx FieldCtx::quadratic_field(u64 p) {
    if (p <= 3 || !is_prime_u64(p)) throw std::invalid_argument("FieldCtx: p must be an odd prime > 3");
    return FieldCtx(p, 2, smallest_nonresidue(p));
}

FieldCtx FieldCtx::quadratic_field(u64 p, u64 nonresidue) { return FieldCtx(p, 2, nonresidue); }

FieldElement FieldElement::inverse() const {
    if (is_zero()) throw std::invalid_argument("inverse of zero");
    u64 m = p();
    if (c1_ == 0) return raw(*ctx_, inv_mod(c0_, m), 0);
    // (c0 + c1 w)^-1 = (c0 - c1 w) / (c0^2 - nr c1^2)
    u64 norm = sub_mod(mul_mod(c0_, c0_, m), mul_mod(mul_mod(c1_, c1_, m), ctx_->nonresidue(), m), m);
    u64 ninv = inv_mod(norm, m);
    return raw(*ctx_, mul_mod(c0_, ninv, m), mul_mod(m - c1_, ninv, m));
}

FieldElement FieldElement::pow(u128 e) const {
    FieldElement r = raw(*ctx_, 1, 0);
    FieldElement b = *this;
    while (e) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

std::string FieldElement::str() const {
    std::ostringstream os;
    if (c1_ == 0)
        os << c0_;
    else
        os << c0_ << "+" << c1_ << "*w";
    return os.str();
}

FieldElement from_signed(const FieldCtx& ctx, i64 v) {
    i64 m = static_cast<i64>(ctx.p());
    i64 r = v % m;
    if (r < 0) r += m;
    return FieldElement(ctx, static_cast<u64>(r));
}

FieldElement random_element(const FieldCtx& ctx, Rng& rng) {
    std::uniform_int_distribution<u64> d(0, ctx.p() - 1);
    return ctx.degree() == 1 ? FieldElement(ctx, d(rng)) : FieldElement(ctx, d(rng), d(rng));
}

bool is_square(const FieldElement& x) {
    if (x.is_zero()) return true;
    u128 q = x.ctx().cardinality();
    return x.pow((q - 1) / 2) == FieldElement(x.ctx(), 1);
}

}  // namespace volcano
