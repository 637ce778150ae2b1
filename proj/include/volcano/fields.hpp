#ifndef VOLCANO_FIELDS_HPP
#define VOLCANO_FIELDS_HPP

#include <cassert>
#include <random>
#include <string>

#include "volcano/numutil.hpp"

namespace volcano {

using Rng = std::mt19937_64;

/// Context for F_p or F_{p^2} = F_p[w]/(w^2 - nonresidue), 3 < p < 2^62.
class FieldCtx {
  public:
    static FieldCtx prime_field(u64 p);
    static FieldCtx quadratic_field(u64 p);
    static FieldCtx quadratic_field(u64 p, u64 nonresidue);

    u64 p() const { return p_; }
    int degree() const { return degree_; }
    u64 nonresidue() const { return nonresidue_; }
    u128 cardinality() const { return degree_ == 1 ? p_ : u128(p_) * p_; }

    bool operator==(const FieldCtx& o) const {
        return p_ == o.p_ && degree_ == o.degree_ && (degree_ == 1 || nonresidue_ == o.nonresidue_);
    }

  private:
    FieldCtx(u64 p, int degree, u64 nonresidue);
    u64 p_;
    int degree_;
    u64 nonresidue_;  // smallest quadratic nonresidue; extension modulus when degree 2
};

/// Element of the field described by a FieldCtx, coefficients reduced in [0, p).
class FieldElement {
  public:
    FieldElement() : ctx_(nullptr), c0_(0), c1_(0) {}
    FieldElement(const FieldCtx& ctx, u64 c0) : ctx_(&ctx), c0_(c0 % ctx.p()), c1_(0) {}
    FieldElement(const FieldCtx& ctx, u64 c0, u64 c1) : ctx_(&ctx), c0_(c0 % ctx.p()), c1_(c1 % ctx.p()) {
        assert(ctx.degree() == 2 || c1_ == 0);
    }

    const FieldCtx& ctx() const { return *ctx_; }
    u64 c0() const { return c0_; }
    u64 c1() const { return c1_; }
    bool is_zero() const { return c0_ == 0 && c1_ == 0; }
    bool in_base_field() const { return c1_ == 0; }

    bool operator==(const FieldElement& o) const { return c0_ == o.c0_ && c1_ == o.c1_; }
    bool operator!=(const FieldElement& o) const { return !(*this == o); }
    // Canonical order: by (c1, c0) so base-field elements sort by residue.
    bool operator<(const FieldElement& o) const {
        return c1_ != o.c1_ ? c1_ < o.c1_ : c0_ < o.c0_;
    }

    FieldElement operator+(const FieldElement& o) const {
        check(o);
        return raw(*ctx_, add_mod(c0_, o.c0_, p()), add_mod(c1_, o.c1_, p()));
    }
    FieldElement operator-(const FieldElement& o) const {
        check(o);
        return raw(*ctx_, sub_mod(c0_, o.c0_, p()), sub_mod(c1_, o.c1_, p()));
    }
    FieldElement operator-() const { return raw(*ctx_, c0_ ? p() - c0_ : 0, c1_ ? p() - c1_ : 0); }
    FieldElement operator*(const FieldElement& o) const {
        check(o);
        u64 m = p();
        if (c1_ == 0 && o.c1_ == 0) return raw(*ctx_, mul_mod(c0_, o.c0_, m), 0);
        u64 ac = mul_mod(c0_, o.c0_, m);
        u64 bd = mul_mod(c1_, o.c1_, m);
        u64 cross = add_mod(mul_mod(c0_, o.c1_, m), mul_mod(c1_, o.c0_, m), m);
        return raw(*ctx_, add_mod(ac, mul_mod(bd, ctx_->nonresidue(), m), m), cross);
    }
    FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

    FieldElement inverse() const;
    FieldElement pow(u128 e) const;
    /// Conjugate over F_p (identity in a prime field).
    FieldElement frobenius() const { return raw(*ctx_, c0_, c1_ ? p() - c1_ : 0); }

    std::string str() const;

    static FieldElement raw(const FieldCtx& ctx, u64 c0, u64 c1) {
        FieldElement e;
        e.ctx_ = &ctx;
        e.c0_ = c0;
        e.c1_ = c1;
        return e;
    }

  private:
    u64 p() const { return ctx_->p(); }
    void check(const FieldElement& o) const {
        assert(ctx_ && o.ctx_ && *ctx_ == *o.ctx_);
        (void)o;
    }
    const FieldCtx* ctx_;
    u64 c0_, c1_;
};

inline FieldElement make_element(const FieldCtx& ctx, u64 c0, u64 c1 = 0) { return FieldElement(ctx, c0, c1); }

FieldElement from_signed(const FieldCtx& ctx, i64 v);

FieldElement random_element(const FieldCtx& ctx, Rng& rng);

/// True iff x is a square in the field (0 counts as a square).
bool is_square(const FieldElement& x);

}  // namespace volcano

#endif
