#ifndef VOLCANO_POLY_HPP
#define VOLCANO_POLY_HPP

#include <optional>
#include <vector>

#include "volcano/fields.hpp"

namespace volcano {

/// Univariate polynomial over a field context; coefficients ascending,
/// normalized (no trailing zeros, empty = zero polynomial).
class Poly {
  public:
    explicit Poly(const FieldCtx& ctx) : ctx_(&ctx) {}
    Poly(const FieldCtx& ctx, std::vector<FieldElement> coeffs) : ctx_(&ctx), c_(std::move(coeffs)) {
        normalize();
    }
    static Poly from_ints(const FieldCtx& ctx, std::initializer_list<i64> coeffs);
    static Poly constant(const FieldCtx& ctx, const FieldElement& a);
    static Poly identity_x(const FieldCtx& ctx);  // the polynomial Y
    static Poly from_roots(const FieldCtx& ctx, const std::vector<FieldElement>& roots);

    const FieldCtx& ctx() const { return *ctx_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const FieldElement& operator[](size_t i) const { return c_[i]; }
    const std::vector<FieldElement>& coeffs() const { return c_; }
    FieldElement coeff(size_t i) const {
        return i < c_.size() ? c_[i] : FieldElement(*ctx_, 0);
    }
    FieldElement leading() const { return c_.back(); }
    bool is_monic() const { return !c_.empty() && c_.back() == FieldElement(*ctx_, 1); }

    bool operator==(const Poly& o) const { return c_ == o.c_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(const FieldElement& s) const;

    FieldElement eval(const FieldElement& x) const;
    Poly derivative() const;
    Poly monic() const;
    Poly shifted(int k) const;  // multiply by Y^k

    std::string str() const;

  private:
    void normalize() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }
    const FieldCtx* ctx_;
    std::vector<FieldElement> c_;
};

/// Quotient and remainder; divisor must be nonzero.
std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b);
Poly poly_mod(const Poly& a, const Poly& b);
/// True and sets quotient when b divides a exactly.
bool poly_divides(const Poly& b, const Poly& a, Poly* quotient = nullptr);

/// Monic gcd.
Poly poly_gcd(Poly a, Poly b);

/// Inverse of a modulo f; throws when gcd(a, f) != 1.
Poly poly_invmod(const Poly& a, const Poly& f);

/// base^e mod f.
Poly poly_powmod(const Poly& base, u128 e, const Poly& f);

/// Y^q mod f where q is the context cardinality. f must have degree >= 1.
Poly frobenius_powmod(const Poly& f);

/// All roots in the context field, sorted canonically. With multiplicity when
/// requested (pairs of root, multiplicity >= 1).
std::vector<std::pair<FieldElement, int>> poly_roots(const Poly& f, bool want_multiplicity, Rng& rng);
std::vector<FieldElement> poly_distinct_roots(const Poly& f, Rng& rng);

/// One root chosen uniformly at random among the roots in the field, or none.
std::optional<FieldElement> poly_random_root(const Poly& f, Rng& rng);

/// Irreducible factors of degree <= max_degree of a squarefree f (each listed
/// once; f need not be fully split). Sorted by (degree, coefficients).
std::vector<Poly> poly_factors_up_to(const Poly& f, int max_degree, Rng& rng);

/// Unique interpolating polynomial of degree < xs.size() through (xs[i], ys[i]).
Poly poly_interpolate(const FieldCtx& ctx, const std::vector<FieldElement>& xs,
                      const std::vector<FieldElement>& ys);

}  // namespace volcano

#endif
