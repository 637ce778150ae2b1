#ifndef VOLCANO_MODPOLY_HPP
#define VOLCANO_MODPOLY_HPP

#include <gmpxx.h>

#include <functional>
#include <map>
#include <string>

#include "volcano/poly.hpp"

namespace volcano {

/// Classical modular polynomial Phi_ell over Z, stored sparsely on the
/// triangle i >= j (symmetric completion implied).
class ModularPolynomial {
  public:
    ModularPolynomial() = default;
    explicit ModularPolynomial(u64 ell) : ell_(ell) {}

    u64 ell() const { return ell_; }
    void set(u32 i, u32 j, mpz_class v);
    const mpz_class& get(u32 i, u32 j) const;
    const std::map<std::pair<u32, u32>, mpz_class>& coefficients() const { return c_; }

    bool operator==(const ModularPolynomial& o) const { return ell_ == o.ell_ && c_ == o.c_; }
    bool operator!=(const ModularPolynomial& o) const { return !(*this == o); }

  private:
    u64 ell_ = 0;
    std::map<std::pair<u32, u32>, mpz_class> c_;
};

/// Phi_ell(j, Y) over the context field: monic of degree ell + 1.
Poly instantiate(const ModularPolynomial& phi, const FieldCtx& ctx, const FieldElement& j);

/// Out-neighbors of j in G_ell: roots of Phi_ell(j, Y) in the field, expanded
/// with multiplicity and sorted canonically.
std::vector<FieldElement> neighbors(const ModularPolynomial& phi, const FieldCtx& ctx,
                                    const FieldElement& j, Rng& rng);

/// Text format: `modpoly ell=<l>` then `<i> <j> <coeff>` lines (i >= j,
/// sorted lexicographically); `#` comments and blank lines ignored.
void store_modpoly(const std::string& path, const ModularPolynomial& phi);
ModularPolynomial load_modpoly(const std::string& path);

/// On-disk cache of modular polynomials: phi_<ell>.txt files in a directory,
/// guarded by advisory file locks for concurrent writers; reads are lock-free.
class PhiCache {
  public:
    using ComputeFn = std::function<ModularPolynomial(u64 ell)>;
    PhiCache(std::string dir, ComputeFn compute);
    /// Load from disk or compute-and-store.
    ModularPolynomial get(u64 ell) const;
    const std::string& dir() const { return dir_; }

  private:
    std::string dir_;
    ComputeFn compute_;
};

}  // namespace volcano

#endif
