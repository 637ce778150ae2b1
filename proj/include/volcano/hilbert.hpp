#ifndef VOLCANO_HILBERT_HPP
#define VOLCANO_HILBERT_HPP

#include "volcano/isogeny.hpp"
#include "volcano/volcano.hpp"

namespace volcano {

/// Source of modular polynomials for the small generator norms used by the
/// surface walks (typically a PhiCache, or the bootstrap oracle in tests).
using PhiProvider = std::function<ModularPolynomial(u64)>;

struct CrtPrimeEntry {
    u64 p = 0;
    i64 t = 0;  // positive representative
    u64 v = 0;  // 4p = t^2 - v^2 D
};

struct CrtPrimePlan {
    i64 D = 0;
    std::vector<CrtPrimeEntry> primes;
    double total_bits() const;
};

/// Primes with 4p = t^2 - v^2 D, v 13-smooth, collected by ascending p until
/// the product exceeds min_bits. Primes in `exclude` are skipped (used to
/// build disjoint plans).
CrtPrimePlan select_crt_primes(i64 D, double min_bits, const std::set<u64>* exclude = nullptr);

/// Random curves until the trace is exactly t (twisting when -t shows up).
CurveModel find_curve_with_trace(const FieldCtx& ctx, i64 t, Rng& rng);

/// j-invariant with endomorphism order of discriminant D, reached from E by
/// per-prime volcano climbing (v from the norm equation 4p = t^2 - v^2 D).
/// skip_prime > 0 leaves that prime's level untouched (the caller positioned
/// it by other means).
FieldElement climb_to_order(const CurveModel& E, i64 D, u64 v, const PhiProvider& phis, Rng& rng,
                            u64 skip_prime = 0);

/// Walks the cl(D)-torsor from j0 and returns all h(D) j-invariants in
/// enumeration order: rows along the first generator's surface cycles
/// (gcd-transported when a later generator's rungs are available), generator
/// switches via visited-avoiding surface steps.
std::vector<FieldElement> enumerate_ell_torsor(const FieldCtx& ctx, const FieldElement& j0,
                                               const ClassPresentation& pres, u64 v,
                                               const PhiProvider& phis, Rng& rng,
                                               bool use_gcd_walks = true);

/// H_D mod p as a monic polynomial over F_p.
Poly hilbert_mod_p(i64 D, const CrtPrimeEntry& entry, const PhiProvider& phis, Rng& rng);

struct HilbertResult {
    i64 D = 0;
    std::vector<mpz_class> coeffs;  // degree order, monic of degree h(D)
};

/// Coefficient-wise CRT into the symmetric range (-M/2, M/2].
HilbertResult crt_lift(i64 D, const std::vector<u64>& primes,
                       const std::vector<std::vector<u64>>& residues);

/// Reduce all coefficients into [0, m).
std::vector<mpz_class> reduce_coeffs_mod(const HilbertResult& h, const mpz_class& m);

struct HilbertOptions {
    u64 seed = 1;
    int threads = 1;
    double min_bits = 0;  // 0: height heuristic
    const std::set<u64>* exclude_primes = nullptr;
};

/// The CRT pipeline: per-prime torsor enumeration, then an adaptive lift that
/// adds primes until two consecutive lifts agree.
HilbertResult hilbert_class_polynomial(i64 D, const PhiProvider& phis, const HilbertOptions& opts = {});

}  // namespace volcano

#endif
