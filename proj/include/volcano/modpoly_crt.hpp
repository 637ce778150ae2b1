#ifndef VOLCANO_MODPOLY_CRT_HPP
#define VOLCANO_MODPOLY_CRT_HPP

#include "volcano/hilbert.hpp"

namespace volcano {

struct ModPolyPrimeEntry {
    u64 p = 0;
    i64 t = 0;  // positive representative; sign fixed at use so t = 2 mod ell
    u64 v = 0;  // 4p = t^2 - ell^2 v^2 D, ell does not divide v
};

struct ModPolyPrimePlan {
    u64 ell = 0;
    i64 D = 0;
    std::vector<ModPolyPrimeEntry> primes;
    double total_bits() const;
};

/// h(D) > ell + 1 and both cl(D) and cl(ell^2 D) generated by prime forms of
/// norm below ell (constructively checked). D fundamental.
bool modpoly_disc_admissible(u64 ell, i64 D);

/// Smallest admissible |D|.
i64 select_modpoly_disc(u64 ell);

ModPolyPrimePlan select_modpoly_primes(u64 ell, double min_bits,
                                       const std::set<u64>* exclude = nullptr);

/// The two torsor levels of one prime: surface cycle Ell_O with horizontal
/// ell-edges, the floor Ell_O' in enumeration order, and parent-child edges.
struct TwoLevelChart {
    u64 p = 0;
    u64 ell = 0;
    i64 D = 0;
    std::vector<u64> surface;                  // j-invariants, torsor order
    std::vector<std::vector<u64>> horizontal;  // per surface index, 1 + (D|ell) values
    std::vector<std::vector<u64>> children;    // per surface index, ell - (D|ell) values
    std::vector<u64> floor_js;                 // torsor order of Ell_O'
};

TwoLevelChart map_two_level_volcano(const ModPolyPrimeEntry& entry, i64 D, u64 ell,
                                    const PhiProvider& phis, Rng& rng);

/// Dense coefficient matrix c[i][m] of Phi_ell mod p (0 <= i, m <= ell+1),
/// interpolated through ell + 2 surface vertices and verified on the rest.
using CoeffMatrix = std::vector<std::vector<u64>>;
CoeffMatrix interpolate_phi_mod_p(const TwoLevelChart& chart, const FieldCtx& ctx);

/// Coefficient-wise symmetric-range CRT of per-prime matrices.
ModularPolynomial modpoly_crt_lift(u64 ell, const std::vector<u64>& primes,
                                   const std::vector<CoeffMatrix>& residues);

struct ModPolyOptions {
    u64 seed = 1;
    int threads = 1;
    double min_bits = 0;  // 0: coefficient-height heuristic
    const std::set<u64>* exclude_primes = nullptr;
};

/// Independent route to Phi_ell over Z: interpolation through vertices whose
/// full neighbor lists come from Velu kernel enumeration (no volcano walks).
/// Serves as the ell = 2 path and as the cross-validation oracle for odd ell.
ModularPolynomial velu_bootstrap_modpoly(u64 ell, const ModPolyOptions& opts = {});

/// The CRT pipeline for odd ell (two-level torsor mapping + interpolation);
/// routes ell = 2 to the bootstrap oracle.
ModularPolynomial compute_modular_polynomial(u64 ell, const ModPolyOptions& opts = {});

/// Cache wired to compute_modular_polynomial.
PhiCache make_phi_cache(const std::string& dir, ModPolyOptions opts = {});

}  // namespace volcano

#endif
