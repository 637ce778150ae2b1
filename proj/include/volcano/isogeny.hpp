#ifndef VOLCANO_ISOGENY_HPP
#define VOLCANO_ISOGENY_HPP

#include "volcano/curve.hpp"

namespace volcano {

/// Kernel of a separable ell-isogeny, given by its monic kernel polynomial
/// (degree (ell-1)/2 for odd ell, one x-coordinate per +- pair; degree 1 for
/// ell = 2).
struct KernelSubgroup {
    CurveModel E;
    u64 ell;
    Poly kernel_poly;
};

struct IsogenyStep {
    CurveModel source;
    CurveModel target;
    u64 ell;
    KernelSubgroup kernel;
};

/// Velu's formulas on the kernel polynomial (power sums of the kernel
/// x-coordinates). Validates that the kernel polynomial divides psi_ell.
IsogenyStep velu_isogeny(const CurveModel& E, const KernelSubgroup& kernel);

/// Kernel polynomial of <P> for a rational point P of odd prime order ell.
Poly kernel_poly_from_point(const CurveModel& E, const CurvePoint& P, u64 ell);

/// Uniformly random rational point of exact order ell, given #E(F_p) = n
/// (cofactor method: strip the full ell-part, then walk back up). Requires
/// ell | n.
CurvePoint random_ell_torsion_point(const CurveModel& E, u64 n, u64 ell, Rng& rng);

/// Monic kernel polynomials of all Galois-stable order-ell subgroups,
/// discovered from the irreducible factors of psi_ell without the modular
/// polynomial. Deduplicated and sorted.
std::vector<Poly> rational_kernel_polys(const CurveModel& E, u64 ell, Rng& rng);

/// j-invariants ell-isogenous to j(E) over the base field, one entry per
/// rational subgroup (a sorted multiset). Works without Phi_ell.
std::vector<FieldElement> rational_isogenous_j(const CurveModel& E, u64 ell, Rng& rng);

}  // namespace volcano

#endif
