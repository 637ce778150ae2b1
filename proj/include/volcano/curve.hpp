#ifndef VOLCANO_CURVE_HPP
#define VOLCANO_CURVE_HPP

#include "volcano/poly.hpp"

namespace volcano {

/// Raised when an operation that requires an ordinary curve is given a
/// supersingular one (t = 0 mod p).
struct SupersingularInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Short Weierstrass curve y^2 = x^3 + a x + b with 4a^3 + 27b^2 != 0.
class CurveModel {
  public:
    CurveModel(const FieldCtx& ctx, const FieldElement& a, const FieldElement& b);

    const FieldCtx& ctx() const { return *ctx_; }
    const FieldElement& a() const { return a_; }
    const FieldElement& b() const { return b_; }
    FieldElement j_invariant() const { return j_; }
    /// x^3 + a x + b.
    FieldElement rhs(const FieldElement& x) const { return (x * x + a_) * x + b_; }

  private:
    const FieldCtx* ctx_;
    FieldElement a_, b_;
    FieldElement j_;
};

struct CurvePoint {
    bool infinity = true;
    FieldElement x, y;
    CurvePoint() = default;
    CurvePoint(const CurveModel& E, const FieldElement& x, const FieldElement& y);
    static CurvePoint at_infinity() { return CurvePoint(); }
    bool operator==(const CurvePoint& o) const {
        if (infinity || o.infinity) return infinity == o.infinity;
        return x == o.x && y == o.y;
    }
};

CurvePoint point_add(const CurveModel& E, const CurvePoint& P, const CurvePoint& Q);
CurvePoint point_negate(const CurvePoint& P);
CurvePoint scalar_mul(const CurveModel& E, u128 n, const CurvePoint& P);
/// Random affine point; prime-field contexts only.
CurvePoint random_point(const CurveModel& E, Rng& rng);

FieldElement j_invariant(const CurveModel& E);

/// Curve with the requested j-invariant: (3j(1728-j), 2j(1728-j)^2),
/// with (0,1) for j = 0 and (1,0) for j = 1728.
CurveModel curve_from_j(const FieldCtx& ctx, const FieldElement& j);

/// Quadratic twist by the context nonresidue; same j, negated trace.
CurveModel quadratic_twist(const CurveModel& E);

/// Quadratic-residue table for one prime, shared across exhaustive counts.
struct QrTable {
    u64 p = 0;
    std::vector<unsigned char> is_sq;
    static QrTable build(u64 p);
    // -1, 0, +1
    int chi(u64 v) const { return v == 0 ? 0 : (is_sq[v] ? 1 : -1); }
};

u64 point_count_exhaustive(const CurveModel& E, const QrTable* table = nullptr);
u64 point_count_bsgs(const CurveModel& E, Rng& rng);
/// #E(F_p): exhaustive x-sweep for p < 2^20, BSGS with twist disambiguation above.
u64 point_count(const CurveModel& E, Rng& rng);
/// q + 1 - #E(F_q).
i64 trace_of_frobenius(const CurveModel& E, Rng& rng);

struct NormEquationData {
    u64 q = 0;   // field cardinality
    i64 t = 0;   // Frobenius trace
    u64 v = 0;   // conductor of Z[pi] in O_K
    i64 D_K = 0; // fundamental discriminant
};

/// Solve 4q = t^2 - v^2 D_K with D_K fundamental. Requires t^2 < 4q and
/// gcd(t, q) = 1 (ordinary case).
NormEquationData solve_norm_equation(u64 q, i64 t);

/// Division polynomial in x whose roots are exactly the x-coordinates of the
/// nonzero n-torsion points (for even n this includes the 2-torsion factor).
Poly division_polynomial(const CurveModel& E, int n);

/// The x-only sequence f_0..f_n with psi_m = f_m * (2y)^(m even).
std::vector<Poly> divpoly_sequence(const CurveModel& E, int n);

/// x(m P) as a rational function evaluated in the quotient ring F_q[x]/(h):
/// returns numerator/denominator pair reduced mod h.
std::pair<Poly, Poly> x_multiple_mod(const CurveModel& E, const std::vector<Poly>& fs, int m,
                                     const Poly& h);

}  // namespace volcano

#endif
