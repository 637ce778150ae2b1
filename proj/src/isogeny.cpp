#include "volcano/isogeny.hpp"

#include <algorithm>

namespace volcano {

IsogenyStep velu_isogeny(const CurveModel& E, const KernelSubgroup& kernel) {
    const FieldCtx& ctx = E.ctx();
    u64 ell = kernel.ell;
    if (!is_prime_u64(ell)) throw std::invalid_argument("velu_isogeny: ell must be prime");
    if (ell == ctx.p()) throw std::invalid_argument("velu_isogeny: ell equals the characteristic");
    const Poly& h = kernel.kernel_poly;
    int d = (ell == 2) ? 1 : static_cast<int>((ell - 1) / 2);
    if (h.degree() != d || !h.is_monic())
        throw std::invalid_argument("velu_isogeny: kernel polynomial has the wrong shape");
    if (!poly_divides(h, division_polynomial(E, static_cast<int>(ell))))
        throw std::invalid_argument("velu_isogeny: kernel polynomial does not divide psi_ell");

    FieldElement a = E.a(), b = E.b();
    FieldElement dF(ctx, static_cast<u64>(d));
    FieldElement t(ctx, 0), w(ctx, 0);
    if (ell == 2) {
        FieldElement x0 = -h[0];
        t = FieldElement(ctx, 3) * x0 * x0 + a;
        w = x0 * t;
    } else {
        // Newton power sums from the signed elementary symmetric coefficients.
        FieldElement e1 = d >= 1 ? -h[d - 1] : FieldElement(ctx, 0);
        FieldElement e2 = d >= 2 ? h[d - 2] : FieldElement(ctx, 0);
        FieldElement e3 = d >= 3 ? -h[d - 3] : FieldElement(ctx, 0);
        FieldElement p1 = e1;
        FieldElement p2 = e1 * p1 - e2 - e2;
        FieldElement p3 = e1 * p2 - e2 * p1 + FieldElement(ctx, 3) * e3;
        t = FieldElement(ctx, 6) * p2 + FieldElement(ctx, 2) * a * dF;
        w = FieldElement(ctx, 10) * p3 + FieldElement(ctx, 6) * a * p1 + FieldElement(ctx, 4) * b * dF;
    }
    FieldElement a2 = a - FieldElement(ctx, 5) * t;
    FieldElement b2 = b - FieldElement(ctx, 7) * w;
    return IsogenyStep{E, CurveModel(ctx, a2, b2), ell, kernel};
}

Poly kernel_poly_from_point(const CurveModel& E, const CurvePoint& P, u64 ell) {
    const FieldCtx& ctx = E.ctx();
    if (ell == 2) {
        if (P.infinity || !P.y.is_zero()) throw std::invalid_argument("kernel point must have order 2");
        return Poly(ctx, {-P.x, FieldElement(ctx, 1)});
    }
    std::vector<FieldElement> xs;
    CurvePoint Q = P;
    for (u64 m = 1; m <= (ell - 1) / 2; ++m) {
        if (Q.infinity) throw std::invalid_argument("kernel point has order smaller than ell");
        xs.push_back(Q.x);
        Q = point_add(E, Q, P);
    }
    return Poly::from_roots(ctx, xs);
}

CurvePoint random_ell_torsion_point(const CurveModel& E, u64 n, u64 ell, Rng& rng) {
    if (n % ell != 0) throw std::invalid_argument("random_ell_torsion_point: ell does not divide #E");
    u64 cof = n;
    while (cof % ell == 0) cof /= ell;
    for (int attempt = 0; attempt < 4096; ++attempt) {
        CurvePoint S = scalar_mul(E, cof, random_point(E, rng));
        if (S.infinity) continue;
        // S has ell-power order; reduce to exact order ell.
        CurvePoint T = S;
        while (true) {
            CurvePoint U = scalar_mul(E, ell, T);
            if (U.infinity) return T;
            T = U;
        }
    }
    throw InternalError("random_ell_torsion_point: sampling failed");
}

namespace {

// Kernel polynomial of the subgroup through a root of the irreducible factor
// f of psi_ell, computed by accumulating prod_m (Y - x(m P)) over the quotient
// ring F_q[x]/(f). Returns the base-field polynomial, or nullopt when the
// subgroup is not Galois-stable (some coefficient falls outside F_q).
std::optional<Poly> orbit_kernel_poly(const CurveModel& E, const std::vector<Poly>& fs, u64 ell,
                                      const Poly& f) {
    const FieldCtx& ctx = E.ctx();
    int d = static_cast<int>((ell - 1) / 2);
    // Y-coefficients of the running product live in F_q[x]/(f).
    std::vector<Poly> acc{Poly::constant(ctx, FieldElement(ctx, 1))};
    for (int m = 1; m <= d; ++m) {
        auto [num, den] = x_multiple_mod(E, fs, m, f);
        Poly xm = poly_mod(num * poly_invmod(den, f), f);
        std::vector<Poly> next(acc.size() + 1, Poly(ctx));
        for (size_t i = 0; i < acc.size(); ++i) {
            next[i + 1] = next[i + 1] + acc[i];
            next[i] = next[i] - poly_mod(acc[i] * xm, f);
        }
        acc = std::move(next);
    }
    std::vector<FieldElement> coeffs;
    coeffs.reserve(acc.size());
    for (const Poly& c : acc) {
        if (c.degree() > 0) return std::nullopt;
        coeffs.push_back(c.coeff(0));
    }
    return Poly(ctx, std::move(coeffs));
}

}  // namespace

std::vector<Poly> rational_kernel_polys(const CurveModel& E, u64 ell, Rng& rng) {
    const FieldCtx& ctx = E.ctx();
    if (!is_prime_u64(ell) || ell > 60) throw std::invalid_argument("rational_kernel_polys: bad ell");
    if (ell == ctx.p()) throw std::invalid_argument("rational_kernel_polys: ell equals the characteristic");
    std::vector<Poly> out;
    if (ell == 2) {
        Poly F(ctx, {E.b(), E.a(), FieldElement(ctx, 0), FieldElement(ctx, 1)});
        for (const auto& r : poly_distinct_roots(F, rng))
            out.push_back(Poly(ctx, {-r, FieldElement(ctx, 1)}));
        return out;
    }
    auto fs = divpoly_sequence(E, static_cast<int>(ell));
    const Poly& psi = fs[ell];
    int d = static_cast<int>((ell - 1) / 2);
    auto factors = poly_factors_up_to(psi, d, rng);
    for (const Poly& f : factors) {
        auto h = orbit_kernel_poly(E, fs, ell, f);
        if (!h) continue;
        if (std::find(out.begin(), out.end(), *h) == out.end()) out.push_back(*h);
    }
    std::sort(out.begin(), out.end(), [](const Poly& a, const Poly& b) {
        for (int i = a.degree(); i >= 0; --i) {
            if (a[i] != b[i]) return a[i] < b[i];
        }
        return false;
    });
    return out;
}

std::vector<FieldElement> rational_isogenous_j(const CurveModel& E, u64 ell, Rng& rng) {
    std::vector<FieldElement> out;
    for (const Poly& h : rational_kernel_polys(E, ell, rng)) {
        IsogenyStep step = velu_isogeny(E, KernelSubgroup{E, ell, h});
        out.push_back(step.target.j_invariant());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace volcano
