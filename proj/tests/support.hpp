#ifndef VOLCANO_TESTS_SUPPORT_HPP
#define VOLCANO_TESTS_SUPPORT_HPP

#include "volcano/modpoly_crt.hpp"

namespace testsupport {

// Modular polynomials for tests, produced by the kernel-enumeration route and
// cached on disk next to the test binaries (shared across suites and runs).
inline volcano::ModularPolynomial test_phi(volcano::u64 ell) {
    static volcano::PhiCache cache("phi_cache_test", [](volcano::u64 l) {
        volcano::ModPolyOptions o;
        o.seed = 7;
        return volcano::velu_bootstrap_modpoly(l, o);
    });
    return cache.get(ell);
}

inline volcano::PhiProvider test_phi_provider() {
    return [](volcano::u64 ell) { return test_phi(ell); };
}

// Model of j with the requested trace (twisting as needed).
inline volcano::CurveModel curve_with_trace_j(const volcano::FieldCtx& ctx, volcano::u64 j,
                                              volcano::i64 t, volcano::Rng& rng) {
    volcano::CurveModel E = volcano::curve_from_j(ctx, volcano::FieldElement(ctx, j));
    volcano::i64 got = static_cast<volcano::i64>(ctx.p()) + 1 -
                       static_cast<volcano::i64>(volcano::point_count(E, rng));
    if (got == t) return E;
    return volcano::quadratic_twist(E);
}

}  // namespace testsupport

#endif
