#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "volcano/isogeny.hpp"

using namespace volcano;
using testsupport::curve_with_trace_j;
using testsupport::test_phi;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::trunc);
    f << body;
}

}  // namespace

TEST_CASE("store/load round-trips bit-exactly") {
    ModularPolynomial phi = test_phi(2);
    store_modpoly("mp_roundtrip_a.txt", phi);
    ModularPolynomial phi2 = load_modpoly("mp_roundtrip_a.txt");
    CHECK(phi2 == phi);
    store_modpoly("mp_roundtrip_b.txt", phi2);
    CHECK(slurp("mp_roundtrip_a.txt") == slurp("mp_roundtrip_b.txt"));
    std::remove("mp_roundtrip_a.txt");
    std::remove("mp_roundtrip_b.txt");
}

TEST_CASE("format validation") {
    SUBCASE("duplicate entry rejected") {
        spit("mp_bad.txt", "modpoly ell=2\n0 0 5\n0 0 6\n");
        CHECK_THROWS_AS(load_modpoly("mp_bad.txt"), std::invalid_argument);
    }
    SUBCASE("non-prime ell rejected") {
        spit("mp_bad.txt", "modpoly ell=4\n0 0 5\n");
        CHECK_THROWS_AS(load_modpoly("mp_bad.txt"), std::invalid_argument);
    }
    SUBCASE("i < j rejected") {
        spit("mp_bad.txt", "modpoly ell=2\n0 1 5\n");
        CHECK_THROWS_AS(load_modpoly("mp_bad.txt"), std::invalid_argument);
    }
    SUBCASE("unsorted entries rejected") {
        spit("mp_bad.txt", "modpoly ell=2\n1 0 5\n0 0 6\n");
        CHECK_THROWS_AS(load_modpoly("mp_bad.txt"), std::invalid_argument);
    }
    SUBCASE("exponent out of range rejected") {
        spit("mp_bad.txt", "modpoly ell=2\n4 0 5\n");
        CHECK_THROWS_AS(load_modpoly("mp_bad.txt"), std::invalid_argument);
    }
    SUBCASE("comments and blank lines accepted") {
        spit("mp_bad.txt", "# header comment\nmodpoly ell=2\n\n0 0 5 # trailing\n");
        ModularPolynomial m = load_modpoly("mp_bad.txt");
        CHECK(m.get(0, 0) == 5);
    }
    std::remove("mp_bad.txt");
}

TEST_CASE("instantiation is monic of degree ell + 1") {
    Rng rng(1);
    FieldCtx ctx = FieldCtx::prime_field(4451);
    for (u64 ell : {2ull, 3ull, 5ull}) {
        ModularPolynomial phi = test_phi(ell);
        for (int rep = 0; rep < 100; ++rep) {
            FieldElement j = random_element(ctx, rng);
            Poly f = instantiate(phi, ctx, j);
            CHECK(f.degree() == static_cast<int>(ell) + 1);
            CHECK(f.is_monic());
        }
    }
}

TEST_CASE("the modular equation vanishes on Velu-isogenous pairs") {
    Rng rng(2);
    for (u64 p : {1009ull, 4451ull}) {
        FieldCtx ctx = FieldCtx::prime_field(p);
        for (u64 ell : {2ull, 3ull, 5ull}) {
            ModularPolynomial phi = test_phi(ell);
            int done = 0;
            while (done < 15) {
                FieldElement j = random_element(ctx, rng);
                if (j.is_zero() || j == from_signed(ctx, 1728)) continue;
                CurveModel E = curve_from_j(ctx, j);
                for (const Poly& kp : rational_kernel_polys(E, ell, rng)) {
                    IsogenyStep step = velu_isogeny(E, {E, ell, kp});
                    Poly f = instantiate(phi, ctx, j);
                    CHECK(f.eval(step.target.j_invariant()).is_zero());
                }
                ++done;
            }
        }
    }
}

TEST_CASE("symmetry of the stored polynomial") {
    Rng rng(3);
    FieldCtx ctx = FieldCtx::prime_field(65537);
    for (u64 ell : {2ull, 3ull}) {
        ModularPolynomial phi = test_phi(ell);
        // coefficient access is symmetric
        CHECK(phi.get(0, static_cast<u32>(ell) + 1) == phi.get(static_cast<u32>(ell) + 1, 0));
        for (int rep = 0; rep < 100; ++rep) {
            FieldElement x = random_element(ctx, rng), y = random_element(ctx, rng);
            CHECK(instantiate(phi, ctx, x).eval(y) == instantiate(phi, ctx, y).eval(x));
        }
    }
}

TEST_CASE("neighbors: multiplicity bound and bidirectedness") {
    Rng rng(4);
    FieldCtx ctx = FieldCtx::prime_field(4451);
    FieldElement c1728 = from_signed(ctx, 1728);
    for (u64 ell : {2ull, 3ull, 5ull}) {
        ModularPolynomial phi = test_phi(ell);
        for (int rep = 0; rep < 40; ++rep) {
            FieldElement j = random_element(ctx, rng);
            auto ns = neighbors(phi, ctx, j, rng);
            CHECK(ns.size() <= ell + 1);
            if (j.is_zero() || j == c1728) continue;
            for (const auto& j2 : ns) {
                if (j2.is_zero() || j2 == c1728) continue;
                auto back = neighbors(phi, ctx, j2, rng);
                int m_fwd = static_cast<int>(std::count(ns.begin(), ns.end(), j2));
                int m_bwd = static_cast<int>(std::count(back.begin(), back.end(), j));
                CHECK(m_fwd == m_bwd);
            }
        }
    }
}

TEST_CASE("neighbors at j=901 over F_4451 match the 5-volcano picture") {
    Rng rng(5);
    FieldCtx ctx = FieldCtx::prime_field(4451);
    ModularPolynomial phi = test_phi(5);
    auto ns = neighbors(phi, ctx, FieldElement(ctx, 901), rng);
    REQUIRE(ns.size() == 6);
    std::set<u64> got;
    for (auto& j : ns) got.insert(j.c0());
    REQUIRE(got.size() == 6);
    std::set<u64> children{3188, 2970, 1478, 3328};
    std::set<u64> surface{351, 701, 1582, 2215, 2501, 2872};
    int nc = 0, nsf = 0;
    for (u64 j : got) {
        nc += children.count(j);
        nsf += surface.count(j);
    }
    CHECK(nc == 4);
    CHECK(nsf == 2);
}

TEST_CASE("bootstrap closure: neighbors equal Velu-enumerated isogenous j") {
    // The central consistency between the modular equation and kernel
    // enumeration, on random (p, ell, j) triples.
    Rng rng(6);
    std::vector<u64> ps{613, 1009, 2003, 4451, 9973};
    int done = 0;
    while (done < 100) {
        u64 p = ps[rng() % ps.size()];
        FieldCtx ctx = FieldCtx::prime_field(p);
        u64 ell = std::vector<u64>{2, 3, 5, 7}[rng() % 4];
        FieldElement j = random_element(ctx, rng);
        if (j.is_zero() || j == from_signed(ctx, 1728)) continue;
        CurveModel E = curve_from_j(ctx, j);
        if (point_count_exhaustive(E) == p + 1) continue;  // skip supersingular
        ModularPolynomial phi = test_phi(ell);
        auto via_phi = neighbors(phi, ctx, j, rng);
        auto via_velu = rational_isogenous_j(E, ell, rng);
        CHECK(via_phi == via_velu);
        ++done;
    }
}

TEST_CASE("Kronecker congruence: Phi_ell = (X^ell - Y)(X - Y^ell) mod ell") {
    for (u64 ell : {2ull, 3ull, 5ull, 7ull}) {
        ModularPolynomial phi = test_phi(ell);
        mpz_class L = ell;
        // (X^ell - Y)(X - Y^ell) = X^{ell+1} - X^ell Y^ell - XY + Y^{ell+1}
        for (u32 i = 0; i <= ell + 1; ++i) {
            for (u32 j = 0; j <= i; ++j) {
                mpz_class want = 0;
                if (i == ell + 1 && j == 0) want = 1;
                if (i == ell && j == ell) want = -1;
                if (i == 1 && j == 1) want = -1;
                mpz_class got = phi.get(i, j) % L;
                if (got < 0) got += L;
                mpz_class w = want % L;
                if (w < 0) w += L;
                CHECK(got == w);
            }
        }
    }
}

TEST_CASE("cache round-trip") {
    ModularPolynomial a = test_phi(3);
    ModularPolynomial b = test_phi(3);  // second read comes from disk
    CHECK(a == b);
    ModularPolynomial c = load_modpoly("phi_cache_test/phi_3.txt");
    CHECK(c == a);
}
