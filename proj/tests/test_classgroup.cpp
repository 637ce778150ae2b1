#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "volcano/classgroup.hpp"

using Rng = std::mt19937_64;

using namespace volcano;

namespace {

std::vector<i64> random_discs(int n, Rng& rng) {
    std::vector<i64> out;
    while (static_cast<int>(out.size()) < n) {
        i64 d = -static_cast<i64>(rng() % 100000) - 7;
        if ((((d % 4) + 4) % 4 == 0 || ((d % 4) + 4) % 4 == 1)) out.push_back(d);
    }
    return out;
}

}  // namespace

TEST_CASE("reduction") {
    SUBCASE("spec example: (5, 7, 10) of disc -151 reduces to (5, -3, 8)") {
        QuadraticForm f{5, 7, 10};
        REQUIRE(f.disc() == -151);
        QuadraticForm r = reduce(f);
        CHECK(r == QuadraticForm{5, -3, 8});
        CHECK(is_reduced(r));
    }
    SUBCASE("principal forms are already reduced") {
        CHECK(reduce(principal_form(-151)) == QuadraticForm{1, 1, 38});
        CHECK(reduce(principal_form(-4)) == QuadraticForm{1, 0, 1});
    }
    SUBCASE("idempotent on random forms") {
        Rng rng(1);
        for (i64 D : random_discs(20, rng)) {
            for (const auto& f : enumerate_reduced_forms(D)) {
                CHECK(reduce(f) == f);
                CHECK(f.disc() == D);
            }
        }
    }
    SUBCASE("reduction of unreduced random multiples") {
        Rng rng(2);
        for (int rep = 0; rep < 300; ++rep) {
            i64 D = -7 - 4 * static_cast<i64>(rng() % 5000);
            QuadraticForm p = principal_form(D);
            // random translations keep the class and the discriminant
            i64 k = static_cast<i64>(rng() % 50) + 1;
            QuadraticForm g{p.a, p.b + 2 * p.a * k, 0};
            g.c = static_cast<i64>((static_cast<i128>(g.b) * g.b - D) / (4 * g.a));
            QuadraticForm r = reduce(g);
            CHECK(is_reduced(r));
            CHECK(r == reduce(p));
        }
    }
    SUBCASE("invalid input") {
        CHECK_THROWS_AS(reduce({1, 0, -1}), std::invalid_argument);   // positive disc
        CHECK_THROWS_AS(reduce({-1, 0, -1}), std::invalid_argument);  // a <= 0
    }
}

TEST_CASE("composition group axioms") {
    Rng rng(3);
    for (i64 D : {-151ll, -203ll, -79447ll, -3775ll}) {
        auto forms = enumerate_reduced_forms(D);
        QuadraticForm id = principal_form(D);
        for (int rep = 0; rep < 40; ++rep) {
            const QuadraticForm& f = forms[rng() % forms.size()];
            const QuadraticForm& g = forms[rng() % forms.size()];
            const QuadraticForm& h = forms[rng() % forms.size()];
            CHECK(compose(f, id) == reduce(f));
            CHECK(compose(f, conjugate(f)) == reduce(id));
            CHECK(compose(compose(f, g), h) == compose(f, compose(g, h)));
            CHECK(compose(f, g) == compose(g, f));
            // closure
            auto fg = compose(f, g);
            CHECK(std::binary_search(forms.begin(), forms.end(), fg));
        }
        // Lagrange: order of every class divides h
        for (const auto& f : forms) CHECK(forms.size() % order_of_class(f) == 0);
    }
    SUBCASE("mismatched discriminants") {
        CHECK_THROWS_AS(compose(principal_form(-7), principal_form(-8)), std::invalid_argument);
    }
}

TEST_CASE("class numbers") {
    SUBCASE("h(-151) = 7, consistent with the seven surface vertices") {
        CHECK(class_number(-151) == 7);
    }
    SUBCASE("h(-79447) = 100") { CHECK(class_number(-79447) == 100); }
    SUBCASE("h(-3775) = 28 = (5 - (D|5)) * h(-151)") {
        CHECK(class_number(-3775) == 28);
        CHECK(5 - kronecker(-151, 5) == 4);
        CHECK(class_number(-3775) == static_cast<u64>(5 - kronecker(-151, 5)) * class_number(-151));
    }
    SUBCASE("h(l^2 D) identity on random pairs") {
        Rng rng(5);
        int done = 0;
        while (done < 30) {
            i64 D = -7 - static_cast<i64>(rng() % 20000);
            i64 r = ((D % 4) + 4) % 4;
            if (r != 0 && r != 1) continue;
            if (D >= -4) continue;
            u64 ell = (done % 3 == 0) ? 2 : (done % 3 == 1 ? 3 : 5);
            if (OrderSpec::of(D).f % ell == 0) continue;
            u64 lhs = class_number(static_cast<i64>(ell * ell) * D);
            u64 rhs = (ell - kronecker(D, static_cast<i64>(ell))) * class_number(D);
            CHECK(lhs == rhs);
            ++done;
        }
    }
}

TEST_CASE("kronecker class number") {
    SUBCASE("fundamental discriminant: single order") {
        CHECK(kronecker_class_number(-151) == class_number(-151));
        CHECK(kronecker_class_number(-203) == class_number(-203));
    }
    SUBCASE("Example census total: H(52^2 - 4*411751) = 1008") {
        CHECK(kronecker_class_number(52 * 52 - 4 * 411751) == 1008);
    }
    SUBCASE("q=4451, t=52: sum over the order lattice") {
        u64 expect = class_number(-151) + class_number(-604) + class_number(-3775) + class_number(-15100);
        CHECK(kronecker_class_number(52 * 52 - 4 * 4451) == expect);
    }
}

TEST_CASE("prime forms") {
    SUBCASE("D=-151, l=5 gives (5, 3, 8)") {
        auto f = prime_form(-151, 5);
        REQUIRE(f.has_value());
        CHECK(*f == QuadraticForm{5, 3, 8});
    }
    SUBCASE("inert primes give none") {
        // 3 is inert in Q(sqrt(-151)): kronecker(-151, 3) = -1
        REQUIRE(kronecker(-151, 3) == -1);
        CHECK(!prime_form(-151, 3).has_value());
    }
    SUBCASE("primes dividing the conductor give none") {
        CHECK(!prime_form(-3775, 5).has_value());  // -3775 = 25 * -151
    }
    SUBCASE("D=-79447, l=19 has class order 100") {
        auto f = prime_form(-79447, 19);
        REQUIRE(f.has_value());
        CHECK(order_of_class(*f) == 100);
    }
}

TEST_CASE("optimal presentation") {
    SUBCASE("D=-79447: generators (2, 13), relative orders (20, 5), relation [l13]^5 = [l2]^18") {
        ClassPresentation pres = optimal_presentation(-79447);
        REQUIRE(pres.generators.size() == 2);
        CHECK(pres.generators[0].norm == 2);
        CHECK(pres.generators[1].norm == 13);
        CHECK(pres.generators[0].rel_order == 20);
        CHECK(pres.generators[1].rel_order == 5);
        REQUIRE(pres.generators[1].power_rel.size() == 1);
        CHECK(pres.generators[1].power_rel[0] == 18);
        // verify the relation directly
        CHECK(form_pow(pres.generators[1].form, 5) == form_pow(pres.generators[0].form, 18));
        // cyclic of order 100 with minimal single-generator norm 19
        CHECK(pres.h == 100);
        auto mg = minimal_single_generator_norm(-79447);
        REQUIRE(mg.has_value());
        CHECK(*mg == 19);
    }
    SUBCASE("prime class number with a split nontrivial prime: single generator") {
        ClassPresentation pres = optimal_presentation(-151);
        REQUIRE(pres.generators.size() == 1);
        CHECK(pres.generators[0].norm == 2);
        CHECK(pres.generators[0].rel_order == 7);
    }
    SUBCASE("product of relative orders is h, random discriminants") {
        Rng rng(7);
        int done = 0;
        while (done < 50) {
            i64 D = -7 - static_cast<i64>(rng() % 40000);
            i64 r = ((D % 4) + 4) % 4;
            if (r != 0 && r != 1) continue;
            ClassPresentation pres = optimal_presentation(D);
            u64 prod = 1;
            for (auto& g : pres.generators) prod *= g.rel_order;
            CHECK(prod == pres.h);
            ++done;
        }
    }
    SUBCASE("capped variant fails when small primes cannot generate") {
        // cl(-79447) needs norm 13 when capped below it
        CHECK(!optimal_presentation_capped(-79447, 13).has_value());
        CHECK(optimal_presentation_capped(-79447, 14).has_value());
    }
}

TEST_CASE("torsor enumeration") {
    SUBCASE("single generator cycles through all classes") {
        ClassPresentation pres = optimal_presentation(-151);
        auto steps = enumerate_torsor_steps(pres);
        REQUIRE(steps.size() == 7);
        std::set<QuadraticForm> seen;
        for (auto& s : steps) seen.insert(s.cls);
        CHECK(seen.size() == 7);
        for (size_t i = 1; i < steps.size(); ++i) CHECK(steps[i].generator == 0);
    }
    SUBCASE("D=-79447: 100 classes, 95 steps by the norm-2 generator and 4 by norm-13") {
        ClassPresentation pres = optimal_presentation(-79447);
        auto steps = enumerate_torsor_steps(pres);
        REQUIRE(steps.size() == 100);
        int g0 = 0, g1 = 0;
        std::set<QuadraticForm> seen;
        for (auto& s : steps) {
            seen.insert(s.cls);
            if (s.generator == 0) ++g0;
            if (s.generator == 1) ++g1;
        }
        CHECK(seen.size() == 100);  // every class exactly once
        CHECK(g0 == 95);
        CHECK(g1 == 4);
    }
    SUBCASE("every class appears exactly once on random discriminants") {
        Rng rng(11);
        int done = 0;
        while (done < 10) {
            i64 D = -7 - static_cast<i64>(rng() % 30000);
            i64 r = ((D % 4) + 4) % 4;
            if (r != 0 && r != 1) continue;
            ClassPresentation pres = optimal_presentation(D);
            auto steps = enumerate_torsor_steps(pres);
            std::set<QuadraticForm> seen;
            for (auto& s : steps) seen.insert(s.cls);
            CHECK(seen.size() == pres.h);
            ++done;
        }
    }
}

TEST_CASE("lift_class (the map rho)") {
    SUBCASE("principal maps to principal") {
        for (u64 ell : {2ull, 3ull, 5ull, 7ull}) {
            i64 D = -151;
            QuadraticForm p = principal_form(static_cast<i64>(ell * ell) * D);
            CHECK(lift_class(p, ell) == reduce(principal_form(D)));
        }
    }
    SUBCASE("homomorphism on random classes") {
        Rng rng(13);
        i64 D = -151;
        u64 ell = 5;
        auto forms = enumerate_reduced_forms(ell * ell * D);
        for (int rep = 0; rep < 50; ++rep) {
            const QuadraticForm& f = forms[rng() % forms.size()];
            const QuadraticForm& g = forms[rng() % forms.size()];
            CHECK(lift_class(compose(f, g), ell) == compose(lift_class(f, ell), lift_class(g, ell)));
        }
    }
    SUBCASE("kernel of rho for D=-151, l=5 has size 4") {
        u64 ker = 0;
        QuadraticForm id = principal_form(-151);
        for (const auto& f : enumerate_reduced_forms(-3775)) {
            if (lift_class(f, 5) == id) ++ker;
        }
        CHECK(ker == 4);
        CHECK(ker == class_number(-3775) / class_number(-151));
    }
    SUBCASE("surjectivity by fiber counting") {
        std::map<QuadraticForm, int> fibers;
        for (const auto& f : enumerate_reduced_forms(-3775)) fibers[lift_class(f, 5)]++;
        CHECK(fibers.size() == class_number(-151));
        for (auto& [img, count] : fibers) CHECK(count == 4);
    }
    SUBCASE("norm-preserving on prime forms coprime to ell * D") {
        int done = 0;
        for (u64 q = 2; done < 20 && q < 600; q = next_prime(q)) {
            if (q == 5 || (-3775) % static_cast<i64>(q) == 0) continue;
            auto pf = prime_form(-3775, q);
            if (!pf) continue;
            QuadraticForm img = lift_class(*pf, 5);
            // the image class contains a form of leading coefficient q
            auto pfd = prime_form(-151, q);
            REQUIRE(pfd.has_value());
            bool matches = (img == reduce(*pfd)) || (img == conjugate(*pfd));
            CHECK(matches);
            ++done;
        }
    }
    SUBCASE("precondition: ell divides the conductor of the target") {
        // -9 * -151: lifting by 3 from disc 9*25*(-151) to 25*(-151) is fine, but
        // lifting from 25^2*(-151) by 5 targets conductor 5, which 5 divides.
        QuadraticForm p = principal_form(25 * 25 * -151);
        CHECK_THROWS_AS(lift_class(p, 5), std::invalid_argument);
    }
}
