#include "volcano/modpoly_crt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace volcano {

double ModPolyPrimePlan::total_bits() const {
    double b = 0;
    for (const auto& e : primes) b += std::log2(static_cast<double>(e.p));
    return b;
}

bool modpoly_disc_admissible(u64 ell, i64 D) {
    if (D >= 0 || ((D % 4) + 4) % 4 > 1) return false;
    if (OrderSpec::of(D).f != 1) return false;
    if (class_number(D) < ell + 2) return false;
    if (!optimal_presentation_capped(D, ell)) return false;
    if (!optimal_presentation_capped(static_cast<i64>(ell * ell) * D, ell)) return false;
    return true;
}

i64 select_modpoly_disc(u64 ell) {
    for (i64 aD = 3;; ++aD) {
        i64 D = -aD;
        i64 r = ((D % 4) + 4) % 4;
        if (r != 0 && r != 1) continue;
        if (aD > 100000) throw ResourceError("select_modpoly_disc: search cap reached");
        if (modpoly_disc_admissible(ell, D)) return D;
    }
}

namespace {

bool smooth_below(u64 n, u64 bound) {
    for (u64 q = 2; q < bound && q <= 13; q = next_prime(q)) {
        while (n % q == 0) n /= q;
    }
    return n == 1;
}

}  // namespace

ModPolyPrimePlan select_modpoly_primes(u64 ell, double min_bits, const std::set<u64>* exclude) {
    ModPolyPrimePlan plan;
    plan.ell = ell;
    plan.D = select_modpoly_disc(ell);
    i64 D = plan.D;
    double bits = 0;
    std::set<u64> seen;
    u64 limit = 1 << 12;
    const u64 hard_cap = u64(1) << 40;
    while (true) {
        for (u64 v = 1; static_cast<i64>(ell * ell * v * v) * (-D) <= static_cast<i64>(4 * limit); ++v) {
            if (v % ell == 0) continue;
            if (!smooth_below(v, ell)) continue;  // walk depths only at sub-ell generator norms
            u64 vvD = ell * ell * v * v * static_cast<u64>(-D);
            u64 t0 = (vvD % 2 == 0) ? 2 : 1;
            for (u64 t = t0;; t += 2) {
                u64 num = t * t + vvD;
                if (num > 4 * limit) break;
                if (num % 4 != 0) continue;
                u64 p = num / 4;
                if (p < 100 || p % ell != 1 || !is_prime_u64(p)) continue;
                if (static_cast<u64>(-D) % p == 0) continue;
                if (exclude && exclude->count(p)) continue;
                if (seen.count(p)) continue;
                seen.insert(p);
                plan.primes.push_back({p, static_cast<i64>(t), v});
            }
        }
        std::sort(plan.primes.begin(), plan.primes.end(),
                  [](const ModPolyPrimeEntry& a, const ModPolyPrimeEntry& b) { return a.p < b.p; });
        bits = 0;
        size_t keep = 0;
        for (; keep < plan.primes.size() && bits < min_bits; ++keep)
            bits += std::log2(static_cast<double>(plan.primes[keep].p));
        if (bits >= min_bits) {
            plan.primes.resize(keep);
            return plan;
        }
        if (limit >= hard_cap) throw ResourceError("select_modpoly_primes: search cap reached");
        limit *= 2;
        plan.primes.clear();
        seen.clear();
    }
}

namespace {

CurveModel curve_with_trace_from_j(const FieldCtx& ctx, const FieldElement& j, i64 t, Rng& rng) {
    CurveModel E = curve_from_j(ctx, j);
    i64 got = static_cast<i64>(ctx.p()) + 1 - static_cast<i64>(point_count(E, rng));
    if (got == t) return E;
    if (got == -t) return quadratic_twist(E);
    throw InternalError("curve_with_trace_from_j: j is not in the expected isogeny class");
}

}  // namespace

TwoLevelChart map_two_level_volcano(const ModPolyPrimeEntry& entry, i64 D, u64 ell,
                                    const PhiProvider& phis, Rng& rng) {
    FieldCtx ctx = FieldCtx::prime_field(entry.p);
    int kr = kronecker(D, static_cast<i64>(ell));
    // Fix the trace sign so that t = 2 mod ell, which puts the ell-torsion
    // kernel points of surface curves in F_p.
    i64 t = entry.t;
    i64 tm = ((t % static_cast<i64>(ell)) + static_cast<i64>(ell)) % static_cast<i64>(ell);
    if (tm != 2) t = -t;
    tm = ((t % static_cast<i64>(ell)) + static_cast<i64>(ell)) % static_cast<i64>(ell);
    if (tm != 2) throw std::invalid_argument("map_two_level_volcano: trace is not +-2 mod ell");
    CurveModel E = find_curve_with_trace(ctx, t, rng);
    // Position at the ell-surface without Phi_ell: a floor vertex has exactly
    // one rational ell-isogeny (the ascending one); take it.
    for (int hop = 0;; ++hop) {
        if (hop > 4) throw InternalError("map_two_level_volcano: ell-positioning runaway");
        auto kernels = rational_kernel_polys(E, ell, rng);
        if (kernels.size() == ell + 1) break;
        if (kernels.size() == 1) {
            E = velu_isogeny(E, {E, ell, kernels[0]}).target;
            continue;
        }
        throw InternalError("map_two_level_volcano: unexpected rational ell-isogeny count " +
                            std::to_string(kernels.size()));
    }
    // Position ordinary small primes: the vertex with End(E) of discriminant D.
    FieldElement j0 = climb_to_order(E, D, ell * entry.v, phis, rng, ell);
    ClassPresentation pres = *optimal_presentation_capped(D, ell);
    std::vector<FieldElement> S =
        enumerate_ell_torsor(ctx, j0, pres, ell * entry.v, phis, rng);
    std::set<u64> surface_set;
    for (const auto& j : S) surface_set.insert(j.c0());

    TwoLevelChart chart;
    chart.p = entry.p;
    chart.ell = ell;
    chart.D = D;
    for (const auto& j : S) chart.surface.push_back(j.c0());
    chart.horizontal.resize(S.size());
    chart.children.resize(S.size());

    // The descending step of the pipeline: a random rational ell-torsion
    // point; a horizontal landing is detected by membership in the surface
    // set and retried with a fresh point.
    CurveModel E0 = curve_with_trace_from_j(ctx, S[0], t, rng);
    u64 N = static_cast<u64>(static_cast<i64>(entry.p) + 1 - t);
    FieldElement anchor_child(ctx, 0);
    bool have_anchor = false;
    for (int attempt = 0; attempt < 64 && !have_anchor; ++attempt) {
        CurvePoint Q = random_ell_torsion_point(E0, N, ell, rng);
        Poly kp = kernel_poly_from_point(E0, Q, ell);
        FieldElement tgt = velu_isogeny(E0, {E0, ell, kp}).target.j_invariant();
        if (surface_set.count(tgt.c0())) continue;  // horizontal landing; try again
        anchor_child = tgt;
        have_anchor = true;
    }
    if (!have_anchor) throw InternalError("map_two_level_volcano: descending step kept landing horizontally");

    // Full neighbor lists per surface vertex via kernel enumeration.
    for (size_t i = 0; i < S.size(); ++i) {
        CurveModel Ei = curve_with_trace_from_j(ctx, S[i], t, rng);
        auto targets = rational_isogenous_j(Ei, ell, rng);
        if (targets.size() != ell + 1)
            throw InternalError("map_two_level_volcano: surface vertex of degree != ell + 1");
        for (const auto& tgt : targets) {
            if (surface_set.count(tgt.c0()))
                chart.horizontal[i].push_back(tgt.c0());
            else
                chart.children[i].push_back(tgt.c0());
        }
        if (static_cast<i64>(chart.horizontal[i].size()) != 1 + kr)
            throw InternalError("map_two_level_volcano: horizontal degree != 1 + (D|ell)");
        if (static_cast<i64>(chart.children[i].size()) != static_cast<i64>(ell) - kr)
            throw InternalError("map_two_level_volcano: child count != ell - (D|ell)");
    }

    // Floor torsor, enumerated from the anchor child with its own sub-ell
    // presentation.
    ClassPresentation pres2 = *optimal_presentation_capped(static_cast<i64>(ell * ell) * D, ell);
    std::vector<FieldElement> F =
        enumerate_ell_torsor(ctx, anchor_child, pres2, ell * entry.v, phis, rng);
    std::set<u64> floor_set;
    for (const auto& j : F) {
        chart.floor_js.push_back(j.c0());
        floor_set.insert(j.c0());
    }
    // Consistency: the children found from the surface are exactly Ell_O'.
    size_t nchild = 0;
    for (const auto& ch : chart.children) {
        for (u64 c : ch) {
            ++nchild;
            if (!floor_set.count(c))
                throw InternalError("map_two_level_volcano: child outside the floor torsor");
        }
    }
    if (nchild != F.size() ||
        static_cast<i64>(F.size()) != static_cast<i64>(pres.h) * (static_cast<i64>(ell) - kr))
        throw InternalError("map_two_level_volcano: floor size mismatch");
    return chart;
}

CoeffMatrix interpolate_phi_mod_p(const TwoLevelChart& chart, const FieldCtx& ctx) {
    u64 ell = chart.ell;
    size_t need = ell + 2;
    if (chart.surface.size() < need)
        throw std::invalid_argument("interpolate_phi_mod_p: fewer than ell + 2 surface vertices");
    // phi_i(Y) = prod over neighbors of the i-th surface vertex
    auto phi_at = [&](size_t i) {
        std::vector<FieldElement> roots;
        for (u64 v : chart.horizontal[i]) roots.emplace_back(ctx, v);
        for (u64 v : chart.children[i]) roots.emplace_back(ctx, v);
        if (roots.size() != ell + 1) throw InternalError("interpolate_phi_mod_p: bad neighbor count");
        return Poly::from_roots(ctx, roots);
    };
    std::vector<FieldElement> xs;
    std::vector<Poly> phis;
    for (size_t i = 0; i < chart.surface.size(); ++i) {
        xs.emplace_back(ctx, chart.surface[i]);
        phis.push_back(phi_at(i));
    }
    std::vector<FieldElement> nodes(xs.begin(), xs.begin() + need);
    CoeffMatrix c(ell + 2, std::vector<u64>(ell + 2, 0));
    for (u64 m = 0; m <= ell + 1; ++m) {
        std::vector<FieldElement> ys;
        for (size_t i = 0; i < need; ++i) ys.push_back(phis[i].coeff(m));
        Poly psi = poly_interpolate(ctx, nodes, ys);
        if (psi.degree() > static_cast<int>(ell) + 1)
            throw InternalError("interpolate_phi_mod_p: coefficient degree exceeds ell + 1");
        for (u64 i = 0; i <= ell + 1; ++i) c[i][m] = psi.coeff(i).c0();
    }
    // symmetry and held-out vertex checks
    for (u64 i = 0; i <= ell + 1; ++i) {
        for (u64 m = 0; m < i; ++m) {
            if (c[i][m] != c[m][i]) throw InternalError("interpolate_phi_mod_p: asymmetric result");
        }
    }
    for (size_t r = need; r < chart.surface.size(); ++r) {
        // evaluate the matrix at X = surface[r] and compare with phi_r
        std::vector<FieldElement> xp(ell + 2, FieldElement(ctx, 1));
        for (u64 i = 1; i <= ell + 1; ++i) xp[i] = xp[i - 1] * xs[r];
        for (u64 m = 0; m <= ell + 1; ++m) {
            FieldElement acc(ctx, 0);
            for (u64 i = 0; i <= ell + 1; ++i) acc += FieldElement(ctx, c[i][m]) * xp[i];
            if (acc != phis[r].coeff(m))
                throw InternalError("interpolate_phi_mod_p: held-out vertex check failed");
        }
    }
    return c;
}

ModularPolynomial modpoly_crt_lift(u64 ell, const std::vector<u64>& primes,
                                   const std::vector<CoeffMatrix>& residues) {
    if (primes.empty() || primes.size() != residues.size())
        throw std::invalid_argument("modpoly_crt_lift: size mismatch");
    ModularPolynomial phi(ell);
    mpz_class M = 1;
    for (u64 p : primes) M *= p;
    for (u32 i = 0; i <= ell + 1; ++i) {
        for (u32 j = 0; j <= i; ++j) {
            mpz_class acc = 0, Mi = 1;
            for (size_t k = 0; k < primes.size(); ++k) {
                u64 p = primes[k];
                u64 r = residues[k][i][j] % p;
                if (k == 0) {
                    acc = r;
                } else {
                    u64 mp = mpz_fdiv_ui(Mi.get_mpz_t(), p);
                    u64 ai = mpz_fdiv_ui(acc.get_mpz_t(), p);
                    acc += Mi * mul_mod(sub_mod(r, ai, p), inv_mod(mp, p), p);
                }
                Mi *= p;
            }
            mpz_class rr = acc % M;
            if (rr < 0) rr += M;
            if (2 * rr > M) rr -= M;
            phi.set(i, j, rr);
        }
    }
    return phi;
}

namespace {

double modpoly_height_bits(u64 ell) {
    double l = static_cast<double>(ell);
    return (6.0 * l * std::log(l) + 18.0 * l) / std::log(2.0) + 64.0;
}

// Pulls per-prime residues until two consecutive CRT lifts agree (and the
// modulus exceeds min_bits).
ModularPolynomial lift_until_agreement(
    u64 ell, double min_bits,
    const std::function<std::optional<std::pair<u64, CoeffMatrix>>()>& next_residue) {
    std::vector<u64> primes;
    std::vector<CoeffMatrix> residues;
    double bits = 0;
    std::optional<ModularPolynomial> prev;
    while (true) {
        auto r = next_residue();
        if (!r) throw ResourceError("modpoly lift: residue source exhausted before agreement");
        primes.push_back(r->first);
        residues.push_back(std::move(r->second));
        bits += std::log2(static_cast<double>(r->first));
        if (bits < min_bits) continue;
        ModularPolynomial lift = modpoly_crt_lift(ell, primes, residues);
        if (prev && lift == *prev) return lift;
        prev = std::move(lift);
    }
}

}  // namespace

ModularPolynomial velu_bootstrap_modpoly(u64 ell, const ModPolyOptions& opts) {
    if (!is_prime_u64(ell) || ell > 13)
        throw std::invalid_argument("velu_bootstrap_modpoly: ell must be a prime <= 13");
    double min_bits = opts.min_bits > 0 ? opts.min_bits : modpoly_height_bits(ell);
    u64 p_cursor = 997;
    int skipped = 0;
    auto next_residue = [&]() -> std::optional<std::pair<u64, CoeffMatrix>> {
        while (true) {
            p_cursor = next_prime(p_cursor);
            u64 p = p_cursor;
            if (p == ell || (opts.exclude_primes && opts.exclude_primes->count(p))) continue;
            if (++skipped > 4000) throw ResourceError("velu_bootstrap_modpoly: prime stream exhausted");
            FieldCtx ctx = FieldCtx::prime_field(p);
            Rng rng(opts.seed * 0x9e3779b97f4a7c15ull + p);
            // Traces whose curves sit above the floor of their ell-volcano:
            // ell divides v in the norm equation.
            std::set<u64> good_traces;
            for (u64 t = 1; t * t < 4 * p; ++t) {
                NormEquationData ne;
                try {
                    ne = solve_norm_equation(p, static_cast<i64>(t));
                } catch (const std::invalid_argument&) {
                    continue;
                }
                if (ne.v % ell == 0) good_traces.insert(t);
            }
            if (good_traces.empty()) continue;
            FieldElement c1728 = from_signed(ctx, 1728);
            std::vector<FieldElement> xs;
            std::vector<Poly> phi_polys;
            for (u64 jv = 1; jv < p && xs.size() < ell + 4; ++jv) {
                FieldElement j(ctx, jv);
                if (j == c1728) continue;
                CurveModel E = curve_from_j(ctx, j);
                u64 N = point_count_bsgs(E, rng);
                i64 t = static_cast<i64>(p) + 1 - static_cast<i64>(N);
                if (!good_traces.count(static_cast<u64>(t < 0 ? -t : t))) continue;
                auto targets = rational_isogenous_j(E, ell, rng);
                if (targets.size() != ell + 1) continue;  // on the floor after all
                std::vector<FieldElement> roots(targets.begin(), targets.end());
                xs.push_back(j);
                phi_polys.push_back(Poly::from_roots(ctx, roots));
            }
            if (xs.size() < ell + 2) continue;  // not enough usable vertices here
            size_t need = ell + 2;
            std::vector<FieldElement> nodes(xs.begin(), xs.begin() + need);
            CoeffMatrix c(ell + 2, std::vector<u64>(ell + 2, 0));
            for (u64 m = 0; m <= ell + 1; ++m) {
                std::vector<FieldElement> ys;
                for (size_t i = 0; i < need; ++i) ys.push_back(phi_polys[i].coeff(m));
                Poly psi = poly_interpolate(ctx, nodes, ys);
                for (u64 i = 0; i <= ell + 1; ++i) c[i][m] = psi.coeff(i).c0();
            }
            bool ok = true;
            for (u64 i = 0; i <= ell + 1 && ok; ++i) {
                for (u64 m = 0; m < i && ok; ++m) ok = (c[i][m] == c[m][i]);
            }
            // verify the held-out vertices
            for (size_t r = need; r < xs.size() && ok; ++r) {
                std::vector<FieldElement> xp(ell + 2, FieldElement(ctx, 1));
                for (u64 i = 1; i <= ell + 1; ++i) xp[i] = xp[i - 1] * xs[r];
                for (u64 m = 0; m <= ell + 1 && ok; ++m) {
                    FieldElement acc(ctx, 0);
                    for (u64 i = 0; i <= ell + 1; ++i) acc += FieldElement(ctx, c[i][m]) * xp[i];
                    ok = (acc == phi_polys[r].coeff(m));
                }
            }
            if (!ok) throw InternalError("velu_bootstrap_modpoly: inconsistent interpolation at p=" +
                                         std::to_string(p));
            return std::make_pair(p, std::move(c));
        }
    };
    return lift_until_agreement(ell, min_bits, next_residue);
}

ModularPolynomial compute_modular_polynomial(u64 ell, const ModPolyOptions& opts) {
    if (!is_prime_u64(ell)) throw std::invalid_argument("compute_modular_polynomial: ell must be prime");
    if (ell == 2) return velu_bootstrap_modpoly(2, opts);
    double min_bits = opts.min_bits > 0 ? opts.min_bits : modpoly_height_bits(ell);
    ModPolyPrimePlan plan = select_modpoly_primes(ell, min_bits + 64, opts.exclude_primes);
    // Local provider for the sub-ell walks: recursive computation, memoized.
    auto sub_opts = opts;
    sub_opts.min_bits = 0;
    sub_opts.exclude_primes = nullptr;
    std::map<u64, ModularPolynomial> memo;
    PhiProvider phis = [&](u64 q) -> ModularPolynomial {
        auto it = memo.find(q);
        if (it == memo.end()) it = memo.emplace(q, compute_modular_polynomial(q, sub_opts)).first;
        return it->second;
    };
    {
        // Everything the per-prime workers will ask for, computed up front so
        // the memo is read-only afterwards.
        std::set<u64> qs;
        for (const auto& g : optimal_presentation_capped(plan.D, ell)->generators) qs.insert(g.norm);
        for (const auto& g :
             optimal_presentation_capped(static_cast<i64>(ell * ell) * plan.D, ell)->generators)
            qs.insert(g.norm);
        for (const auto& e : plan.primes) {
            for (auto [q, k] : factorize(e.v)) qs.insert(q);
        }
        for (u64 q : qs) phis(q);
    }
    // Residues for the initial plan in parallel, then sequential extension.
    std::vector<std::optional<CoeffMatrix>> computed(plan.primes.size());
    {
        std::atomic<size_t> next{0};
        auto worker = [&]() {
            while (true) {
                size_t k = next.fetch_add(1);
                if (k >= plan.primes.size()) break;
                Rng rng(opts.seed * 0x9e3779b97f4a7c15ull + plan.primes[k].p);
                TwoLevelChart chart = map_two_level_volcano(plan.primes[k], plan.D, ell, phis, rng);
                FieldCtx ctx = FieldCtx::prime_field(plan.primes[k].p);
                computed[k] = interpolate_phi_mod_p(chart, ctx);
            }
        };
        int nt = std::max(1, opts.threads);
        std::vector<std::thread> pool;
        for (int i = 1; i < nt; ++i) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
    }
    size_t cursor = 0;
    std::set<u64> used;
    auto next_residue = [&]() -> std::optional<std::pair<u64, CoeffMatrix>> {
        if (cursor < plan.primes.size()) {
            size_t k = cursor++;
            used.insert(plan.primes[k].p);
            return std::make_pair(plan.primes[k].p, std::move(*computed[k]));
        }
        // extend the plan
        std::set<u64> excl = used;
        if (opts.exclude_primes) excl.insert(opts.exclude_primes->begin(), opts.exclude_primes->end());
        ModPolyPrimePlan more = select_modpoly_primes(ell, 16, &excl);
        if (more.primes.empty()) return std::nullopt;
        const auto& e = more.primes.front();
        used.insert(e.p);
        Rng rng(opts.seed * 0x9e3779b97f4a7c15ull + e.p);
        TwoLevelChart chart = map_two_level_volcano(e, plan.D, ell, phis, rng);
        FieldCtx ctx = FieldCtx::prime_field(e.p);
        return std::make_pair(e.p, interpolate_phi_mod_p(chart, ctx));
    };
    return lift_until_agreement(ell, min_bits, next_residue);
}

PhiCache make_phi_cache(const std::string& dir, ModPolyOptions opts) {
    return PhiCache(dir, [opts](u64 ell) { return compute_modular_polynomial(ell, opts); });
}

}  // namespace volcano
