#include "volcano/hilbert.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace volcano {

double CrtPrimePlan::total_bits() const {
    double b = 0;
    for (const auto& e : primes) b += std::log2(static_cast<double>(e.p));
    return b;
}

namespace {

bool is_13_smooth(u64 n) {
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
        while (n % q == 0) n /= q;
    }
    return n == 1;
}

}  // namespace

CrtPrimePlan select_crt_primes(i64 D, double min_bits, const std::set<u64>* exclude) {
    if (D >= -3) throw std::invalid_argument("select_crt_primes: D must be a negative discriminant");
    CrtPrimePlan plan;
    plan.D = D;
    double bits = 0;
    std::set<u64> seen;
    // Sweep (t, v) grids in slices of increasing p.
    u64 limit = 1 << 12;
    const u64 hard_cap = u64(1) << 40;
    while (bits < min_bits) {
        for (u64 v = 1; static_cast<i64>(v * v) * (-D) <= static_cast<i64>(4 * limit); ++v) {
            if (!is_13_smooth(v)) continue;
            u64 vvD = v * v * static_cast<u64>(-D);
            // parity: t^2 = 4p + v^2 D requires t = v D (mod 2)
            u64 t0 = (vvD % 2 == 0) ? 2 : 1;
            for (u64 t = t0;; t += 2) {
                u64 num = t * t + vvD;
                if (num > 4 * limit) break;
                if (num % 4 != 0) continue;
                u64 p = num / 4;
                if (p < 100 || !is_prime_u64(p)) continue;
                if (static_cast<u64>(-D) % p == 0) continue;
                if (exclude && exclude->count(p)) continue;
                if (seen.count(p)) continue;
                seen.insert(p);
                plan.primes.push_back({p, static_cast<i64>(t), v});
            }
        }
        std::sort(plan.primes.begin(), plan.primes.end(),
                  [](const CrtPrimeEntry& a, const CrtPrimeEntry& b) { return a.p < b.p; });
        bits = 0;
        size_t keep = 0;
        for (; keep < plan.primes.size() && bits < min_bits; ++keep)
            bits += std::log2(static_cast<double>(plan.primes[keep].p));
        if (bits >= min_bits) {
            plan.primes.resize(keep);
            return plan;
        }
        if (limit >= hard_cap) throw ResourceError("select_crt_primes: search cap reached");
        limit *= 2;
        plan.primes.clear();
        seen.clear();
    }
    return plan;
}

CurveModel find_curve_with_trace(const FieldCtx& ctx, i64 t, Rng& rng) {
    u64 p = ctx.p();
    if (static_cast<u64>(t < 0 ? -t : t) > 2 * isqrt_u64(p))
        throw std::invalid_argument("find_curve_with_trace: trace outside the Hasse interval");
    FieldElement c1728 = from_signed(ctx, 1728);
    std::uniform_int_distribution<u64> d(0, p - 1);
    for (int attempt = 0; attempt < (1 << 22); ++attempt) {
        FieldElement a(ctx, d(rng)), b(ctx, d(rng));
        try {
            CurveModel E(ctx, a, b);
            if (E.j_invariant().is_zero() || E.j_invariant() == c1728) continue;
            i64 got = static_cast<i64>(p) + 1 - static_cast<i64>(point_count(E, rng));
            if (got == t) return E;
            if (got == -t) return quadratic_twist(E);
        } catch (const std::invalid_argument&) {
        }
    }
    throw ResourceError("find_curve_with_trace: retry cap exceeded");
}

FieldElement climb_to_order(const CurveModel& E, i64 D, u64 v, const PhiProvider& phis, Rng& rng,
                            u64 skip_prime) {
    const FieldCtx& ctx = E.ctx();
    u64 f_D = OrderSpec::of(D).f;
    u64 w = v * f_D;  // conductor of Z[pi]
    FieldElement j = E.j_invariant();
    for (auto [q, e] : factorize(w)) {
        if (q == skip_prime) continue;
        int target_delta = valuation(v, q);
        ModularPolynomial phi = phis(q);
        PathToFloor sp = shortest_path_to_floor(phi, ctx, j, rng);
        int delta = static_cast<int>(sp.delta());
        if (delta > static_cast<int>(e))
            throw InternalError("climb_to_order: distance exceeds the q-volcano depth");
        if (delta > target_delta) {
            // descend along the shortest path itself
            j = sp.vertices[delta - target_delta];
        } else if (delta < target_delta) {
            for (int k = delta; k < target_delta; ++k) {
                // ascend: the unique neighbor strictly farther from the floor
                bool moved = false;
                Poly inst = instantiate(phi, ctx, j);
                for (const auto& r : poly_distinct_roots(inst, rng)) {
                    if (static_cast<int>(shortest_path_to_floor(phi, ctx, r, rng).delta()) == k + 1) {
                        j = r;
                        moved = true;
                        break;
                    }
                }
                if (!moved) throw InternalError("climb_to_order: no ascending neighbor found");
            }
        }
    }
    return j;
}

namespace {

// One visited-avoiding step on the ell_i-surface (generator switch).
FieldElement torsor_switch_step(const ModularPolynomial& phi, const FieldCtx& ctx,
                                const FieldElement& cur, int depth,
                                const std::set<FieldElement>& visited, Rng& rng) {
    for (const auto& cand : surface_neighbors(phi, ctx, cur, depth, rng)) {
        if (!visited.count(cand)) return cand;
    }
    throw InternalError("torsor walk: no unvisited surface neighbor at a generator switch");
}

}  // namespace

std::vector<FieldElement> enumerate_ell_torsor(const FieldCtx& ctx, const FieldElement& j0,
                                               const ClassPresentation& pres, u64 v,
                                               const PhiProvider& phis, Rng& rng, bool use_gcd_walks) {
    std::vector<FieldElement> out{j0};
    if (pres.h == 1) return out;
    std::vector<ModularPolynomial> gen_phi;
    std::vector<int> gen_depth;
    for (const auto& g : pres.generators) {
        gen_phi.push_back(phis(g.norm));
        gen_depth.push_back(valuation(v, g.norm));
    }
    std::set<FieldElement> visited{j0};
    auto flush_row = [&](const std::vector<FieldElement>& r) {
        for (size_t k = 1; k < r.size(); ++k) {
            out.push_back(r[k]);
            if (!visited.insert(r[k]).second)
                throw InternalError("torsor enumeration: repeated j-invariant before step h");
        }
    };
    // The step plan is rows of r1 - 1 alpha_1 steps separated by single
    // generator switches (the odometer resets the low counter on a switch).
    std::vector<int> steps;
    TorsorStepper stepper(pres);
    for (int g = stepper.next(); g != -1; g = stepper.next()) steps.push_back(g);
    const u64 r1 = pres.generators[0].rel_order;
    std::vector<FieldElement> row = walk_surface_path(gen_phi[0], ctx, j0, r1 - 1, gen_depth[0], rng);
    flush_row(row);
    size_t idx = r1 - 1;
    while (idx < steps.size()) {
        int g = steps[idx++];
        if (g == 0) throw InternalError("torsor enumeration: step plan out of sync");
        FieldElement pivot = torsor_switch_step(gen_phi[g], ctx, row.back(), gen_depth[g], visited, rng);
        // The new row is the alpha_g translate of the previous one, walked
        // last-to-first, so it can be parallel-transported with gcds.
        std::vector<FieldElement> new_row;
        if (use_gcd_walks && r1 >= 2) {
            try {
                std::vector<FieldElement> prev_rev(row.rbegin(), row.rend());
                new_row = walk_surface_gcd(gen_phi[0], gen_phi[g], ctx, prev_rev, pivot);
            } catch (const AmbiguityError&) {
                new_row.clear();
            }
        }
        if (new_row.empty())
            new_row = walk_surface_path(gen_phi[0], ctx, pivot, r1 - 1, gen_depth[0], rng);
        flush_row(new_row);
        for (u64 k = 1; k < r1; ++k, ++idx) {
            if (idx >= steps.size() || steps[idx] != 0)
                throw InternalError("torsor enumeration: step plan out of sync");
        }
        row = std::move(new_row);
    }
    if (out.size() != pres.h)
        throw InternalError("torsor enumeration: enumerated " + std::to_string(out.size()) + " of " +
                            std::to_string(pres.h) + " classes");
    return out;
}

Poly hilbert_mod_p(i64 D, const CrtPrimeEntry& entry, const PhiProvider& phis, Rng& rng) {
    FieldCtx ctx = FieldCtx::prime_field(entry.p);
    if (D == -3) return Poly::identity_x(ctx);                                    // X
    if (D == -4) return Poly(ctx, {from_signed(ctx, -1728), FieldElement(ctx, 1)});  // X - 1728
    // sanity: the plan entry really solves the norm equation for D
    if (static_cast<i64>(4 * entry.p) != entry.t * entry.t - static_cast<i64>(entry.v * entry.v) * D)
        throw std::invalid_argument("hilbert_mod_p: plan entry does not match D");
    CurveModel E = find_curve_with_trace(ctx, entry.t, rng);
    FieldElement j0 = climb_to_order(E, D, entry.v, phis, rng);
    ClassPresentation pres = optimal_presentation(D);
    std::vector<FieldElement> tor = enumerate_ell_torsor(ctx, j0, pres, entry.v, phis, rng);
    Poly H = Poly::constant(ctx, FieldElement(ctx, 1));
    for (const auto& j : tor) H = H * Poly(ctx, {-j, FieldElement(ctx, 1)});
    return H;
}

HilbertResult crt_lift(i64 D, const std::vector<u64>& primes,
                       const std::vector<std::vector<u64>>& residues) {
    if (primes.size() != residues.size() || primes.empty())
        throw std::invalid_argument("crt_lift: size mismatch");
    size_t ncoeff = residues[0].size();
    for (const auto& r : residues) {
        if (r.size() != ncoeff) throw std::invalid_argument("crt_lift: inconsistent degrees");
    }
    HilbertResult out;
    out.D = D;
    out.coeffs.assign(ncoeff, 0);
    mpz_class M = 1;
    std::vector<mpz_class> acc(ncoeff, 0);
    for (size_t k = 0; k < primes.size(); ++k) {
        u64 p = primes[k];
        if (M == 1) {
            for (size_t i = 0; i < ncoeff; ++i) acc[i] = residues[k][i];
        } else {
            u64 mp = mpz_fdiv_ui(M.get_mpz_t(), p);
            u64 minv = inv_mod(mp, p);
            for (size_t i = 0; i < ncoeff; ++i) {
                u64 ai = mpz_fdiv_ui(acc[i].get_mpz_t(), p);
                u64 delta = mul_mod(sub_mod(residues[k][i] % p, ai, p), minv, p);
                acc[i] += M * delta;
            }
        }
        M *= p;
    }
    // symmetric range (-M/2, M/2]
    for (size_t i = 0; i < ncoeff; ++i) {
        mpz_class r = acc[i] % M;
        if (r < 0) r += M;
        if (2 * r > M) r -= M;
        out.coeffs[i] = r;
    }
    return out;
}

std::vector<mpz_class> reduce_coeffs_mod(const HilbertResult& h, const mpz_class& m) {
    std::vector<mpz_class> out;
    out.reserve(h.coeffs.size());
    for (const auto& c : h.coeffs) {
        mpz_class r = c % m;
        if (r < 0) r += m;
        out.push_back(r);
    }
    return out;
}

namespace {

double hilbert_height_bits(i64 D) {
    double sum = 0;
    for (const auto& f : enumerate_reduced_forms(D)) sum += 1.0 / static_cast<double>(f.a);
    double pi = 3.14159265358979323846;
    return pi * std::sqrt(static_cast<double>(-D)) * sum / std::log(2.0) +
           16.0 * static_cast<double>(class_number(D)) + 64.0;
}

}  // namespace

HilbertResult hilbert_class_polynomial(i64 D, const PhiProvider& phis, const HilbertOptions& opts) {
    if (D == -3 || D == -4) {
        HilbertResult r;
        r.D = D;
        if (D == -3)
            r.coeffs = {0, 1};
        else
            r.coeffs = {-1728, 1};
        return r;
    }
    double bits = opts.min_bits > 0 ? opts.min_bits : hilbert_height_bits(D);
    CrtPrimePlan plan = select_crt_primes(D, bits, opts.exclude_primes);
    auto prewarm = [&](const CrtPrimePlan& pl) {
        // touch every modular polynomial the workers will need, so that a
        // non-thread-safe provider is exercised single-threaded first
        std::set<u64> qs;
        for (const auto& g : optimal_presentation(D).generators) qs.insert(g.norm);
        u64 f_D = OrderSpec::of(D).f;
        for (const auto& e : pl.primes) {
            for (auto [q, k] : factorize(e.v * f_D)) qs.insert(q);
        }
        for (u64 q : qs) phis(q);
    };
    if (opts.threads > 1) prewarm(plan);
    std::vector<u64> primes;
    std::vector<std::vector<u64>> residues;
    auto compute_batch = [&](size_t from) {
        size_t n = plan.primes.size();
        std::atomic<size_t> next{from};
        residues.resize(n);
        auto worker = [&](int wid) {
            (void)wid;
            while (true) {
                size_t k = next.fetch_add(1);
                if (k >= n) break;
                Rng rng(opts.seed * 0x9e3779b97f4a7c15ull + plan.primes[k].p);
                Poly H = hilbert_mod_p(D, plan.primes[k], phis, rng);
                std::vector<u64> row;
                for (int i = 0; i <= H.degree(); ++i) row.push_back(H[i].c0());
                residues[k] = std::move(row);
            }
        };
        int nt = std::max(1, opts.threads);
        std::vector<std::thread> pool;
        for (int i = 1; i < nt; ++i) pool.emplace_back(worker, i);
        worker(0);
        for (auto& th : pool) th.join();
        primes.clear();
        for (const auto& e : plan.primes) primes.push_back(e.p);
    };
    compute_batch(0);
    HilbertResult lift = crt_lift(D, primes, residues);
    for (int round = 0; round < 8; ++round) {
        size_t old_count = plan.primes.size();
        std::set<u64> excl(primes.begin(), primes.end());
        if (opts.exclude_primes) excl.insert(opts.exclude_primes->begin(), opts.exclude_primes->end());
        CrtPrimePlan more = select_crt_primes(D, 48.0, &excl);
        for (const auto& e : more.primes) plan.primes.push_back(e);
        if (opts.threads > 1) prewarm(more);
        compute_batch(old_count);
        HilbertResult lift2 = crt_lift(D, primes, residues);
        if (lift2.coeffs == lift.coeffs) return lift2;
        lift = std::move(lift2);
    }
    throw ResourceError("hilbert_class_polynomial: lifts failed to stabilize");
}

}  // namespace volcano
