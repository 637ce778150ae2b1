#include "volcano/volcano.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace volcano {

namespace {

int step_bound(u64 p, u64 ell) {
    return static_cast<int>(std::ceil(std::log2(2.0 * static_cast<double>(p)) /
                                      std::log2(static_cast<double>(ell)))) +
           2;
}

// Roots of Phi(j, Y) with multiplicity, as (value -> multiplicity).
std::map<FieldElement, int> out_edges(const ModularPolynomial& phi, const FieldCtx& ctx,
                                      const FieldElement& j, Rng& rng) {
    Poly f = instantiate(phi, ctx, j);
    std::map<FieldElement, int> out;
    for (auto& [r, m] : poly_roots(f, true, rng)) out[r] = m;
    return out;
}

// Continuation candidates from cur, with the edge back to prev divided out
// (Remark on removing known roots). Returns the quotient polynomial.
Poly continuation_poly(const ModularPolynomial& phi, const FieldCtx& ctx, const FieldElement& cur,
                       const FieldElement* prev) {
    Poly f = instantiate(phi, ctx, cur);
    if (prev) {
        Poly lin(ctx, {-*prev, FieldElement(ctx, 1)});
        while (true) {
            auto [q, r] = poly_divmod(f, lin);
            if (!r.is_zero()) break;
            f = q;
            if (f.degree() == 0) break;
        }
    }
    return f;
}

bool is_special_j(const FieldCtx& ctx, const FieldElement& j) {
    return j.is_zero() || j == from_signed(ctx, 1728);
}

// Classical congruences for the curves with extra automorphisms.
bool special_supersingular(u64 p, const FieldCtx& ctx, const FieldElement& j) {
    if (j.is_zero()) return p % 3 == 2;
    if (j == from_signed(ctx, 1728)) return p % 4 == 3;
    throw InternalError("special_supersingular: not a special j");
}

}  // namespace

int graph_out_degree(const ModularPolynomial& phi, const FieldCtx& ctx, const FieldElement& j,
                     Rng& rng) {
    int deg = 0;
    for (auto& [r, m] : out_edges(phi, ctx, j, rng)) deg += m;
    return deg;
}

PathToFloor find_floor(const ModularPolynomial& phi, const FieldCtx& ctx, const FieldElement& v0,
                       Rng& rng) {
    PathToFloor path;
    path.vertices.push_back(v0);
    if (graph_out_degree(phi, ctx, v0, rng) <= 2) return path;
    int bound = step_bound(ctx.p(), phi.ell());
    Poly f0 = instantiate(phi, ctx, v0);
    auto first = poly_random_root(f0, rng);
    if (!first) throw InternalError("find_floor: degree > 2 vertex with no rational neighbor");
    path.vertices.push_back(*first);
    for (int s = 1;; ++s) {
        if (s > bound)
            throw SuspectedSupersingularError("find_floor: step bound exceeded; input may be supersingular");
        const FieldElement& cur = path.vertices[s];
        const FieldElement& prev = path.vertices[s - 1];
        Poly q = continuation_poly(phi, ctx, cur, &prev);
        auto next = q.degree() >= 1 ? poly_random_root(q, rng) : std::nullopt;
        if (!next) return path;  // no continuation: cur is on the floor
        path.vertices.push_back(*next);
    }
}

PathToFloor shortest_path_to_floor(const ModularPolynomial& phi, const FieldCtx& ctx,
                                   const FieldElement& v0, Rng& rng) {
    PathToFloor out;
    out.vertices.push_back(v0);
    auto edges0 = out_edges(phi, ctx, v0, rng);
    int deg0 = 0;
    for (auto& [r, m] : edges0) deg0 += m;
    if (deg0 <= 2) return out;
    // Up to three distinct first steps, extended in lockstep.
    std::vector<FieldElement> starts;
    for (auto& [r, m] : edges0) starts.push_back(r);
    while (starts.size() > 3) starts.erase(starts.begin() + static_cast<long>(rng() % starts.size()));
    std::vector<std::vector<FieldElement>> paths;
    for (auto& s : starts) paths.push_back({v0, s});
    int bound = step_bound(ctx.p(), phi.ell());
    for (int round = 0; round <= bound; ++round) {
        for (auto& path : paths) {
            const FieldElement& cur = path.back();
            const FieldElement& prev = path[path.size() - 2];
            Poly q = continuation_poly(phi, ctx, cur, &prev);
            auto next = q.degree() >= 1 ? poly_random_root(q, rng) : std::nullopt;
            if (!next) {
                out.vertices = path;  // first path to bottom out is a shortest one
                return out;
            }
            path.push_back(*next);
        }
    }
    throw SuspectedSupersingularError(
        "shortest_path_to_floor: step bound exceeded; input may be supersingular");
}

int level_of(const ModularPolynomial& phi, const FieldCtx& ctx, const FieldElement& v0, int depth,
             Rng& rng) {
    int delta = static_cast<int>(shortest_path_to_floor(phi, ctx, v0, rng).delta());
    if (delta > depth) throw std::invalid_argument("level_of: distance to floor exceeds the stated depth");
    return depth - delta;
}

int depth_from_norm_equation(const NormEquationData& ne, i64 D0, u64 ell) {
    i64 delta = ne.t * ne.t - 4 * static_cast<i64>(ne.q);
    if (D0 >= 0 || delta % D0 != 0)
        throw std::invalid_argument("depth_from_norm_equation: D0 does not divide t^2 - 4q");
    i64 ratio = delta / D0;  // positive
    u64 root;
    if (!is_square_u64(static_cast<u64>(ratio), &root))
        throw std::invalid_argument("depth_from_norm_equation: non-square cofactor");
    return valuation(root, ell);
}

bool is_supersingular(const ModularPolynomial& phi2, const FieldCtx& ctx2, const FieldElement& j,
                      Rng& rng) {
    if (ctx2.degree() != 2) throw std::invalid_argument("is_supersingular: pass an F_{p^2} context");
    if (phi2.ell() != 2) throw std::invalid_argument("is_supersingular: the probe uses Phi_2");
    u64 p = ctx2.p();
    if (is_special_j(ctx2, j)) return special_supersingular(p, ctx2, j);
    int bound = static_cast<int>(std::ceil(std::log2(2.0 * static_cast<double>(p)))) + 2;
    auto edges0 = out_edges(phi2, ctx2, j, rng);
    int deg0 = 0;
    for (auto& [r, m] : edges0) deg0 += m;
    if (deg0 <= 2) return false;  // found the floor immediately: ordinary
    std::vector<std::vector<FieldElement>> paths;
    for (auto& [r, m] : edges0) paths.push_back({j, r});
    for (int round = 0; round <= bound; ++round) {
        for (auto& path : paths) {
            const FieldElement& cur = path.back();
            // A walk that reaches j = 0 or 1728 decides the question by the
            // classical congruence: supersingularity is isogeny-invariant.
            if (is_special_j(ctx2, cur)) return special_supersingular(p, ctx2, cur);
            const FieldElement& prev = path[path.size() - 2];
            Poly q = continuation_poly(phi2, ctx2, cur, &prev);
            auto next = q.degree() >= 1 ? poly_random_root(q, rng) : std::nullopt;
            if (!next) return false;  // floor found: ordinary
            path.push_back(*next);
        }
    }
    return true;  // no path found the floor within log_2(2p) steps
}

namespace {

// Extend path by one non-backtracking step, avoiding the `avoid` set; returns
// false when no continuation exists.
bool extend_random(const ModularPolynomial& phi, const FieldCtx& ctx, std::vector<FieldElement>& path,
                   const std::set<FieldElement>* avoid, Rng& rng) {
    const FieldElement& cur = path.back();
    const FieldElement* prev = path.size() >= 2 ? &path[path.size() - 2] : nullptr;
    Poly q = continuation_poly(phi, ctx, cur, prev);
    if (q.degree() < 1) return false;
    std::vector<FieldElement> cands;
    for (auto& [r, m] : poly_roots(q, false, rng)) {
        if (avoid && avoid->count(r)) continue;
        cands.push_back(r);
    }
    if (cands.empty()) return false;
    path.push_back(cands[rng() % cands.size()]);
    return true;
}

}  // namespace

std::vector<FieldElement> walk_surface_path(const ModularPolynomial& phi, const FieldCtx& ctx,
                                            const FieldElement& v0, size_t n, int depth, Rng& rng) {
    std::vector<FieldElement> path{v0};
    if (n == 0) return path;
    auto edges0 = out_edges(phi, ctx, v0, rng);
    if (edges0.empty()) throw std::invalid_argument("walk_surface_path: isolated vertex");
    if (edges0.size() == 1 && depth == 0) {
        // single neighbor: |V_0| <= 2, so only n = 1 is possible
        if (n > 1) throw std::invalid_argument("walk_surface_path: n >= |V_0|");
        path.push_back(edges0.begin()->first);
        return path;
    }
    if (depth == 0) {
        // The component is its own surface; plain non-backtracking walk.
        for (size_t i = 0; i < n; ++i) {
            if (!extend_random(phi, ctx, path, nullptr, rng))
                throw std::invalid_argument("walk_surface_path: walk left the cycle (bad depth?)");
            if (path.back() == v0) throw std::invalid_argument("walk_surface_path: n >= |V_0|");
        }
        return path;
    }
    // Probe bookkeeping: path = confirmed surface prefix v_0..v_i plus a probe
    // of length `depth` hanging below v_i.
    size_t i = 0;
    std::vector<std::set<FieldElement>> tried(n + 2);
    size_t guard = 0, guard_cap = (n + 2) * static_cast<size_t>(depth + 2) * (phi.ell() + 2) * 8;
    auto rebuild_probe = [&]() {
        // path currently holds v_0..v_i; extend by `depth` arbitrary steps
        // starting from an untried neighbor of v_i.
        std::set<FieldElement> avoid = tried[i];
        if (path.size() >= 2) avoid.insert(path[path.size() - 2]);
        Poly q0 = continuation_poly(phi, ctx, path.back(), nullptr);
        std::vector<FieldElement> cands;
        for (auto& [r, m] : poly_roots(q0, false, rng)) {
            if (!avoid.count(r)) cands.push_back(r);
        }
        if (cands.empty()) throw InternalError("walk_surface_path: neighbor candidates exhausted");
        FieldElement first = cands[rng() % cands.size()];
        tried[i].insert(first);
        path.push_back(first);
        for (int k = 1; k < depth; ++k) {
            if (!extend_random(phi, ctx, path, nullptr, rng))
                throw InternalError("walk_surface_path: probe stalled above the floor");
        }
    };
    for (int k = 0; k < depth; ++k) {
        if (!extend_random(phi, ctx, path, nullptr, rng))
            throw std::invalid_argument("walk_surface_path: v0 is not above a depth-" +
                                        std::to_string(depth) + " volcano");
    }
    if (path.size() >= 2) tried[0].insert(path[1]);
    while (true) {
        if (++guard > guard_cap) throw InternalError("walk_surface_path: retry budget exhausted");
        // probe endpoint on the floor <=> no continuation besides the way up
        const FieldElement& tip = path.back();
        const FieldElement& below_prev = path[path.size() - 2];
        Poly q = continuation_poly(phi, ctx, tip, &below_prev);
        auto next = q.degree() >= 1 ? poly_random_root(q, rng) : std::nullopt;
        if (!next) {
            // the walk left the surface at or before v_{i+1}: retry from v_i
            path.resize(i + 1);
            rebuild_probe();
            continue;
        }
        // v_{i+1} is certified on the surface; advance the front.
        path.push_back(*next);
        ++i;
        if (path[i] == v0) throw std::invalid_argument("walk_surface_path: n >= |V_0|");
        tried[i].clear();
        if (path.size() >= 2) tried[i].insert(path[i + 1]);
        if (i == n) {
            path.resize(n + 1);
            return path;
        }
    }
}

std::vector<FieldElement> walk_surface_gcd(const ModularPolynomial& phi_path,
                                           const ModularPolynomial& phi_rung, const FieldCtx& ctx,
                                           const std::vector<FieldElement>& prior_path,
                                           const FieldElement& v0_prime) {
    std::vector<FieldElement> out{v0_prime};
    for (size_t i = 0; i + 1 < prior_path.size(); ++i) {
        Poly f = poly_gcd(instantiate(phi_path, ctx, out[i]), instantiate(phi_rung, ctx, prior_path[i + 1]));
        if (f.degree() != 1)
            throw AmbiguityError("walk_surface_gcd: gcd degree " + std::to_string(f.degree()) +
                                 " at step " + std::to_string(i));
        out.push_back(-f[0] * f[1].inverse());
    }
    return out;
}

std::vector<FieldElement> surface_neighbors(const ModularPolynomial& phi, const FieldCtx& ctx,
                                            const FieldElement& j, int depth, Rng& rng) {
    auto edges = out_edges(phi, ctx, j, rng);
    std::vector<FieldElement> out;
    for (auto& [r, m] : edges) {
        if (depth == 0 || static_cast<int>(shortest_path_to_floor(phi, ctx, r, rng).delta()) == depth)
            out.push_back(r);
    }
    return out;
}

int VolcanoChart::level_of_vertex(const FieldElement& j) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), j,
                               [](const auto& a, const FieldElement& v) { return a.first < v; });
    if (it == vertices.end() || it->first != j)
        throw std::invalid_argument("level_of_vertex: not in the chart");
    return it->second;
}

size_t VolcanoChart::level_count(int level) const {
    size_t n = 0;
    for (auto& [j, l] : vertices) {
        if (l == level) ++n;
    }
    return n;
}

VolcanoChart map_volcano(const ModularPolynomial& phi, const FieldCtx& ctx, const FieldElement& v0,
                         Rng& rng, size_t vertex_cap) {
    std::map<FieldElement, int> delta;  // vertex -> distance to floor
    std::map<FieldElement, std::map<FieldElement, int>> adj;
    std::deque<FieldElement> queue{v0};
    delta[v0] = static_cast<int>(shortest_path_to_floor(phi, ctx, v0, rng).delta());
    while (!queue.empty()) {
        FieldElement cur = queue.front();
        queue.pop_front();
        auto edges = out_edges(phi, ctx, cur, rng);
        adj[cur] = edges;
        for (auto& [to, m] : edges) {
            if (!delta.count(to)) {
                if (delta.size() >= vertex_cap) throw ResourceError("map_volcano: vertex cap exceeded");
                delta[to] = static_cast<int>(shortest_path_to_floor(phi, ctx, to, rng).delta());
                queue.push_back(to);
            }
        }
    }
    VolcanoChart chart;
    chart.ell = phi.ell();
    chart.p = ctx.p();
    chart.field_degree = ctx.degree();
    int d = 0;
    for (auto& [v, dl] : delta) d = std::max(d, dl);
    chart.depth = d;
    for (auto& [v, dl] : delta) chart.vertices.emplace_back(v, d - dl);
    std::sort(chart.vertices.begin(), chart.vertices.end());
    for (auto& [from, edges] : adj) {
        for (auto& [to, m] : edges) chart.edges.push_back({from, to, m});
    }
    std::sort(chart.edges.begin(), chart.edges.end(), [](const auto& a, const auto& b) {
        if (a.from != b.from) return a.from < b.from;
        return a.to < b.to;
    });
    chart.surface_size = chart.level_count(0);
    return chart;
}

void check_volcano_shape(const VolcanoChart& chart) {
    std::map<FieldElement, std::map<FieldElement, int>> adj;
    for (auto& e : chart.edges) adj[e.from][e.to] = e.multiplicity;
    auto level = [&](const FieldElement& j) { return chart.level_of_vertex(j); };
    int surface_degree = -1;
    for (auto& [v, lv] : chart.vertices) {
        int to_above = 0, to_same = 0, to_below = 0, total = 0;
        for (auto& [to, m] : adj[v]) {
            int lt = level(to);
            total += m;
            if (lt == lv) to_same += m;
            if (lt == lv - 1) to_above += m;
            if (lt == lv + 1) to_below += m;
        }
        if (to_same + to_above + to_below != total)
            throw InternalError("volcano shape: edge skips a level");
        if (lv == 0) {
            if (to_above != 0) throw InternalError("volcano shape: surface vertex with an up edge");
            if (to_same > 2) throw InternalError("volcano shape: surface degree exceeds 2");
            if (surface_degree < 0) surface_degree = to_same;
            if (to_same != surface_degree)
                throw InternalError("volcano shape: surface subgraph is not regular");
        } else {
            if (to_same != 0) throw InternalError("volcano shape: horizontal edge below the surface");
            if (to_above != 1)
                throw InternalError("volcano shape: below-surface vertex without a unique up edge");
        }
        if (lv < chart.depth && total != static_cast<int>(chart.ell) + 1)
            throw InternalError("volcano shape: above-floor vertex of degree != ell + 1");
        if (!(total <= 2 || total == static_cast<int>(chart.ell) + 1))
            throw InternalError("volcano shape: degree dichotomy violated");
    }
}

void check_kohel(const VolcanoChart& chart, i64 D0, const NormEquationData& ne) {
    check_volcano_shape(chart);
    u64 ell = chart.ell;
    int kr = kronecker(D0, static_cast<i64>(ell));
    // (ii) surface degree
    std::map<FieldElement, int> surface_out;
    std::map<FieldElement, int> levels;
    for (auto& [v, l] : chart.vertices) levels[v] = l;
    for (auto& e : chart.edges) {
        if (levels.at(e.from) == 0 && levels.at(e.to) == 0) surface_out[e.from] += e.multiplicity;
    }
    for (auto& [v, l] : chart.vertices) {
        if (l == 0 && surface_out[v] != 1 + kr)
            throw InternalError("Kohel (ii): surface degree != 1 + kronecker(D0, ell)");
    }
    // (iii) surface size
    u64 expect_v0 = 1;
    if (kr >= 0) {
        auto pf = prime_form(D0, ell);
        if (!pf) throw InternalError("Kohel (iii): prime form should exist when kronecker >= 0");
        expect_v0 = order_of_class(*pf);
    }
    if (chart.surface_size != expect_v0)
        throw InternalError("Kohel (iii): |V_0| != order of the norm-ell class");
    // (iv) depth
    if (chart.depth != depth_from_norm_equation(ne, D0, ell))
        throw InternalError("Kohel (iv): depth formula violated");
    // (v) ell does not divide the conductor of the surface order
    if (OrderSpec::of(D0).f % ell == 0)
        throw InternalError("Kohel (v): ell divides the conductor of the surface order");
}

}  // namespace volcano
