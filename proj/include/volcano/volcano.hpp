#ifndef VOLCANO_VOLCANO_HPP
#define VOLCANO_VOLCANO_HPP

#include <set>

#include "volcano/classgroup.hpp"
#include "volcano/curve.hpp"
#include "volcano/modpoly.hpp"

namespace volcano {

/// Raised by the floor-finding walks when the step bound is exceeded, i.e.
/// the input is probably supersingular (defer to is_supersingular).
struct SuspectedSupersingularError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised by walk_surface_gcd when a gcd has degree != 1.
struct AmbiguityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PathToFloor {
    std::vector<FieldElement> vertices;  // v_0 .. v_s
    size_t delta() const { return vertices.size() - 1; }
};

/// Out-degree of j in G_ell: number of roots of Phi_ell(j, Y) in the field,
/// counted with multiplicity.
int graph_out_degree(const ModularPolynomial& phi, const FieldCtx& ctx, const FieldElement& j, Rng& rng);

/// Random non-backtracking descent to the floor (expected length delta + O(1)).
PathToFloor find_floor(const ModularPolynomial& phi, const FieldCtx& ctx, const FieldElement& v0,
                       Rng& rng);

/// Exact shortest path: three non-backtracking probes extended in lockstep.
PathToFloor shortest_path_to_floor(const ModularPolynomial& phi, const FieldCtx& ctx,
                                   const FieldElement& v0, Rng& rng);

/// Level index of v0 (0 = surface) in a component of known depth.
int level_of(const ModularPolynomial& phi, const FieldCtx& ctx, const FieldElement& v0, int depth,
             Rng& rng);

/// nu_ell((t^2 - 4q) / D0) / 2 for the surface discriminant D0.
int depth_from_norm_equation(const NormEquationData& ne, i64 D0, u64 ell);

/// Supersingularity test over F_{p^2} via the bounded shortest-path probe in
/// G_2. j-invariants outside F_{p^2} are ordinary by definition; the caller
/// passes a quadratic field context.
bool is_supersingular(const ModularPolynomial& phi2, const FieldCtx& ctx2, const FieldElement& j,
                      Rng& rng);

/// Path of n steps along the surface V_0, maintaining a depth-d probe below
/// the walk front. v0 must lie on the surface and n < |V_0|.
std::vector<FieldElement> walk_surface_path(const ModularPolynomial& phi, const FieldCtx& ctx,
                                            const FieldElement& v0, size_t n, int depth, Rng& rng);

/// Parallel transport of a surface path through an ell'-isogeny: each new
/// vertex is the unique root of gcd(Phi_ell(v'_i, Y), Phi_ell'(v_{i+1}, Y)).
std::vector<FieldElement> walk_surface_gcd(const ModularPolynomial& phi_path,
                                           const ModularPolynomial& phi_rung, const FieldCtx& ctx,
                                           const std::vector<FieldElement>& prior_path,
                                           const FieldElement& v0_prime);

/// Surface-level neighbors of j (distinct values) in its ell-volcano of the
/// given depth.
std::vector<FieldElement> surface_neighbors(const ModularPolynomial& phi, const FieldCtx& ctx,
                                            const FieldElement& j, int depth, Rng& rng);

struct VolcanoChart {
    u64 ell = 0;
    u64 p = 0;
    int field_degree = 1;
    int depth = 0;
    size_t surface_size = 0;
    std::vector<std::pair<FieldElement, int>> vertices;  // (j, level), sorted by j
    struct Edge {
        FieldElement from, to;
        int multiplicity;
    };
    std::vector<Edge> edges;  // sorted by (from, to)

    int level_of_vertex(const FieldElement& j) const;
    size_t level_count(int level) const;
};

/// BFS over the whole component with per-vertex level assignment.
VolcanoChart map_volcano(const ModularPolynomial& phi, const FieldCtx& ctx, const FieldElement& v0,
                         Rng& rng, size_t vertex_cap = 1000000);

/// Structural invariants of Definition 1 (+ the floor/degree dichotomy).
/// Only meaningful for components away from j = 0, 1728.
void check_volcano_shape(const VolcanoChart& chart);

/// Theorem (ii)-(v) checks against the class group of the surface order.
void check_kohel(const VolcanoChart& chart, i64 D0, const NormEquationData& ne);

}  // namespace volcano

#endif
