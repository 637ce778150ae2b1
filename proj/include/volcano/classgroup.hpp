#ifndef VOLCANO_CLASSGROUP_HPP
#define VOLCANO_CLASSGROUP_HPP

#include <map>
#include <optional>
#include <vector>

#include "volcano/numutil.hpp"

namespace volcano {

/// Primitive integral binary quadratic form a x^2 + b x y + c y^2 of negative
/// discriminant, a > 0.
struct QuadraticForm {
    i64 a = 1, b = 0, c = 0;
    i64 disc() const { return b * b - 4 * a * c; }
    bool operator==(const QuadraticForm& o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator!=(const QuadraticForm& o) const { return !(*this == o); }
    bool operator<(const QuadraticForm& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return c < o.c;
    }
};

bool is_reduced(const QuadraticForm& f);

/// Unique reduced representative of the class (Gauss reduction).
QuadraticForm reduce(QuadraticForm f);

QuadraticForm principal_form(i64 D);
QuadraticForm conjugate(const QuadraticForm& f);

/// Composition of classes (united-forms construction); result is reduced.
QuadraticForm compose(const QuadraticForm& f, const QuadraticForm& g);

QuadraticForm form_pow(const QuadraticForm& f, u64 e);

/// Order of the class in cl(disc).
u64 order_of_class(const QuadraticForm& f);

/// All primitive reduced forms of discriminant D (|D| <= 10^8), sorted.
std::vector<QuadraticForm> enumerate_reduced_forms(i64 D);

u64 class_number(i64 D);

/// Kronecker class number H(delta) = sum of h(O) over Z[pi] <= O <= O_K.
u64 kronecker_class_number(i64 delta);

/// Distinguished prime form (ell, b, c) with 0 <= b <= ell, or none when ell
/// is inert or divides the conductor.
std::optional<QuadraticForm> prime_form(i64 D, u64 ell);

/// D = f^2 * D_K with D_K fundamental.
struct OrderSpec {
    i64 D = 0;
    i64 D_K = 0;
    u64 f = 1;
    static OrderSpec of(i64 D);
};

struct PresGenerator {
    QuadraticForm form;       // reduced class representative
    u64 norm = 0;             // prime ell_i
    u64 rel_order = 0;        // r_i = [G_i : G_{i-1}]
    std::vector<u32> power_rel;  // alpha_i^{r_i} = prod_{j<i} alpha_j^{power_rel[j]}
};

/// Polycyclic presentation of cl(D) with a full class -> exponent-vector table.
class ClassPresentation {
  public:
    i64 D = 0;
    u64 h = 1;
    std::vector<PresGenerator> generators;

    const std::vector<u32>& dlog(const QuadraticForm& reduced_class) const;
    QuadraticForm form_from_vector(const std::vector<u32>& e) const;
    const std::map<QuadraticForm, std::vector<u32>>& table() const { return table_; }

    friend std::optional<ClassPresentation> optimal_presentation_capped(i64 D, u64 max_norm);

  private:
    std::map<QuadraticForm, std::vector<u32>> table_;
};

/// Greedy optimal presentation: minimize ell_1, then each ell_i subject to
/// [l_i] not in the span of the earlier generators.
ClassPresentation optimal_presentation(i64 D);

/// As above but only generator norms < max_norm are allowed; nullopt when the
/// restricted prime forms do not generate cl(D).
std::optional<ClassPresentation> optimal_presentation_capped(i64 D, u64 max_norm);

/// Smallest prime norm whose class generates all of cl(D), for cyclic groups.
std::optional<u64> minimal_single_generator_norm(i64 D, u64 cap = 1000);

struct TorsorStep {
    int generator;  // index of the generator applied to reach this class; -1 for the start
    QuadraticForm cls;
    std::vector<u32> evec;
};

/// The h classes in enumeration order; each entry after the first is reached
/// from the previous by one application of generators[generator].
std::vector<TorsorStep> enumerate_torsor_steps(const ClassPresentation& pres);

/// Mixed-radix step planner over the relative orders (no class arithmetic).
class TorsorStepper {
  public:
    explicit TorsorStepper(const ClassPresentation& pres);
    /// Generator index for the next transition, or -1 when done. h-1 calls total.
    int next();

  private:
    std::vector<u64> orders_;
    std::vector<u64> counters_;
};

/// The surjection cl(l^2 D) -> cl(D) induced by ideal extension; requires
/// ell coprime to the conductor of D.
QuadraticForm lift_class(const QuadraticForm& f, u64 ell);

}  // namespace volcano

#endif
