#pragma once

#include <cstdint>
#include <string_view>

namespace psa {

// The four-point type-quantity domain. Concretizations:
//   empty    -> {0}
//   one      -> {1}
//   nonempty -> {n | n >= 1}
//   any      -> all naturals
enum class TypeQuant : std::uint8_t { Empty, One, Any, Nonempty };

constexpr std::string_view quant_name(TypeQuant q) {
    switch (q) {
    case TypeQuant::Empty: return "empty";
    case TypeQuant::One: return "one";
    case TypeQuant::Any: return "any";
    case TypeQuant::Nonempty: return "nonempty";
    }
    return "?";
}

constexpr TypeQuant kAllQuants[] = {TypeQuant::Empty, TypeQuant::One, TypeQuant::Any,
                                    TypeQuant::Nonempty};

// Membership test for the concretization of q. Works for any natural-like
// type that compares against small integers (unsigned ints, cpp_int).
template <class N>
constexpr bool quant_contains(TypeQuant q, const N& n) {
    switch (q) {
    case TypeQuant::Empty: return n == 0;
    case TypeQuant::One: return n == 1;
    case TypeQuant::Nonempty: return n >= 1;
    case TypeQuant::Any: return true;
    }
    return false;
}

// #(n): the least quantity whose concretization contains n.
template <class N>
constexpr TypeQuant quant_approx(const N& n) {
    if (n == 0) return TypeQuant::Empty;
    if (n == 1) return TypeQuant::One;
    return TypeQuant::Nonempty;
}

// a ⊑ b iff concretize(a) ⊆ concretize(b).
constexpr bool quant_le(TypeQuant a, TypeQuant b) {
    if (a == b || b == TypeQuant::Any) return true;
    if (a == TypeQuant::One && b == TypeQuant::Nonempty) return true;
    return false;
}

// Join by specificity; the least upper bound in the ⊑ order.
// empty ⊔ one = any: no quantity denotes {0,1}.
constexpr TypeQuant quant_join(TypeQuant a, TypeQuant b) {
    if (quant_le(a, b)) return b;
    if (quant_le(b, a)) return a;
    if ((a == TypeQuant::One && b == TypeQuant::Nonempty) ||
        (a == TypeQuant::Nonempty && b == TypeQuant::One))
        return TypeQuant::Nonempty;
    return TypeQuant::Any;
}

// ⊕: least quantity containing {x+y | x ∈ conc(a), y ∈ conc(b)}.
constexpr TypeQuant quant_add(TypeQuant a, TypeQuant b) {
    if (a == TypeQuant::Empty) return b;
    if (b == TypeQuant::Empty) return a;
    if (a == TypeQuant::Any && b == TypeQuant::Any) return TypeQuant::Any;
    // Remaining combinations involve at least one side that is >= 1.
    return TypeQuant::Nonempty;
}

// ⊖: least quantity containing {x−y | x ∈ conc(a), y ∈ conc(b), y ≤ x}.
// Saturating at the abstract level; runtime underflow is a dynamic error.
constexpr TypeQuant quant_sub(TypeQuant a, TypeQuant b) {
    if (a == TypeQuant::Empty) return TypeQuant::Empty;
    if (b == TypeQuant::Empty) return a;
    if (a == TypeQuant::One) {
        // 1−1 = 0 when b ∋ 1; b = any also admits 1−0 = 1, so {0,1} needs any.
        return b == TypeQuant::Any ? TypeQuant::Any : TypeQuant::Empty;
    }
    return TypeQuant::Any;
}

// max by ⊑ with ties (and incomparable pairs) resolved to the left argument.
// No typing rule uses it; exposed for completeness.
constexpr TypeQuant quant_max(TypeQuant a, TypeQuant b) {
    if (quant_le(b, a)) return a;
    if (quant_le(a, b)) return b;
    return a;
}

// Updaters: the type functions instantiated by the typing rules
// (id, ⊕Q, ⊖Q, with_Q).
struct Updater {
    enum class Kind : std::uint8_t { Id, Add, Sub, With } kind = Kind::Id;
    TypeQuant quant = TypeQuant::Empty;

    static Updater id() { return {Kind::Id, TypeQuant::Empty}; }
    static Updater add(TypeQuant q) { return {Kind::Add, q}; }
    static Updater sub(TypeQuant q) { return {Kind::Sub, q}; }
    static Updater with(TypeQuant q) { return {Kind::With, q}; }

    bool is_id() const { return kind == Kind::Id; }

    TypeQuant apply(TypeQuant q) const {
        switch (kind) {
        case Kind::Id: return q;
        case Kind::Add: return quant_add(q, quant);
        case Kind::Sub: return quant_sub(q, quant);
        case Kind::With: return quant;
        }
        return q;
    }
};

} // namespace psa
