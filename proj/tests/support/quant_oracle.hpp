#pragma once

// Brute-force oracle for the quantity domain, independent of the library's
// lattice tables. Everything is computed from first principles over small
// witness sets: a quantity denotes a set of naturals, an abstract operator is
// sound if it covers the pointwise image, and minimal if no strictly smaller
// denotation also covers it.

#include <optional>
#include <set>
#include <vector>

#include "psamathe/quantity.hpp"

namespace oracle {

using psa::TypeQuant;

// Restated denotations (the spec's concretize definition, not the library's).
inline bool member(TypeQuant q, unsigned n) {
    switch (q) {
    case TypeQuant::Empty: return n == 0;
    case TypeQuant::One: return n == 1;
    case TypeQuant::Nonempty: return n >= 1;
    case TypeQuant::Any: return true;
    }
    return false;
}

inline std::vector<unsigned> witnesses(TypeQuant q, unsigned limit) {
    std::vector<unsigned> out;
    for (unsigned n = 0; n <= limit; ++n)
        if (member(q, n)) out.push_back(n);
    return out;
}

// conc(a) ⊆ conc(b), decided over a window large enough to separate the four
// denotations (any window ≥ [0,2] works).
inline bool subset(TypeQuant a, TypeQuant b, unsigned limit = 64) {
    for (unsigned n = 0; n <= limit; ++n)
        if (member(a, n) && !member(b, n)) return false;
    return true;
}

inline bool strict_subset(TypeQuant a, TypeQuant b) {
    return subset(a, b) && !subset(b, a);
}

inline bool sound(TypeQuant result, const std::set<unsigned>& image) {
    for (unsigned n : image)
        if (!member(result, n)) return false;
    return true;
}

// No quantity with a strictly smaller denotation also covers the image.
inline bool minimal(TypeQuant result, const std::set<unsigned>& image) {
    if (!sound(result, image)) return false;
    for (TypeQuant q : psa::kAllQuants)
        if (strict_subset(q, result) && sound(q, image)) return false;
    return true;
}

// Image of binary op f over the witnesses of (a, b) within [0, limit].
// f returns nullopt where the concrete operation is undefined (monus with
// y > x).
template <class F>
std::set<unsigned> image_of(TypeQuant a, TypeQuant b, F f, unsigned limit = 8) {
    std::set<unsigned> out;
    for (unsigned x : witnesses(a, limit))
        for (unsigned y : witnesses(b, limit))
            if (auto r = f(x, y)) out.insert(*r);
    return out;
}

inline std::optional<unsigned> concrete_add(unsigned x, unsigned y) { return x + y; }

inline std::optional<unsigned> concrete_monus(unsigned x, unsigned y) {
    if (y > x) return std::nullopt;
    return x - y;
}

} // namespace oracle
