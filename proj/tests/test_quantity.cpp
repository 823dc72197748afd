#include <catch2/catch_amalgamated.hpp>

#include "psamathe/quantity.hpp"
#include "support/quant_oracle.hpp"

using namespace psa;

TEST_CASE("quant_approx is the best approximation of a count") {
    CHECK(quant_approx(0u) == TypeQuant::Empty);
    CHECK(quant_approx(1u) == TypeQuant::One);
    CHECK(quant_approx(7u) == TypeQuant::Nonempty);

    // Galois-style: n is in the denotation, and no smaller quantity admits n.
    for (unsigned n = 0; n <= 64; ++n) {
        TypeQuant q = quant_approx(n);
        CHECK(oracle::member(q, n));
        for (TypeQuant smaller : kAllQuants) {
            if (oracle::strict_subset(smaller, q)) CHECK(!oracle::member(smaller, n));
        }
    }
}

TEST_CASE("concretize membership") {
    CHECK(quant_contains(TypeQuant::Empty, 0u));
    CHECK(!quant_contains(TypeQuant::Nonempty, 0u));
    CHECK(quant_contains(TypeQuant::Any, 12u));

    for (TypeQuant q : kAllQuants)
        for (unsigned n = 0; n <= 64; ++n) CHECK(quant_contains(q, n) == oracle::member(q, n));
}

TEST_CASE("ordering agrees with denotation subset") {
    for (TypeQuant a : kAllQuants)
        for (TypeQuant b : kAllQuants) CHECK(quant_le(a, b) == oracle::subset(a, b));
}

TEST_CASE("join is the least upper bound") {
    CHECK(quant_join(TypeQuant::Empty, TypeQuant::Nonempty) == TypeQuant::Any);
    CHECK(quant_join(TypeQuant::One, TypeQuant::One) == TypeQuant::One);
    CHECK(quant_join(TypeQuant::One, TypeQuant::Nonempty) == TypeQuant::Nonempty);

    for (TypeQuant a : kAllQuants) {
        for (TypeQuant b : kAllQuants) {
            TypeQuant j = quant_join(a, b);
            CHECK(oracle::subset(a, j));
            CHECK(oracle::subset(b, j));
            for (TypeQuant c : kAllQuants) {
                if (oracle::subset(a, c) && oracle::subset(b, c)) CHECK(oracle::subset(j, c));
            }
            CHECK(quant_join(b, a) == j);
            CHECK(quant_join(a, a) == a);
        }
    }
}

TEST_CASE("addition is the minimal sound abstraction of +") {
    // Frozen table rows.
    CHECK(quant_add(TypeQuant::Empty, TypeQuant::One) == TypeQuant::One);
    CHECK(quant_add(TypeQuant::One, TypeQuant::One) == TypeQuant::Nonempty);
    CHECK(quant_add(TypeQuant::Any, TypeQuant::One) == TypeQuant::Nonempty);
    CHECK(quant_add(TypeQuant::One, TypeQuant::Nonempty) == TypeQuant::Nonempty);
    CHECK(quant_add(TypeQuant::Nonempty, TypeQuant::Nonempty) == TypeQuant::Nonempty);
    CHECK(quant_add(TypeQuant::Any, TypeQuant::Any) == TypeQuant::Any);

    for (TypeQuant a : kAllQuants) {
        for (TypeQuant b : kAllQuants) {
            auto image = oracle::image_of(a, b, oracle::concrete_add);
            CHECK(oracle::sound(quant_add(a, b), image));
            CHECK(oracle::minimal(quant_add(a, b), image));
            CHECK(quant_add(a, b) == quant_add(b, a));
        }
    }
}

TEST_CASE("subtraction is the minimal sound abstraction of monus") {
    CHECK(quant_sub(TypeQuant::One, TypeQuant::Empty) == TypeQuant::One);
    CHECK(quant_sub(TypeQuant::One, TypeQuant::One) == TypeQuant::Empty);
    CHECK(quant_sub(TypeQuant::Nonempty, TypeQuant::One) == TypeQuant::Any);
    CHECK(quant_sub(TypeQuant::Nonempty, TypeQuant::Nonempty) == TypeQuant::Any);
    CHECK(quant_sub(TypeQuant::Empty, TypeQuant::Nonempty) == TypeQuant::Empty);
    CHECK(quant_sub(TypeQuant::One, TypeQuant::Any) == TypeQuant::Any);

    for (TypeQuant a : kAllQuants) {
        for (TypeQuant b : kAllQuants) {
            auto image = oracle::image_of(a, b, oracle::concrete_monus);
            CHECK(oracle::sound(quant_sub(a, b), image));
            // The empty image arises only for empty ⊖ {one,nonempty}; both
            // empty and one are minimal there, and the table picks empty.
            if (!image.empty()) CHECK(oracle::minimal(quant_sub(a, b), image));
        }
    }
}

TEST_CASE("updaters on quantities") {
    CHECK(Updater::id().apply(TypeQuant::Any) == TypeQuant::Any);
    CHECK(Updater::with(TypeQuant::Empty).apply(TypeQuant::One) == TypeQuant::Empty);
    CHECK(Updater::add(TypeQuant::One).apply(TypeQuant::Empty) == TypeQuant::One);
    CHECK(Updater::sub(TypeQuant::One).apply(TypeQuant::One) == TypeQuant::Empty);
}

TEST_CASE("max picks the ⊑-larger quantity, ties to the left") {
    for (TypeQuant a : kAllQuants) {
        for (TypeQuant b : kAllQuants) {
            TypeQuant m = quant_max(a, b);
            CHECK((m == a || m == b));
            if (quant_le(a, b) && !quant_le(b, a)) CHECK(m == b);
            if (quant_le(b, a)) CHECK(m == a);
        }
    }
}
