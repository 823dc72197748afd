#include <catch2/catch_amalgamated.hpp>

#include "psamathe/ast.hpp"

using namespace psa;

namespace {

TypeDecl make_decl(std::string name, std::initializer_list<Modifier> mods, BaseType base) {
    TypeDecl d;
    d.name = std::move(name);
    for (Modifier m : mods) d.modifiers.insert(m);
    d.base = std::move(base);
    return d;
}

} // namespace

TEST_CASE("resolve_named follows declaration chains") {
    TypeDecl token = make_decl("Token", {Modifier::Fungible, Modifier::Asset}, NatBase{});
    TypeDeclMap decls{{"Token", &token}};

    auto r = resolve_named(decls, NamedBase{"Token"});
    REQUIRE(std::holds_alternative<ResolvedBase>(r));
    const auto& res = std::get<ResolvedBase>(r);
    CHECK(res.modifiers.has(Modifier::Fungible));
    CHECK(res.modifiers.has(Modifier::Asset));
    CHECK(std::holds_alternative<NatBase>(res.base));
    CHECK(res.outermost_name == "Token");
}

TEST_CASE("resolve_named on builtin bases") {
    TypeDeclMap decls;
    auto r = resolve_named(decls, NatBase{});
    REQUIRE(std::holds_alternative<ResolvedBase>(r));
    CHECK(std::get<ResolvedBase>(r).modifiers.empty());
    CHECK(std::holds_alternative<NatBase>(std::get<ResolvedBase>(r).base));
}

TEST_CASE("resolve_named unions modifiers transitively") {
    TypeDecl a = make_decl("A", {Modifier::Asset}, NamedBase{"B"});
    TypeDecl b = make_decl("B", {Modifier::Consumable}, NatBase{});
    TypeDeclMap decls{{"A", &a}, {"B", &b}};

    auto r = resolve_named(decls, NamedBase{"A"});
    REQUIRE(std::holds_alternative<ResolvedBase>(r));
    const auto& res = std::get<ResolvedBase>(r);
    CHECK(res.modifiers.has(Modifier::Asset));
    CHECK(res.modifiers.has(Modifier::Consumable));
    CHECK(std::holds_alternative<NatBase>(res.base));
}

TEST_CASE("resolve_named errors") {
    TypeDeclMap empty;
    auto unknown = resolve_named(empty, NamedBase{"Ghost"});
    REQUIRE(std::holds_alternative<ResolveError>(unknown));
    CHECK(std::get<ResolveError>(unknown).kind == ResolveError::Kind::UnknownType);

    TypeDecl a = make_decl("A", {}, NamedBase{"B"});
    TypeDecl b = make_decl("B", {}, NamedBase{"A"});
    TypeDeclMap decls{{"A", &a}, {"B", &b}};
    auto cyclic = resolve_named(decls, NamedBase{"A"});
    REQUIRE(std::holds_alternative<ResolveError>(cyclic));
    CHECK(std::get<ResolveError>(cyclic).kind == ResolveError::Kind::CyclicTypeDefinition);
}

TEST_CASE("resolve_named is idempotent and materializes consumable => asset") {
    TypeDecl tk = make_decl("Ticket", {Modifier::Consumable}, NatBase{});
    TypeDeclMap decls{{"Ticket", &tk}};

    auto r = resolve_named(decls, NamedBase{"Ticket"});
    REQUIRE(std::holds_alternative<ResolvedBase>(r));
    const auto& res = std::get<ResolvedBase>(r);
    CHECK(res.modifiers.has(Modifier::Consumable));
    CHECK(res.modifiers.has(Modifier::Asset));

    // Resolving the returned base adds nothing further.
    auto again = resolve_named(decls, res.base);
    REQUIRE(std::holds_alternative<ResolvedBase>(again));
    CHECK(std::get<ResolvedBase>(again).modifiers.empty());
    CHECK(base_equal(std::get<ResolvedBase>(again).base, res.base));
}

TEST_CASE("apply_updater never alters the base type") {
    Type tok = make_type(TypeQuant::One, NamedBase{"Token"});
    Type n = make_type(TypeQuant::Any, NatBase{});

    Type cleared = apply_updater(Updater::with(TypeQuant::Empty), tok);
    CHECK(cleared.quant == TypeQuant::Empty);
    CHECK(base_equal(cleared.base, tok.base));

    Type same = apply_updater(Updater::id(), n);
    CHECK(type_equal(same, n));

    Type bumped = apply_updater(Updater::add(TypeQuant::One), make_type(TypeQuant::Empty, NatBase{}));
    CHECK(bumped.quant == TypeQuant::One);
    CHECK(std::holds_alternative<NatBase>(bumped.base));
}

TEST_CASE("type rendering") {
    Type t = make_type(TypeQuant::Any, NamedBase{"ether"});
    CHECK(type_to_string(t) == "any ether");

    TableBase tb;
    tb.keys = {"owner"};
    tb.elem = std::make_shared<const Type>(Type{std::nullopt, NamedBase{"Token"}});
    CHECK(base_to_string(tb) == "table(owner) Token");

    TableBase list;
    list.elem = std::make_shared<const Type>(Type{std::nullopt, NamedBase{"Ticket"}});
    CHECK(base_to_string(list) == "list Ticket");
}
