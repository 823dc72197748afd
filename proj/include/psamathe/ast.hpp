#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "psamathe/diagnostics.hpp"
#include "psamathe/quantity.hpp"

namespace psa {

// Unbounded naturals. The 2^256−1 cap is enforced by runtime arithmetic, not
// by the representation.
using Nat = boost::multiprecision::cpp_int;

inline const Nat& nat_max() {
    static const Nat max = (Nat(1) << 256) - 1;
    return max;
}

// ---------------------------------------------------------------------------
// Modifiers
// ---------------------------------------------------------------------------

enum class Modifier : std::uint8_t { Fungible, Unique, Immutable, Consumable, Asset };

class ModifierSet {
public:
    void insert(Modifier m) { bits_ |= bit(m); }
    bool has(Modifier m) const { return bits_ & bit(m); }
    bool empty() const { return bits_ == 0; }
    void merge(ModifierSet other) { bits_ |= other.bits_; }
    bool operator==(const ModifierSet&) const = default;

    // Canonical order, used by the printer.
    template <class F>
    void for_each(F f) const {
        for (Modifier m : {Modifier::Fungible, Modifier::Unique, Modifier::Immutable,
                           Modifier::Consumable, Modifier::Asset})
            if (has(m)) f(m);
    }

private:
    static std::uint8_t bit(Modifier m) { return std::uint8_t(1u << unsigned(m)); }
    std::uint8_t bits_ = 0;
};

constexpr std::string_view modifier_name(Modifier m) {
    switch (m) {
    case Modifier::Fungible: return "fungible";
    case Modifier::Unique: return "unique";
    case Modifier::Immutable: return "immutable";
    case Modifier::Consumable: return "consumable";
    case Modifier::Asset: return "asset";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct Type;

struct BoolBase {};
struct NatBase {};
struct NamedBase {
    std::string name;
};
// table(keys) elem; an empty key list is a list.
struct TableBase {
    std::vector<std::string> keys;
    std::shared_ptr<const Type> elem;
};
struct RecordField;
struct RecordBase {
    std::vector<RecordField> fields;
};

using BaseType = std::variant<BoolBase, NatBase, NamedBase, TableBase, RecordBase>;

// Q T. The quantity is optional in the AST so omitted annotations can be
// inferred contextually; the checker always works with materialized values.
struct Type {
    std::optional<TypeQuant> quant;
    BaseType base;
};

struct RecordField {
    std::string name;
    Type type;
};

inline Type make_type(TypeQuant q, BaseType base) { return Type{q, std::move(base)}; }

bool base_equal(const BaseType& a, const BaseType& b);

inline bool type_equal(const Type& a, const Type& b) {
    return a.quant == b.quant && base_equal(a.base, b.base);
}

inline bool base_equal(const BaseType& a, const BaseType& b) {
    if (a.index() != b.index()) return false;
    if (std::holds_alternative<NamedBase>(a))
        return std::get<NamedBase>(a).name == std::get<NamedBase>(b).name;
    if (std::holds_alternative<TableBase>(a)) {
        const auto& ta = std::get<TableBase>(a);
        const auto& tb = std::get<TableBase>(b);
        return ta.keys == tb.keys && type_equal(*ta.elem, *tb.elem);
    }
    if (std::holds_alternative<RecordBase>(a)) {
        const auto& ra = std::get<RecordBase>(a);
        const auto& rb = std::get<RecordBase>(b);
        if (ra.fields.size() != rb.fields.size()) return false;
        for (size_t i = 0; i < ra.fields.size(); ++i) {
            if (ra.fields[i].name != rb.fields[i].name) return false;
            if (!type_equal(ra.fields[i].type, rb.fields[i].type)) return false;
        }
        return true;
    }
    return true; // BoolBase / NatBase
}

std::string base_to_string(const BaseType& b);

inline std::string type_to_string(const Type& t) {
    std::string out;
    if (t.quant) {
        out += quant_name(*t.quant);
        out += ' ';
    }
    out += base_to_string(t.base);
    return out;
}

inline std::string base_to_string(const BaseType& b) {
    struct V {
        std::string operator()(const BoolBase&) const { return "bool"; }
        std::string operator()(const NatBase&) const { return "nat"; }
        std::string operator()(const NamedBase& n) const { return n.name; }
        std::string operator()(const TableBase& t) const {
            if (t.keys.empty()) return "list " + type_to_string(*t.elem);
            std::string out = "table(";
            for (size_t i = 0; i < t.keys.size(); ++i) {
                if (i) out += ", ";
                out += t.keys[i];
            }
            out += ") " + type_to_string(*t.elem);
            return out;
        }
        std::string operator()(const RecordBase& r) const {
            std::string out = "{ ";
            for (size_t i = 0; i < r.fields.size(); ++i) {
                if (i) out += ", ";
                out += r.fields[i].name + " : " + type_to_string(r.fields[i].type);
            }
            out += " }";
            return out;
        }
    };
    return std::visit(V{}, b);
}

// ---------------------------------------------------------------------------
// Locators
// ---------------------------------------------------------------------------

struct Locator;
using LocatorPtr = std::shared_ptr<Locator>;

struct BoolLit {
    bool value;
};
struct NatLit {
    Nat value;
};
struct VarLoc {
    std::string name;
};
struct FieldAcc {
    LocatorPtr of;
    std::string field;
};
struct VarDefLoc {
    std::string name;
    BaseType declared;
};
struct ListLit {
    std::vector<Locator> elems;
};
struct RecordLitMember;
struct RecordLit {
    std::vector<RecordLitMember> members;
};
struct CopyLoc {
    LocatorPtr inner;
};
struct ZipLoc {
    std::vector<Locator> parts;
};
// from[key]: key lookup on keyed tables, amount selection on fungibles.
struct SelectLoc {
    LocatorPtr from;
    LocatorPtr key;
};
struct LocArg;
// from[Q st pred(args)]; the hole argument binds each candidate element.
struct FilterLoc {
    LocatorPtr from;
    TypeQuant quant;
    std::string pred;
    std::vector<LocArg> args;
};
struct ConsumeLoc {};

// Pure natural arithmetic over locators, evaluated before the flow begins.
enum class ArithOp { Add, Sub, Mul, Div };
struct ArithExpr;
struct ALeaf {
    LocatorPtr loc;
};
struct ALength {
    LocatorPtr arg;
};
struct ABinary {
    ArithOp op;
    std::shared_ptr<ArithExpr> lhs, rhs;
};
struct ArithExpr {
    std::variant<ALeaf, ALength, ABinary> node;
};
struct PureExprLoc {
    ArithExpr expr;
};

struct Locator {
    Span span;
    std::variant<BoolLit, NatLit, VarLoc, FieldAcc, VarDefLoc, ListLit, RecordLit, CopyLoc,
                 ZipLoc, SelectLoc, FilterLoc, ConsumeLoc, PureExprLoc>
        node;
};

// A transformer-call or filter argument; nullopt is the hole `_`.
struct LocArg {
    Span span;
    std::optional<Locator> loc;
    bool is_hole() const { return !loc.has_value(); }
};

struct RecordLitMember {
    std::string name;
    Type type;
    Locator init;
};

template <class T>
bool loc_is(const Locator& l) {
    return std::holds_alternative<T>(l.node);
}
template <class T>
const T& loc_as(const Locator& l) {
    return std::get<T>(l.node);
}

// ---------------------------------------------------------------------------
// Statements and declarations
// ---------------------------------------------------------------------------

struct TransformerCall {
    Span span;
    bool is_new = false;
    std::string name;
    std::vector<LocArg> args;
};

struct Stmt;

struct FlowStmt {
    Locator source;
    Locator dest;
};
struct FlowTransformStmt {
    Locator source;
    TransformerCall call;
    Locator dest;
};
struct TryCatchStmt {
    std::vector<Stmt> try_body;
    std::vector<Stmt> catch_body;
};
// Standalone `var x : T`: brings an empty variable into existence (rule
// VarDef with the identity updater; the located pair is discarded).
struct VarDeclStmt {
    std::string name;
    BaseType declared;
};
// Runtime-only marker; never produced by the parser.
struct RevertStmt {};

struct Stmt {
    Span span;
    std::variant<FlowStmt, FlowTransformStmt, TryCatchStmt, VarDeclStmt, RevertStmt> node;
};

struct Param {
    std::string name;
    Type type;
    Span span;
};

struct TypeDecl {
    std::string name;
    ModifierSet modifiers;
    BaseType base;
    Span span;
};

// transformer f(aux..., flowing) -> ret { body }. The last parameter is the
// flowing parameter by convention.
struct TransformerDecl {
    std::string name;
    std::vector<Param> params;
    Param ret;
    std::vector<Stmt> body;
    Span span;
};

struct Program {
    std::vector<TypeDecl> types;
    std::vector<TransformerDecl> transformers;
    std::vector<Stmt> body;
};

// ---------------------------------------------------------------------------
// Named-type resolution
// ---------------------------------------------------------------------------

struct ResolvedBase {
    ModifierSet modifiers;      // union along the Named chain (consumable implies asset)
    BaseType base;              // first non-Named base
    std::string outermost_name; // "" for builtin bases
};

struct ResolveError {
    enum class Kind { UnknownType, CyclicTypeDefinition } kind;
    std::string name;
};

using TypeDeclMap = std::map<std::string, const TypeDecl*>;

// Follows Named chains, collecting modifiers. Consumable implies Asset, so
// downstream checks only ever test for Asset.
inline std::variant<ResolvedBase, ResolveError> resolve_named(const TypeDeclMap& decls,
                                                              const BaseType& base) {
    ResolvedBase out;
    const BaseType* cur = &base;
    std::set<std::string> seen;
    while (const auto* named = std::get_if<NamedBase>(cur)) {
        if (out.outermost_name.empty()) out.outermost_name = named->name;
        if (!seen.insert(named->name).second)
            return ResolveError{ResolveError::Kind::CyclicTypeDefinition, named->name};
        auto it = decls.find(named->name);
        if (it == decls.end())
            return ResolveError{ResolveError::Kind::UnknownType, named->name};
        out.modifiers.merge(it->second->modifiers);
        cur = &it->second->base;
    }
    if (out.modifiers.has(Modifier::Consumable)) out.modifiers.insert(Modifier::Asset);
    out.base = *cur;
    return out;
}

// Display name of a resolved value's type: the declared name when there is
// one, otherwise the builtin base.
inline std::string display_type_name(const BaseType& b) {
    if (const auto* named = std::get_if<NamedBase>(&b)) return named->name;
    return base_to_string(b);
}

// ---------------------------------------------------------------------------
// Updaters on full types
// ---------------------------------------------------------------------------

// Applies a type function to a (materialized) type. Never alters the base.
inline Type apply_updater(const Updater& f, const Type& t) {
    Type out = t;
    if (out.quant) out.quant = f.apply(*out.quant);
    return out;
}

// max: the type with the ⊑-larger quantity, ties to the left.
inline Type type_max(const Type& a, const Type& b) {
    if (!a.quant || !b.quant) return a;
    return quant_max(*a.quant, *b.quant) == *a.quant ? a : b;
}

} // namespace psa
