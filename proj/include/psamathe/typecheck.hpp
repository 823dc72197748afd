#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psamathe/ast.hpp"
#include "psamathe/diagnostics.hpp"
#include "psamathe/parser.hpp"

namespace psa {

enum class Mode { Source, Dest };

// Ordered type environment (the paper's Γ/Δ). Bindings keep insertion order
// so end-of-scope diagnostics are deterministic.
class TypeEnv {
public:
    const Type* find(const std::string& name) const {
        for (const auto& [n, t] : entries_)
            if (n == name) return &t;
        return nullptr;
    }
    bool contains(const std::string& name) const { return find(name) != nullptr; }
    void bind(const std::string& name, Type t) { entries_.emplace_back(name, std::move(t)); }
    void set(const std::string& name, Type t) {
        for (auto& [n, cur] : entries_) {
            if (n == name) {
                cur = std::move(t);
                return;
            }
        }
        entries_.emplace_back(name, std::move(t));
    }
    void erase(const std::string& name) {
        entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                      [&](const auto& e) { return e.first == name; }),
                       entries_.end());
    }
    const std::vector<std::pair<std::string, Type>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, Type>> entries_;
};

struct TransformerInfo {
    const TransformerDecl* decl = nullptr;
    std::vector<Type> aux;   // materialized declared aux types
    Type flowing;            // materialized declared flowing type
    Type ret;                // materialized declared return type
    // Borrow-style: the body leaves the flowing parameter at exactly its
    // declared type; the runtime restores the leftover to the source.
    bool borrow = false;
    bool checked = false;
};

// Everything the runtime needs from a successful check.
struct CheckInfo {
    bool ok = false;
    TypeDeclMap types;
    std::map<std::string, TransformerInfo> transformers;
    // Static environment after every statement (all nesting levels), for
    // preservation auditing.
    std::map<const Stmt*, TypeEnv> env_after;
    TypeEnv top_final;

    ResolvedBase resolve(const BaseType& b) const {
        auto r = resolve_named(types, b);
        if (auto* ok = std::get_if<ResolvedBase>(&r)) return *ok;
        return ResolvedBase{{}, b, ""};
    }
    bool is_asset(const BaseType& b) const { return resolve(b).modifiers.has(Modifier::Asset); }
    bool is_fungible_nat(const BaseType& b) const {
        ResolvedBase r = resolve(b);
        if (!std::holds_alternative<NatBase>(r.base)) return false;
        return r.modifiers.has(Modifier::Fungible) || r.modifiers.empty();
    }
};

class Checker {
public:
    Checker(const Program& prog, DiagnosticBag& diags) : prog_(prog), diags_(diags) {}

    CheckInfo run() {
        collect_decls();
        for (const TypeDecl& d : prog_.types) check_type_decl(d);
        for (const TransformerDecl& d : prog_.transformers) check_transformer(d);
        TypeEnv env;
        for (const Stmt& s : prog_.body) check_stmt(env, s);
        check_top_level_drops(env);
        info_.top_final = env;
        info_.ok = !diags_.has_errors();
        return std::move(info_);
    }

    // Exposed for unit tests: the locator typing judgement
    // Γ ⊢_M f; L : τ ⊣ Δ. Mutates env in place; returns the located type.
    std::optional<Type> type_locator(TypeEnv& env, Mode mode, const Updater& f,
                                     const Locator& loc) {
        auto located = walk(env, mode, f, loc);
        if (!located) return std::nullopt;
        if (!commit(env, f, *located, loc.span)) return std::nullopt;
        return located->type;
    }

    // Γ ⊢ S ok ⊣ Δ. Returns false when the statement is ill-formed (the
    // environment may be partially updated; callers bail to the next stmt).
    bool check_stmt(TypeEnv& env, const Stmt& s) {
        bool ok = std::visit([&](const auto& node) { return do_stmt(env, s.span, node); },
                             s.node);
        info_.env_after[&s] = env;
        return ok;
    }

    void collect_decls() {
        for (const TypeDecl& d : prog_.types) {
            if (info_.types.count(d.name) || info_.transformers.count(d.name))
                diags_.error(d.span, "DuplicateBinding", "duplicate declaration of '" + d.name + "'");
            info_.types[d.name] = &d;
        }
        for (const TransformerDecl& d : prog_.transformers) {
            if (info_.types.count(d.name) || info_.transformers.count(d.name)) {
                diags_.error(d.span, "DuplicateBinding", "duplicate declaration of '" + d.name + "'");
                continue;
            }
            TransformerInfo ti;
            ti.decl = &d;
            for (size_t i = 0; i + 1 < d.params.size(); ++i)
                ti.aux.push_back(materialize(d.params[i].type, QuantPos::Param));
            if (!d.params.empty())
                ti.flowing = materialize(d.params.back().type, QuantPos::Param);
            ti.ret = materialize(d.ret.type, QuantPos::Param);
            info_.transformers.emplace(d.name, std::move(ti));
        }
    }

private:
    const Program& prog_;
    DiagnosticBag& diags_;
    CheckInfo info_;

    // ---- type materialization ----

    enum class QuantPos { Param, Field, Elem, VarDef };

    TypeQuant default_quant(const BaseType& base, QuantPos pos) const {
        switch (pos) {
        case QuantPos::Param:
        case QuantPos::Field: return TypeQuant::Any;
        case QuantPos::VarDef: return TypeQuant::Empty;
        case QuantPos::Elem:
            // Rows of fungible pools (map-style tables) hold any amount;
            // rows of records and identity scalars hold exactly one value.
            return info_.is_fungible_nat(base) ? TypeQuant::Any : TypeQuant::One;
        }
        return TypeQuant::Any;
    }

    BaseType materialize_base(const BaseType& b) const {
        if (const auto* t = std::get_if<TableBase>(&b)) {
            TableBase out;
            out.keys = t->keys;
            out.elem = std::make_shared<const Type>(materialize(*t->elem, QuantPos::Elem));
            return out;
        }
        if (const auto* r = std::get_if<RecordBase>(&b)) {
            RecordBase out;
            for (const RecordField& f : r->fields)
                out.fields.push_back({f.name, materialize(f.type, QuantPos::Field)});
            return out;
        }
        return b;
    }

    Type materialize(const Type& t, QuantPos pos) const {
        Type out;
        out.quant = t.quant ? *t.quant : default_quant(t.base, pos);
        out.base = materialize_base(t.base);
        return out;
    }

    // ---- small helpers ----

    ResolvedBase resolve(const BaseType& b) const { return info_.resolve(b); }

    bool resolves(const BaseType& b, ResolvedBase& out, Span span) {
        auto r = resolve_named(info_.types, b);
        if (auto* err = std::get_if<ResolveError>(&r)) {
            if (err->kind == ResolveError::Kind::UnknownType)
                diags_.error(span, "UnknownType", "unknown type '" + err->name + "'");
            else
                diags_.error(span, "CyclicTypeDefinition",
                             "type '" + err->name + "' is defined in terms of itself");
            return false;
        }
        out = std::get<ResolvedBase>(r);
        return true;
    }

    bool is_nat_resolving(const BaseType& b) const {
        return std::holds_alternative<NatBase>(resolve(b).base);
    }

    // src flows into dst: equal bases, or row insertion into a table of src's
    // element base.
    bool flow_base_compat(const BaseType& src, const BaseType& dst) const {
        if (base_equal(src, dst)) return true;
        if (const auto* t = std::get_if<TableBase>(&dst)) return base_equal(src, t->elem->base);
        return false;
    }

    // Element base of a flow source: tables flow element-wise.
    const BaseType& element_base(const BaseType& b) const {
        if (const auto* t = std::get_if<TableBase>(&b)) return t->elem->base;
        return b;
    }

    // Total quantity added to a destination when `elems` elements each
    // contribute `per`.
    static TypeQuant scale_quant(TypeQuant elems, TypeQuant per) {
        if (elems == TypeQuant::Empty || per == TypeQuant::Empty) return TypeQuant::Empty;
        if (elems == TypeQuant::One) return per;
        if (elems == TypeQuant::Nonempty)
            return per == TypeQuant::Any ? TypeQuant::Any : TypeQuant::Nonempty;
        return TypeQuant::Any;
    }

    // Recursive quantity join of two structurally equal types.
    Type type_join(const Type& a, const Type& b) const {
        Type out = a;
        if (a.quant && b.quant) out.quant = quant_join(*a.quant, *b.quant);
        if (const auto* ta = std::get_if<TableBase>(&a.base)) {
            const auto* tb = std::get_if<TableBase>(&b.base);
            if (tb) {
                TableBase t;
                t.keys = ta->keys;
                t.elem = std::make_shared<const Type>(type_join(*ta->elem, *tb->elem));
                out.base = std::move(t);
            }
        } else if (const auto* ra = std::get_if<RecordBase>(&a.base)) {
            const auto* rb = std::get_if<RecordBase>(&b.base);
            if (rb && ra->fields.size() == rb->fields.size()) {
                RecordBase r;
                for (size_t i = 0; i < ra->fields.size(); ++i)
                    r.fields.push_back(
                        {ra->fields[i].name, type_join(ra->fields[i].type, rb->fields[i].type)});
                out.base = std::move(r);
            }
        }
        return out;
    }

    bool droppable(const Type& t) const {
        if (t.quant == TypeQuant::Empty) return true;
        return !contains_asset(t.base);
    }

    bool contains_asset(const BaseType& b) const {
        ResolvedBase r = resolve(b);
        if (r.modifiers.has(Modifier::Asset)) return true;
        if (const auto* t = std::get_if<TableBase>(&r.base)) return contains_asset(t->elem->base);
        if (const auto* rec = std::get_if<RecordBase>(&r.base)) {
            for (const RecordField& f : rec->fields)
                if (contains_asset(f.type.base)) return true;
        }
        return false;
    }

    static std::string quant_base_str(const Type& t) {
        std::string q = t.quant ? std::string(quant_name(*t.quant)) : "?";
        return q + " " + display_type_name(t.base);
    }

    // ---- declaration checks ----

    bool validate_base(const BaseType& b, Span span) {
        ResolvedBase r;
        if (!resolves(b, r, span)) return false;
        if (const auto* t = std::get_if<TableBase>(&r.base)) {
            if (!validate_base(t->elem->base, span)) return false;
            ResolvedBase elem = resolve(t->elem->base);
            if (!t->keys.empty()) {
                if (const auto* rec = std::get_if<RecordBase>(&elem.base)) {
                    for (const std::string& k : t->keys) {
                        auto it = std::find_if(rec->fields.begin(), rec->fields.end(),
                                               [&](const RecordField& f) { return f.name == k; });
                        if (it == rec->fields.end()) {
                            diags_.error(span, "UnknownType",
                                         "table key '" + k + "' is not a field of the element type");
                            return false;
                        }
                        if (!is_nat_resolving(it->type.base)) {
                            diags_.error(span, "ArgumentMismatch",
                                         "table key '" + k + "' must have a nat-based type");
                            return false;
                        }
                    }
                } else {
                    if (t->keys.size() != 1) {
                        diags_.error(span, "ArgumentMismatch",
                                     "a keyed table of a non-record element takes exactly one key");
                        return false;
                    }
                }
            }
        } else if (const auto* rec = std::get_if<RecordBase>(&r.base)) {
            std::set<std::string> seen;
            for (const RecordField& f : rec->fields) {
                if (!seen.insert(f.name).second) {
                    diags_.error(span, "DuplicateBinding",
                                 "duplicate record field '" + f.name + "'");
                    return false;
                }
                if (!validate_base(f.type.base, span)) return false;
            }
        }
        return true;
    }

    void check_type_decl(const TypeDecl& d) {
        if (d.modifiers.has(Modifier::Fungible) && d.modifiers.has(Modifier::Unique)) {
            diags_.error(d.span, "ConflictingModifiers",
                         "type " + d.name + " cannot be both fungible and unique");
            return;
        }
        if (!validate_base(d.base, d.span)) return;
        ResolvedBase r = resolve(d.base);
        if (d.modifiers.has(Modifier::Fungible) && !std::holds_alternative<NatBase>(r.base))
            diags_.error(d.span, "FungibleNonNumeric",
                         "fungible type " + d.name + " must have a nat base");
        if (d.modifiers.has(Modifier::Unique) && !std::holds_alternative<NatBase>(r.base))
            diags_.error(d.span, "UniqueNonNumeric",
                         "unique type " + d.name + " must have a nat base");
    }

    void check_transformer(const TransformerDecl& d) {
        auto it = info_.transformers.find(d.name);
        if (it == info_.transformers.end() || it->second.decl != &d) return;
        TransformerInfo& ti = it->second;

        std::set<std::string> names;
        for (const Param& p : d.params) {
            if (!names.insert(p.name).second)
                diags_.error(p.span, "DuplicateBinding",
                             "duplicate parameter '" + p.name + "' in transformer " + d.name);
            validate_base(p.type.base, p.span);
        }
        if (!names.insert(d.ret.name).second)
            diags_.error(d.ret.span, "DuplicateBinding",
                         "return variable '" + d.ret.name + "' collides with a parameter");
        validate_base(d.ret.type.base, d.ret.span);
        if (d.params.empty()) return;

        TypeEnv env;
        for (size_t i = 0; i + 1 < d.params.size(); ++i) env.bind(d.params[i].name, ti.aux[i]);
        env.bind(d.params.back().name, ti.flowing);
        env.bind(d.ret.name, apply_updater(Updater::with(TypeQuant::Empty), ti.ret));

        for (const Stmt& s : d.body) check_stmt(env, s);

        // Return variable: final quantity must be ⊑ the declared one.
        if (const Type* rt = env.find(d.ret.name)) {
            if (!base_equal(rt->base, ti.ret.base) ||
                !quant_le(rt->quant.value_or(TypeQuant::Any), *ti.ret.quant))
                diags_.error(d.ret.span, "ReturnTypeMismatch",
                             "return variable " + d.ret.name + " has type " + quant_base_str(*rt) +
                                 ", expected " + quant_base_str(ti.ret));
        }
        // Auxiliary parameters must end at exactly their declared types.
        for (size_t i = 0; i + 1 < d.params.size(); ++i) {
            const Type* at = env.find(d.params[i].name);
            if (at && !type_equal(*at, ti.aux[i]))
                diags_.error(d.params[i].span, "AuxiliaryTypeChanged",
                             "auxiliary parameter " + d.params[i].name + " ends with type " +
                                 quant_base_str(*at) + ", but must keep its declared type " +
                                 quant_base_str(ti.aux[i]));
        }
        // Flowing parameter: either borrowed (exactly the declared type, the
        // runtime restores it) or disposed of (droppable leftovers).
        const std::string& fname = d.params.back().name;
        if (const Type* ft = env.find(fname)) {
            if (type_equal(*ft, ti.flowing)) {
                ti.borrow = true;
            } else if (!droppable(*ft)) {
                diags_.error(d.params.back().span, "AssetNotConsumed",
                             "variable " + fname + " has type " + quant_base_str(*ft) +
                                 ", not empty " + display_type_name(ft->base));
            }
        }
        // Locals must be droppable (only empty asset variables may be dropped).
        for (const auto& [name, t] : env.entries()) {
            if (name == d.ret.name || names.count(name)) continue;
            if (!droppable(t))
                diags_.error(d.span, "AssetNotConsumed",
                             "variable " + name + " has type " + quant_base_str(t) +
                                 ", not empty " + display_type_name(t.base));
        }
        ti.checked = true;
    }

    // At top level only scalar asset bindings are flagged; tables and records
    // are the contract's persistent state.
    void check_top_level_drops(const TypeEnv& env) {
        for (const auto& [name, t] : env.entries()) {
            ResolvedBase r = resolve(t.base);
            bool scalar_asset = r.modifiers.has(Modifier::Asset) &&
                                !std::holds_alternative<TableBase>(r.base) &&
                                !std::holds_alternative<RecordBase>(r.base);
            if (scalar_asset && t.quant != TypeQuant::Empty)
                diags_.error(var_span(name), "UnusedAsset",
                             "variable " + name + " has type " + quant_base_str(t) +
                                 ", not empty " + display_type_name(t.base));
        }
    }

    // Span of the statement that bound a top-level variable, for UnusedAsset.
    Span var_span(const std::string& name) const {
        for (const Stmt& s : prog_.body) {
            if (const auto* vd = std::get_if<VarDeclStmt>(&s.node)) {
                if (vd->name == name) return s.span;
            } else if (const auto* f = std::get_if<FlowStmt>(&s.node)) {
                if (const auto* def = std::get_if<VarDefLoc>(&f->dest.node))
                    if (def->name == name) return f->dest.span;
            } else if (const auto* ft = std::get_if<FlowTransformStmt>(&s.node)) {
                if (const auto* def = std::get_if<VarDefLoc>(&ft->dest.node))
                    if (def->name == name) return ft->dest.span;
            }
        }
        return Span{};
    }

    // ---- locator typing ----

    struct Step {
        enum class Kind { Field, KeySelect, AmountSelect, FilterSelect } kind;
        std::string field;        // Field
        bool map_table = false;   // KeySelect
        TypeQuant sel = TypeQuant::Any; // AmountSelect / FilterSelect
        Type parent;              // parent type before the update
    };

    struct Located {
        Type type;                     // located type (pre-update)
        std::optional<std::string> root; // environment variable to rebind
        bool fresh = false;            // root was bound by this locator (VarDef)
        std::vector<Step> steps;       // path from root down to the location
    };

    std::optional<Located> walk(TypeEnv& env, Mode mode, const Updater& f, const Locator& loc) {
        using R = std::optional<Located>;
        Span span = loc.span;
        return std::visit(
            [&](const auto& node) -> R { return walk_node(env, mode, f, node, span); }, loc.node);
    }

    R_helper:
    std::optional<Located> walk_node(TypeEnv& env, Mode mode, const Updater&, const NatLit& n,
                                     Span span) {
        if (mode != Mode::Source) {
            diags_.error(span, "ModeMismatch", "a literal can only be used as a flow source");
            return std::nullopt;
        }
        return Located{make_type(quant_approx(n.value), NatBase{}), std::nullopt, false, {}};
    }

    std::optional<Located> walk_node(TypeEnv& env, Mode mode, const Updater&, const BoolLit&,
                                     Span span) {
        if (mode != Mode::Source) {
            diags_.error(span, "ModeMismatch", "a literal can only be used as a flow source");
            return std::nullopt;
        }
        return Located{make_type(TypeQuant::One, BoolBase{}), std::nullopt, false, {}};
    }

    std::optional<Located> walk_node(TypeEnv& env, Mode, const Updater&, const VarLoc& v,
                                     Span span) {
        const Type* t = env.find(v.name);
        if (!t) {
            diags_.error(span, "UnboundVariable", "unbound variable " + v.name);
            return std::nullopt;
        }
        return Located{*t, v.name, false, {}};
    }

    std::optional<Located> walk_node(TypeEnv& env, Mode mode, const Updater&, const VarDefLoc& vd,
                                     Span span) {
        if (mode != Mode::Dest) {
            diags_.error(span, "ModeMismatch",
                         "a variable definition can only be a flow destination");
            return std::nullopt;
        }
        if (env.contains(vd.name)) {
            diags_.error(span, "DuplicateBinding", "variable " + vd.name + " is already bound");
            return std::nullopt;
        }
        if (!validate_base(vd.declared, span)) return std::nullopt;
        Type t = make_type(TypeQuant::Empty, materialize_base(vd.declared));
        env.bind(vd.name, t);
        return Located{t, vd.name, true, {}};
    }

    std::optional<Located> walk_node(TypeEnv& env, Mode mode, const Updater& f, const FieldAcc& fa,
                                     Span span) {
        auto parent = walk(env, mode, f, *fa.of);
        if (!parent) return std::nullopt;
        ResolvedBase r = resolve(parent->type.base);
        const auto* rec = std::get_if<RecordBase>(&r.base);
        if (!rec) {
            diags_.error(span, "BaseTypeMismatch",
                         "type " + display_type_name(parent->type.base) + " has no fields");
            return std::nullopt;
        }
        auto it = std::find_if(rec->fields.begin(), rec->fields.end(),
                               [&](const RecordField& g) { return g.name == fa.field; });
        if (it == rec->fields.end()) {
            diags_.error(span, "BaseTypeMismatch",
                         "type " + display_type_name(parent->type.base) + " has no field '" +
                             fa.field + "'");
            return std::nullopt;
        }
        Step step{Step::Kind::Field, fa.field, false, TypeQuant::Any, parent->type};
        parent->steps.push_back(std::move(step));
        parent->type = materialize(it->type, QuantPos::Field);
        return parent;
    }

    std::optional<Located> walk_node(TypeEnv& env, Mode mode, const Updater& f,
                                     const SelectLoc& sel, Span span) {
        auto parent = walk(env, mode, f, *sel.from);
        if (!parent) return std::nullopt;

        // The key/amount locator is a pure read.
        auto key = type_locator(env, Mode::Source, Updater::id(), *sel.key);
        if (!key) return std::nullopt;

        ResolvedBase r = resolve(parent->type.base);
        if (const auto* table = std::get_if<TableBase>(&r.base); table && !table->keys.empty()) {
            if (!is_nat_resolving(key->base)) {
                diags_.error(span, "BaseTypeMismatch", "table keys must be nat-based values");
                return std::nullopt;
            }
            Type elem = materialize(*table->elem, QuantPos::Elem);
            bool map_table = !std::holds_alternative<RecordBase>(resolve(elem.base).base);
            Step step{Step::Kind::KeySelect, "", map_table, TypeQuant::Any, parent->type};
            parent->steps.push_back(std::move(step));
            parent->type = map_table ? elem : make_type(TypeQuant::One, elem.base);
            return parent;
        }
        if (is_nat_resolving(parent->type.base) && info_.is_fungible_nat(parent->type.base)) {
            if (mode != Mode::Source) {
                diags_.error(span, "ModeMismatch",
                             "an amount selection can only be a flow source");
                return std::nullopt;
            }
            if (!is_nat_resolving(key->base)) {
                diags_.error(span, "BaseTypeMismatch", "amount selections must be nat-based");
                return std::nullopt;
            }
            TypeQuant amt = TypeQuant::Any;
            if (const auto* lit = std::get_if<NatLit>(&sel.key->node))
                amt = quant_approx(lit->value);
            Step step{Step::Kind::AmountSelect, "", false, amt, parent->type};
            parent->steps.push_back(std::move(step));
            parent->type = make_type(amt, parent->type.base);
            return parent;
        }
        diags_.error(span, "BaseTypeMismatch",
                     "cannot select from a value of type " +
                         display_type_name(parent->type.base));
        return std::nullopt;
    }

    std::optional<Located> walk_node(TypeEnv& env, Mode mode, const Updater& f,
                                     const FilterLoc& fl, Span span) {
        if (mode != Mode::Source) {
            diags_.error(span, "ModeMismatch", "a filter can only be a flow source");
            return std::nullopt;
        }
        auto parent = walk(env, mode, f, *fl.from);
        if (!parent) return std::nullopt;
        ResolvedBase r = resolve(parent->type.base);
        const auto* table = std::get_if<TableBase>(&r.base);
        if (!table) {
            diags_.error(span, "BaseTypeMismatch", "filters select from tables");
            return std::nullopt;
        }
        Type elem = materialize(*table->elem, QuantPos::Elem);

        auto it = info_.transformers.find(fl.pred);
        if (it == info_.transformers.end()) {
            diags_.error(span, "UnknownTransformer", "unknown transformer " + fl.pred);
            return std::nullopt;
        }
        const TransformerInfo& pred = it->second;
        if (!pred.checked) {
            diags_.error(span, "UnknownTransformer",
                         "transformer " + fl.pred + " must be declared before this use");
            return std::nullopt;
        }
        if (!pred.borrow) {
            diags_.error(span, "ArgumentMismatch",
                         "predicate " + fl.pred + " must leave its flowing parameter intact");
            return std::nullopt;
        }
        if (!std::holds_alternative<BoolBase>(resolve(pred.ret.base).base)) {
            diags_.error(span, "ArgumentMismatch", "predicate " + fl.pred + " must return bool");
            return std::nullopt;
        }
        if (!base_equal(pred.flowing.base, elem.base)) {
            diags_.error(span, "BaseTypeMismatch",
                         "predicate " + fl.pred + " takes " +
                             display_type_name(pred.flowing.base) + ", table holds " +
                             display_type_name(elem.base));
            return std::nullopt;
        }
        if (!check_call_args(env, fl.args, pred, span, /*filter=*/true)) return std::nullopt;

        Step step{Step::Kind::FilterSelect, "", false, fl.quant, parent->type};
        parent->steps.push_back(std::move(step));
        parent->type = make_type(fl.quant, elem.base);
        return parent;
    }

    std::optional<Located> walk_node(TypeEnv& env, Mode mode, const Updater& f, const ListLit& ll,
                                     Span span) {
        if (mode != Mode::Source) {
            diags_.error(span, "ModeMismatch", "a list literal can only be a flow source");
            return std::nullopt;
        }
        if (ll.elems.empty()) {
            diags_.error(span, "UnsupportedConstruct",
                         "an empty list literal has no element type");
            return std::nullopt;
        }
        std::optional<Type> elem;
        TypeQuant total = TypeQuant::Empty;
        for (const Locator& e : ll.elems) {
            auto t = type_locator(env, mode, f, e);
            if (!t) return std::nullopt;
            if (elem && !base_equal(elem->base, t->base)) {
                diags_.error(span, "BaseTypeMismatch",
                             "list literal elements must share one base type");
                return std::nullopt;
            }
            elem = elem ? type_join(*elem, *t) : *t;
            total = quant_add(total, t->quant.value_or(TypeQuant::Any));
        }
        TableBase tb;
        tb.elem = std::make_shared<const Type>(*elem);
        return Located{make_type(total, std::move(tb)), std::nullopt, false, {}};
    }

    std::optional<Located> walk_node(TypeEnv& env, Mode mode, const Updater&, const PureExprLoc& p,
                                     Span span) {
        if (mode != Mode::Source) {
            diags_.error(span, "ModeMismatch", "arithmetic can only be used as a flow source");
            return std::nullopt;
        }
        if (!check_arith(env, p.expr, span)) return std::nullopt;
        return Located{make_type(TypeQuant::Any, NatBase{}), std::nullopt, false, {}};
    }

    std::optional<Located> walk_node(TypeEnv&, Mode, const Updater&, const ConsumeLoc&, Span span) {
        diags_.error(span, "ModeMismatch", "consume can only be a flow destination");
        return std::nullopt;
    }
    std::optional<Located> walk_node(TypeEnv&, Mode, const Updater&, const CopyLoc&, Span span) {
        diags_.error(span, "UnsupportedConstruct", "unsupported construct: copy");
        return std::nullopt;
    }
    std::optional<Located> walk_node(TypeEnv&, Mode, const Updater&, const ZipLoc&, Span span) {
        diags_.error(span, "UnsupportedConstruct", "unsupported construct: zip");
        return std::nullopt;
    }
    std::optional<Located> walk_node(TypeEnv&, Mode, const Updater&, const RecordLit&, Span span) {
        diags_.error(span, "UnsupportedConstruct", "unsupported construct: record literal");
        return std::nullopt;
    }

    bool check_arith(TypeEnv& env, const ArithExpr& e, Span span) {
        struct V {
            Checker& c;
            TypeEnv& env;
            Span span;
            bool operator()(const ALeaf& l) const {
                auto t = c.type_locator(env, Mode::Source, Updater::id(), *l.loc);
                if (!t) return false;
                if (!c.is_nat_resolving(t->base)) {
                    c.diags_.error(l.loc->span, "BaseTypeMismatch",
                                   "arithmetic operands must be nat-based, got " +
                                       display_type_name(t->base));
                    return false;
                }
                return true;
            }
            bool operator()(const ALength& l) const {
                auto t = c.type_locator(env, Mode::Source, Updater::id(), *l.arg);
                if (!t) return false;
                if (!std::holds_alternative<TableBase>(c.resolve(t->base).base)) {
                    c.diags_.error(l.arg->span, "BaseTypeMismatch",
                                   "length() takes a table, got " + display_type_name(t->base));
                    return false;
                }
                return true;
            }
            bool operator()(const ABinary& b) const {
                return std::visit(V{c, env, span}, b.lhs->node) &&
                       std::visit(V{c, env, span}, b.rhs->node);
            }
        };
        return std::visit(V{*this, env, span}, e.node);
    }

    // ---- committing a located update back into the environment ----

    bool commit(TypeEnv& env, const Updater& f, const Located& located, Span span) {
        if (!located.root) return true; // literals, list literals, pure exprs
        // Immutability: a non-identity updater may not touch an immutable
        // value, nor anything inside one.
        if (!f.is_id()) {
            for (const Step& s : located.steps) {
                if (resolve(s.parent.base).modifiers.has(Modifier::Immutable)) {
                    diags_.error(span, "ImmutableMutation",
                                 "cannot modify immutable value of type " +
                                     display_type_name(s.parent.base));
                    return false;
                }
            }
            if (resolve(located.type.base).modifiers.has(Modifier::Immutable)) {
                diags_.error(span, "ImmutableMutation",
                             "cannot modify immutable value of type " +
                                 display_type_name(located.type.base));
                return false;
            }
        }

        // Direction of the update, for container-quantity adjustments.
        TypeQuant bump = TypeQuant::Empty; // quantity added by f (for Add)
        bool removes = false;
        switch (f.kind) {
        case Updater::Kind::Add: bump = f.quant; break;
        case Updater::Kind::Sub:
        case Updater::Kind::With: removes = true; break;
        case Updater::Kind::Id: break;
        }

        Type cur = located.type;
        // Located type update. An amount selection subtracts from the pool it
        // selected from, so the pool update happens in the step below.
        if (!located.steps.empty() &&
            located.steps.back().kind == Step::Kind::AmountSelect) {
            cur = located.steps.back().parent;
            if (removes) cur.quant = quant_sub(cur.quant.value_or(TypeQuant::Any),
                                               located.steps.back().sel);
        } else if (!located.steps.empty() &&
                   located.steps.back().kind == Step::Kind::FilterSelect) {
            cur = located.steps.back().parent;
            if (removes)
                cur.quant = quant_sub(cur.quant.value_or(TypeQuant::Any),
                                      located.steps.back().sel);
        } else {
            cur = apply_updater(f, cur);
        }

        // Rebuild parent types bottom-up.
        size_t n = located.steps.size();
        for (size_t idx = n; idx-- > 0;) {
            const Step& s = located.steps[idx];
            if (s.kind == Step::Kind::AmountSelect || s.kind == Step::Kind::FilterSelect) {
                // cur already is the updated parent (pool/table).
                continue;
            }
            Type parent = s.parent;
            if (s.kind == Step::Kind::Field) {
                auto* rec = std::get_if<RecordBase>(&parent.base);
                ResolvedBase pr = resolve(s.parent.base);
                if (!rec) {
                    // Named record type: the field update stays internal to
                    // the declaration; only the record's own quantity moves.
                    rec = nullptr;
                }
                if (rec) {
                    RecordBase nb = *rec;
                    for (RecordField& g : nb.fields)
                        if (g.name == s.field) g.type = cur;
                    parent.base = std::move(nb);
                } else if (auto* prec = std::get_if<RecordBase>(&pr.base)) {
                    (void)prec; // named record: declared field types stay put
                }
                TypeQuant pq = parent.quant.value_or(TypeQuant::Any);
                if (bump != TypeQuant::Empty)
                    parent.quant = quant_add(pq, bump == TypeQuant::Any ? TypeQuant::Any
                                                                        : TypeQuant::One);
                else if (removes)
                    parent.quant = quant_join(pq, TypeQuant::Empty);
                cur = std::move(parent);
            } else { // KeySelect
                auto* table = std::get_if<TableBase>(&parent.base);
                ResolvedBase pr = resolve(s.parent.base);
                if (!table) table = std::get_if<TableBase>(&pr.base);
                if (table) {
                    TableBase nb = *table;
                    Type elem0 = materialize(*nb.elem, QuantPos::Elem);
                    Type joined = s.map_table ? type_join(elem0, cur)
                                              : type_join(elem0, Type{elem0.quant, cur.base});
                    nb.elem = std::make_shared<const Type>(std::move(joined));
                    if (std::holds_alternative<TableBase>(parent.base))
                        parent.base = std::move(nb);
                }
                TypeQuant pq = parent.quant.value_or(TypeQuant::Any);
                if (s.map_table) {
                    // Upsert may add a row.
                    if (bump != TypeQuant::Empty) parent.quant = quant_add(pq, TypeQuant::Any);
                } else {
                    if (bump != TypeQuant::Empty)
                        parent.quant = quant_add(pq, bump == TypeQuant::Any ? TypeQuant::Any
                                                                            : TypeQuant::One);
                    else if (removes)
                        parent.quant = quant_sub(pq, TypeQuant::One);
                }
                cur = std::move(parent);
            }
        }
        env.set(*located.root, std::move(cur));
        return true;
    }

    // ---- statements ----

    bool do_stmt(TypeEnv& env, Span span, const FlowStmt& flow) {
        if (loc_is<ConsumeLoc>(flow.dest)) {
            auto src = type_locator(env, Mode::Source, Updater::with(TypeQuant::Empty),
                                    flow.source);
            if (!src) return false;
            ResolvedBase r = resolve(element_base(src->base));
            if (r.modifiers.has(Modifier::Asset) && !r.modifiers.has(Modifier::Consumable)) {
                diags_.error(span, "NotConsumable",
                             "cannot consume " + display_type_name(element_base(src->base)) +
                                 ": only assets marked consumable may be consumed");
                return false;
            }
            return true;
        }
        auto src = type_locator(env, Mode::Source, Updater::with(TypeQuant::Empty), flow.source);
        if (!src) return false;
        TypeQuant q = src->quant.value_or(TypeQuant::Any);
        auto dst = type_locator(env, Mode::Dest, Updater::add(q), flow.dest);
        if (!dst) return false;
        if (!flow_base_compat(src->base, dst->base)) {
            diags_.error(span, "BaseTypeMismatch",
                         "cannot flow " + display_type_name(src->base) + " into " +
                             display_type_name(dst->base));
            return false;
        }
        return true;
    }

    bool do_stmt(TypeEnv& env, Span span, const FlowTransformStmt& ft) {
        return ft.call.is_new ? do_new(env, span, ft) : do_call(env, span, ft);
    }

    bool do_stmt(TypeEnv& env, Span span, const TryCatchStmt& tc) {
        TypeEnv tryEnv = env;
        for (const Stmt& s : tc.try_body) check_stmt(tryEnv, s);
        TypeEnv catchEnv = env;
        for (const Stmt& s : tc.catch_body) check_stmt(catchEnv, s);

        TypeEnv merged;
        for (const auto& [name, t1] : tryEnv.entries()) {
            const Type* t2 = catchEnv.find(name);
            if (!t2) {
                if (!droppable(t1)) {
                    diags_.error(span, "BranchEnvMismatch",
                                 "variable " + name +
                                     " holds assets but is bound in only the try branch");
                    return false;
                }
                continue;
            }
            if (!base_equal(t1.base, t2->base)) {
                diags_.error(span, "BranchEnvMismatch",
                             "variable " + name + " has different base types per branch");
                return false;
            }
            merged.bind(name, type_join(t1, *t2));
        }
        for (const auto& [name, t2] : catchEnv.entries()) {
            if (tryEnv.find(name)) continue;
            if (!droppable(t2)) {
                diags_.error(span, "BranchEnvMismatch",
                             "variable " + name +
                                 " holds assets but is bound in only the catch branch");
                return false;
            }
        }
        env = std::move(merged);
        return true;
    }

    bool do_stmt(TypeEnv& env, Span span, const VarDeclStmt& vd) {
        if (env.contains(vd.name)) {
            diags_.error(span, "DuplicateBinding", "variable " + vd.name + " is already bound");
            return false;
        }
        if (!validate_base(vd.declared, span)) return false;
        env.bind(vd.name, make_type(TypeQuant::Empty, materialize_base(vd.declared)));
        return true;
    }

    bool do_stmt(TypeEnv&, Span span, const RevertStmt&) {
        diags_.error(span, "UnsupportedConstruct", "revert is a runtime-only form");
        return false;
    }

    // new t(args): allocates a fresh resource of type t from its arguments.
    bool do_new(TypeEnv& env, Span span, const FlowTransformStmt& ft) {
        const TransformerCall& call = ft.call;
        auto it = info_.types.find(call.name);
        if (it == info_.types.end()) {
            diags_.error(call.span, "UnknownType", "unknown type '" + call.name + "'");
            return false;
        }
        const TypeDecl& decl = *it->second;
        ResolvedBase r;
        if (!resolves(NamedBase{call.name}, r, call.span)) return false;

        size_t holes = 0;
        for (const LocArg& a : call.args) holes += a.is_hole();
        if (holes != 1) {
            diags_.error(call.span, "ArityMismatch",
                         "new " + call.name + " takes exactly one hole for the flowing value");
            return false;
        }

        auto src = type_locator(env, Mode::Source, Updater::with(TypeQuant::Empty), ft.source);
        if (!src) return false;
        TypeQuant srcq = src->quant.value_or(TypeQuant::Any);
        const BaseType& src_elem = element_base(src->base);
        TypeQuant elems = std::holds_alternative<TableBase>(src->base) &&
                                  !base_equal(src->base, src_elem)
                              ? TypeQuant::One
                              : srcq;

        Type ret;
        if (const auto* rec = std::get_if<RecordBase>(&r.base)) {
            if (call.args.size() != rec->fields.size()) {
                diags_.error(call.span, "ArityMismatch",
                             "new " + call.name + " takes " +
                                 std::to_string(rec->fields.size()) + " arguments");
                return false;
            }
            for (size_t i = 0; i < call.args.size(); ++i) {
                const BaseType& want = rec->fields[i].type.base;
                if (call.args[i].is_hole()) {
                    if (!base_equal(materialize_base(src_elem),
                                    materialize_base(want))) {
                        diags_.error(call.span, "BaseTypeMismatch",
                                     "flowing value of type " + display_type_name(src_elem) +
                                         " does not fit field " + rec->fields[i].name);
                        return false;
                    }
                    continue;
                }
                auto at = type_locator(env, Mode::Source, Updater::with(TypeQuant::Empty),
                                       *call.args[i].loc);
                if (!at) return false;
                if (!base_equal(materialize_base(at->base), materialize_base(want))) {
                    diags_.error(call.span, "BaseTypeMismatch",
                                 "argument " + std::to_string(i + 1) + " of new " + call.name +
                                     " has type " + display_type_name(at->base) + ", expected " +
                                     display_type_name(want));
                    return false;
                }
            }
            ret = make_type(scale_quant(elems, TypeQuant::One), NamedBase{call.name});
        } else {
            if (call.args.size() != 1) {
                diags_.error(call.span, "ArityMismatch",
                             "new " + call.name + " takes exactly one argument");
                return false;
            }
            if (!base_equal(materialize_base(src_elem), materialize_base(decl.base))) {
                diags_.error(call.span, "BaseTypeMismatch",
                             "new " + call.name + " constructs from " +
                                 display_type_name(decl.base) + ", got " +
                                 display_type_name(src_elem));
                return false;
            }
            TypeQuant per = info_.is_fungible_nat(NamedBase{call.name}) ? srcq : TypeQuant::One;
            ret = make_type(info_.is_fungible_nat(NamedBase{call.name})
                                ? per
                                : scale_quant(elems, per),
                            NamedBase{call.name});
        }
        return flow_into_dest(env, span, ret, ft.dest);
    }

    bool do_call(TypeEnv& env, Span span, const FlowTransformStmt& ft) {
        const TransformerCall& call = ft.call;
        auto it = info_.transformers.find(call.name);
        if (it == info_.transformers.end()) {
            diags_.error(call.span, "UnknownTransformer",
                         "unknown transformer " + call.name);
            return false;
        }
        const TransformerInfo& ti = it->second;
        if (!ti.checked) {
            diags_.error(call.span, "UnknownTransformer",
                         "transformer " + call.name + " must be declared before this use");
            return false;
        }
        if (!check_call_args(env, call.args, ti, call.span, /*filter=*/false)) return false;

        Updater srcf = ti.borrow ? Updater::id() : Updater::with(TypeQuant::Empty);
        auto src = type_locator(env, Mode::Source, srcf, ft.source);
        if (!src) return false;
        const BaseType& src_elem = element_base(src->base);
        if (!base_equal(materialize_base(src_elem), materialize_base(ti.flowing.base))) {
            diags_.error(span, "BaseTypeMismatch",
                         "cannot flow " + display_type_name(src_elem) + " into parameter " +
                             ti.decl->params.back().name + " of " + call.name);
            return false;
        }
        bool elementwise = std::holds_alternative<TableBase>(src->base) &&
                           !base_equal(src->base, ti.flowing.base);
        TypeQuant srcq = src->quant.value_or(TypeQuant::Any);
        TypeQuant per_elem = elementwise ? TypeQuant::One : srcq;
        if (!quant_le(per_elem, *ti.flowing.quant)) {
            diags_.error(span, "ArgumentMismatch",
                         "flowing argument quantity " + std::string(quant_name(per_elem)) +
                             " exceeds declared " + std::string(quant_name(*ti.flowing.quant)));
            return false;
        }
        TypeQuant total = scale_quant(elementwise ? srcq : TypeQuant::One,
                                      ti.ret.quant.value_or(TypeQuant::Any));
        Type ret = make_type(total, ti.ret.base);
        return flow_into_dest(env, span, ret, ft.dest);
    }

    bool flow_into_dest(TypeEnv& env, Span span, const Type& ret, const Locator& dest) {
        if (loc_is<ConsumeLoc>(dest)) {
            ResolvedBase r = resolve(ret.base);
            if (r.modifiers.has(Modifier::Asset) && !r.modifiers.has(Modifier::Consumable)) {
                diags_.error(span, "NotConsumable",
                             "cannot consume " + display_type_name(ret.base) +
                                 ": only assets marked consumable may be consumed");
                return false;
            }
            return true;
        }
        auto dst = type_locator(env, Mode::Dest, Updater::add(ret.quant.value_or(TypeQuant::Any)),
                                dest);
        if (!dst) return false;
        if (!flow_base_compat(ret.base, dst->base)) {
            diags_.error(span, "BaseTypeMismatch",
                         "cannot flow " + display_type_name(ret.base) + " into " +
                             display_type_name(dst->base));
            return false;
        }
        return true;
    }

    // Shared by transformer calls and filter predicates: checks the non-hole
    // (auxiliary) arguments against the declared aux types. The hole must sit
    // in the flowing (last) position.
    bool check_call_args(TypeEnv& env, const std::vector<LocArg>& args, const TransformerInfo& ti,
                         Span span, bool filter) {
        size_t arity = ti.aux.size() + 1;
        if (args.size() != arity) {
            diags_.error(span, "ArityMismatch",
                         ti.decl->name + " takes " + std::to_string(arity) + " arguments, got " +
                             std::to_string(args.size()));
            return false;
        }
        size_t holes = 0;
        for (const LocArg& a : args) holes += a.is_hole();
        if (holes != 1 || !args.back().is_hole()) {
            diags_.error(span, "ArityMismatch",
                         "exactly one hole is required, in the flowing (last) position");
            return false;
        }
        for (size_t i = 0; i + 1 < args.size(); ++i) {
            const Locator& arg = *args[i].loc;
            bool shape_ok = loc_is<VarLoc>(arg) || loc_is<NatLit>(arg) || loc_is<BoolLit>(arg) ||
                            loc_is<PureExprLoc>(arg);
            if (!shape_ok) {
                diags_.error(arg.span, "UnsupportedConstruct",
                             "auxiliary arguments must be variables, literals, or arithmetic");
                return false;
            }
            auto at = type_locator(env, Mode::Source, Updater::id(), arg);
            if (!at) return false;
            if (!base_equal(materialize_base(at->base), ti.aux[i].base)) {
                diags_.error(arg.span, "BaseTypeMismatch",
                             "argument " + std::to_string(i + 1) + " of " + ti.decl->name +
                                 " has base " + display_type_name(at->base) + ", expected " +
                                 display_type_name(ti.aux[i].base));
                return false;
            }
            if (!quant_le(at->quant.value_or(TypeQuant::Any), *ti.aux[i].quant)) {
                diags_.error(arg.span, "ArgumentMismatch",
                             "argument " + std::to_string(i + 1) + " of " + ti.decl->name +
                                 " has quantity " +
                                 std::string(quant_name(at->quant.value_or(TypeQuant::Any))) +
                                 ", exceeding declared " +
                                 std::string(quant_name(*ti.aux[i].quant)));
                return false;
            }
            // After the call the variable is retyped at the declared
            // parameter type (the callee pins it there).
            if (!filter || true) {
                if (const auto* v = std::get_if<VarLoc>(&arg.node)) env.set(v->name, ti.aux[i]);
            }
        }
        return true;
    }
};

inline CheckInfo check_program(const Program& prog, DiagnosticBag& diags) {
    Checker c(prog, diags);
    return c.run();
}

} // namespace psa
