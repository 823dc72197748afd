#pragma once

#include <string>

#include "psamathe/ast.hpp"

namespace psa {

struct PrintOptions {
    // Drop every optional quantity annotation (filter quantities are
    // structural and always kept).
    bool strip_quantities = false;
};

namespace detail {

inline std::string print_type(const Type& t, const PrintOptions& opts);

inline std::string print_base(const BaseType& b, const PrintOptions& opts) {
    struct V {
        const PrintOptions& opts;
        std::string operator()(const BoolBase&) const { return "bool"; }
        std::string operator()(const NatBase&) const { return "nat"; }
        std::string operator()(const NamedBase& n) const { return n.name; }
        std::string operator()(const TableBase& t) const {
            if (t.keys.empty()) return "list " + print_type(*t.elem, opts);
            std::string out = "table(";
            for (size_t i = 0; i < t.keys.size(); ++i) {
                if (i) out += ", ";
                out += t.keys[i];
            }
            return out + ") " + print_type(*t.elem, opts);
        }
        std::string operator()(const RecordBase& r) const {
            std::string out = "{ ";
            for (size_t i = 0; i < r.fields.size(); ++i) {
                if (i) out += ", ";
                out += r.fields[i].name + " : " + print_type(r.fields[i].type, opts);
            }
            return out + " }";
        }
    };
    return std::visit(V{opts}, b);
}

inline std::string print_type(const Type& t, const PrintOptions& opts) {
    std::string out;
    if (t.quant && !opts.strip_quantities) {
        out += quant_name(*t.quant);
        out += ' ';
    }
    return out + print_base(t.base, opts);
}

inline std::string print_locator(const Locator& l, const PrintOptions& opts);

inline std::string print_args(const std::vector<LocArg>& args, const PrintOptions& opts) {
    std::string out = "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += args[i].is_hole() ? "_" : print_locator(*args[i].loc, opts);
    }
    return out + ")";
}

// Precedence: 1 additive, 2 multiplicative, 3 atoms.
inline std::string print_arith(const ArithExpr& e, const PrintOptions& opts, int parent_prec) {
    struct V {
        const PrintOptions& opts;
        int parent_prec;
        std::string operator()(const ALeaf& l) const { return print_locator(*l.loc, opts); }
        std::string operator()(const ALength& l) const {
            return "length(" + print_locator(*l.arg, opts) + ")";
        }
        std::string operator()(const ABinary& b) const {
            int prec = (b.op == ArithOp::Add || b.op == ArithOp::Sub) ? 1 : 2;
            const char* op = b.op == ArithOp::Add   ? " + "
                             : b.op == ArithOp::Sub ? " - "
                             : b.op == ArithOp::Mul ? " * "
                                                    : " / ";
            std::string out =
                print_arith(*b.lhs, opts, prec) + op + print_arith(*b.rhs, opts, prec + 1);
            if (prec < parent_prec) out = "(" + out + ")";
            return out;
        }
    };
    return std::visit(V{opts, parent_prec}, e.node);
}

inline std::string print_locator(const Locator& l, const PrintOptions& opts) {
    struct V {
        const PrintOptions& opts;
        std::string operator()(const BoolLit& b) const { return b.value ? "true" : "false"; }
        std::string operator()(const NatLit& n) const { return n.value.str(); }
        std::string operator()(const VarLoc& v) const { return v.name; }
        std::string operator()(const FieldAcc& f) const {
            return print_locator(*f.of, opts) + "." + f.field;
        }
        std::string operator()(const VarDefLoc& v) const {
            return "var " + v.name + " : " + print_base(v.declared, opts);
        }
        std::string operator()(const ListLit& lst) const {
            std::string out = "[";
            for (size_t i = 0; i < lst.elems.size(); ++i) {
                if (i) out += ", ";
                out += print_locator(lst.elems[i], opts);
            }
            return out + "]";
        }
        std::string operator()(const RecordLit& r) const {
            std::string out = "{ ";
            for (size_t i = 0; i < r.members.size(); ++i) {
                if (i) out += ", ";
                out += r.members[i].name + " : " + print_type(r.members[i].type, opts) + " |-> " +
                       print_locator(r.members[i].init, opts);
            }
            return out + " }";
        }
        std::string operator()(const CopyLoc& c) const {
            return "copy(" + print_locator(*c.inner, opts) + ")";
        }
        std::string operator()(const ZipLoc& z) const {
            std::string out = "zip(";
            for (size_t i = 0; i < z.parts.size(); ++i) {
                if (i) out += ", ";
                out += print_locator(z.parts[i], opts);
            }
            return out + ")";
        }
        std::string operator()(const SelectLoc& s) const {
            return print_locator(*s.from, opts) + "[" + print_locator(*s.key, opts) + "]";
        }
        std::string operator()(const FilterLoc& f) const {
            return print_locator(*f.from, opts) + "[" + std::string(quant_name(f.quant)) +
                   " st " + f.pred + print_args(f.args, opts) + "]";
        }
        std::string operator()(const ConsumeLoc&) const { return "consume"; }
        std::string operator()(const PureExprLoc& p) const { return print_arith(p.expr, opts, 0); }
    };
    return std::visit(V{opts}, l.node);
}

inline void print_stmts(const std::vector<Stmt>& stmts, const PrintOptions& opts, int indent,
                        std::string& out);

inline void print_stmt(const Stmt& s, const PrintOptions& opts, int indent, std::string& out) {
    std::string pad(size_t(indent) * 4, ' ');
    struct V {
        const PrintOptions& opts;
        int indent;
        std::string& out;
        const std::string& pad;
        void operator()(const FlowStmt& f) const {
            out += pad + print_locator(f.source, opts) + " --> " + print_locator(f.dest, opts) +
                   "\n";
        }
        void operator()(const FlowTransformStmt& f) const {
            out += pad + print_locator(f.source, opts) + " --> " +
                   (f.call.is_new ? "new " : "") + f.call.name + print_args(f.call.args, opts) +
                   " --> " + print_locator(f.dest, opts) + "\n";
        }
        void operator()(const TryCatchStmt& t) const {
            out += pad + "try {\n";
            print_stmts(t.try_body, opts, indent + 1, out);
            out += pad + "} catch {\n";
            print_stmts(t.catch_body, opts, indent + 1, out);
            out += pad + "}\n";
        }
        void operator()(const VarDeclStmt& v) const {
            out += pad + "var " + v.name + " : " + print_base(v.declared, opts) + "\n";
        }
        void operator()(const RevertStmt&) const { out += pad + "revert\n"; }
    };
    std::visit(V{opts, indent, out, pad}, s.node);
}

inline void print_stmts(const std::vector<Stmt>& stmts, const PrintOptions& opts, int indent,
                        std::string& out) {
    for (const Stmt& s : stmts) print_stmt(s, opts, indent, out);
}

} // namespace detail

inline std::string print_locator(const Locator& l, PrintOptions opts = {}) {
    return detail::print_locator(l, opts);
}

inline std::string print_type(const Type& t, PrintOptions opts = {}) {
    return detail::print_type(t, opts);
}

inline std::string print_program(const Program& prog, PrintOptions opts = {}) {
    std::string out;
    for (const TypeDecl& d : prog.types) {
        out += "type " + d.name + " is ";
        d.modifiers.for_each([&](Modifier m) { out += std::string(modifier_name(m)) + " "; });
        out += detail::print_base(d.base, opts) + "\n";
    }
    if (!prog.types.empty()) out += "\n";
    for (const TransformerDecl& d : prog.transformers) {
        out += "transformer " + d.name + "(";
        for (size_t i = 0; i < d.params.size(); ++i) {
            if (i) out += ", ";
            out += d.params[i].name + " : " + detail::print_type(d.params[i].type, opts);
        }
        out += ") -> " + d.ret.name + " : " + detail::print_type(d.ret.type, opts) + " {\n";
        detail::print_stmts(d.body, opts, 1, out);
        out += "}\n\n";
    }
    detail::print_stmts(prog.body, opts, 0, out);
    return out;
}

} // namespace psa
