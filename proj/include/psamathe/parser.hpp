#pragma once

#include <string>
#include <utility>
#include <vector>

#include "psamathe/ast.hpp"
#include "psamathe/lexer.hpp"

namespace psa {

// Recursive-descent parser for the surface syntax. Reports one diagnostic per
// syntax error and resynchronizes at statement boundaries (the next source
// line, or a closing brace).
class Parser {
public:
    Parser(std::vector<Token> tokens, DiagnosticBag& diags)
        : toks_(std::move(tokens)), diags_(diags) {}

    Program parse_program() {
        Program prog;
        while (!at_eof()) {
            try {
                if (peek().is_kw("type")) {
                    prog.types.push_back(parse_type_decl());
                } else if (peek().is_kw("transformer")) {
                    prog.transformers.push_back(parse_transformer_decl());
                } else {
                    prog.body.push_back(parse_stmt());
                }
            } catch (const Bail&) {
                synchronize();
            }
        }
        return prog;
    }

private:
    struct Bail {};

    std::vector<Token> toks_;
    DiagnosticBag& diags_;
    size_t pos_ = 0;

    const Token& peek(size_t k = 0) const {
        size_t i = pos_ + k;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& prev() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }
    bool at_eof() const { return peek().kind == TokenKind::Eof; }
    const Token& advance() {
        const Token& t = peek();
        if (!at_eof()) ++pos_;
        return t;
    }
    bool match_sym(std::string_view s) {
        if (peek().is_sym(s)) {
            advance();
            return true;
        }
        return false;
    }
    bool match_kw(std::string_view s) {
        if (peek().is_kw(s)) {
            advance();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const Token& at, std::string msg) {
        diags_.error(at.span, std::move(msg));
        throw Bail{};
    }
    const Token& expect_sym(std::string_view s) {
        if (!peek().is_sym(s)) fail(peek(), "expected '" + std::string(s) + "', got '" + describe(peek()) + "'");
        return advance();
    }
    const Token& expect_kw(std::string_view s) {
        if (!peek().is_kw(s)) fail(peek(), "expected '" + std::string(s) + "', got '" + describe(peek()) + "'");
        return advance();
    }
    std::string expect_ident(std::string_view what) {
        if (peek().kind != TokenKind::Ident)
            fail(peek(), "expected " + std::string(what) + ", got '" + describe(peek()) + "'");
        return advance().lexeme;
    }
    static std::string describe(const Token& t) {
        return t.kind == TokenKind::Eof ? "end of input" : t.lexeme;
    }

    // Skip to the next line (or closing brace) after an error.
    void synchronize() {
        int errLine = peek().span.line;
        while (!at_eof()) {
            if (peek().is_sym("}")) return;
            if (peek().span.line > errLine) return;
            advance();
        }
    }

    // ---- types ----

    static bool is_quant_kw(const Token& t) {
        return t.is_kw("one") || t.is_kw("any") || t.is_kw("nonempty") || t.is_kw("empty");
    }
    static TypeQuant quant_of(const Token& t) {
        if (t.lexeme == "one") return TypeQuant::One;
        if (t.lexeme == "any") return TypeQuant::Any;
        if (t.lexeme == "nonempty") return TypeQuant::Nonempty;
        return TypeQuant::Empty;
    }

    Type parse_type() {
        Type t;
        if (is_quant_kw(peek())) t.quant = quant_of(advance());
        t.base = parse_base_type();
        return t;
    }

    BaseType parse_base_type() {
        if (match_kw("bool")) return BoolBase{};
        if (match_kw("nat")) return NatBase{};
        if (match_kw("address")) return NatBase{}; // builtin alias
        if (peek().kind == TokenKind::Ident) return NamedBase{advance().lexeme};
        if (match_kw("list")) {
            TableBase tb;
            tb.elem = std::make_shared<const Type>(parse_type());
            return tb;
        }
        if (match_kw("table")) {
            TableBase tb;
            expect_sym("(");
            if (!peek().is_sym(")")) {
                tb.keys.push_back(expect_ident("key name"));
                while (match_sym(",")) tb.keys.push_back(expect_ident("key name"));
            }
            expect_sym(")");
            tb.elem = std::make_shared<const Type>(parse_type());
            return tb;
        }
        if (peek().is_sym("{")) {
            advance();
            RecordBase rec;
            while (!peek().is_sym("}") && !at_eof()) {
                RecordField f;
                f.name = expect_ident("field name");
                expect_sym(":");
                f.type = parse_type();
                if (!match_sym(",") && !peek().is_sym("}"))
                    fail(peek(), "expected ',' or '}' in record type");
            }
            expect_sym("}");
            return rec;
        }
        fail(peek(), "expected a type, got '" + describe(peek()) + "'");
    }

    // ---- declarations ----

    TypeDecl parse_type_decl() {
        TypeDecl d;
        d.span = peek().span;
        expect_kw("type");
        d.name = expect_ident("type name");
        expect_kw("is");
        for (;;) {
            if (match_kw("fungible")) d.modifiers.insert(Modifier::Fungible);
            else if (match_kw("unique")) d.modifiers.insert(Modifier::Unique);
            else if (match_kw("immutable")) d.modifiers.insert(Modifier::Immutable);
            else if (match_kw("consumable")) d.modifiers.insert(Modifier::Consumable);
            else if (match_kw("asset")) d.modifiers.insert(Modifier::Asset);
            else break;
        }
        d.base = parse_base_type();
        return d;
    }

    TransformerDecl parse_transformer_decl() {
        TransformerDecl d;
        d.span = peek().span;
        expect_kw("transformer");
        d.name = expect_ident("transformer name");
        expect_sym("(");
        if (!peek().is_sym(")")) {
            d.params.push_back(parse_param());
            while (match_sym(",")) d.params.push_back(parse_param());
        }
        expect_sym(")");
        if (d.params.empty())
            diags_.error(d.span, "transformer '" + d.name +
                                     "' needs at least one parameter (the flowing parameter)");
        expect_sym("->");
        d.ret.span = peek().span;
        d.ret.name = expect_ident("return variable name");
        expect_sym(":");
        d.ret.type = parse_type();
        expect_sym("{");
        d.body = parse_stmt_block();
        expect_sym("}");
        return d;
    }

    Param parse_param() {
        Param p;
        p.span = peek().span;
        p.name = expect_ident("parameter name");
        expect_sym(":");
        p.type = parse_type();
        return p;
    }

    // ---- statements ----

    std::vector<Stmt> parse_stmt_block() {
        std::vector<Stmt> out;
        while (!peek().is_sym("}") && !at_eof()) {
            try {
                out.push_back(parse_stmt());
            } catch (const Bail&) {
                synchronize();
            }
        }
        return out;
    }

    Stmt parse_stmt() {
        Span span = peek().span;
        if (match_kw("try")) {
            TryCatchStmt tc;
            expect_sym("{");
            tc.try_body = parse_stmt_block();
            expect_sym("}");
            expect_kw("catch");
            expect_sym("{");
            tc.catch_body = parse_stmt_block();
            expect_sym("}");
            return Stmt{span, std::move(tc)};
        }
        Locator lhs = parse_locator();
        if (match_sym("<--")) {
            Locator rhs = parse_locator();
            return Stmt{span, FlowStmt{std::move(rhs), std::move(lhs)}};
        }
        if (loc_is<VarDefLoc>(lhs) && !peek().is_sym("-->")) {
            auto& def = std::get<VarDefLoc>(lhs.node);
            return Stmt{span, VarDeclStmt{std::move(def.name), std::move(def.declared)}};
        }
        expect_sym("-->");
        if (peek().is_kw("new") ||
            (peek().kind == TokenKind::Ident && peek(1).is_sym("("))) {
            FlowTransformStmt ft;
            ft.source = std::move(lhs);
            ft.call = parse_trfm_call();
            expect_sym("-->");
            ft.dest = parse_locator();
            return Stmt{span, std::move(ft)};
        }
        Locator dest = parse_locator();
        return Stmt{span, FlowStmt{std::move(lhs), std::move(dest)}};
    }

    TransformerCall parse_trfm_call() {
        TransformerCall call;
        call.span = peek().span;
        call.is_new = match_kw("new");
        call.name = expect_ident(call.is_new ? "type name" : "transformer name");
        expect_sym("(");
        call.args = parse_args();
        expect_sym(")");
        return call;
    }

    std::vector<LocArg> parse_args() {
        std::vector<LocArg> args;
        if (peek().is_sym(")")) return args;
        for (;;) {
            LocArg arg;
            arg.span = peek().span;
            if (match_sym("_")) {
                arg.loc = std::nullopt;
            } else {
                arg.loc = parse_locator();
            }
            args.push_back(std::move(arg));
            if (!match_sym(",")) break;
        }
        return args;
    }

    // ---- locators (with pure natural arithmetic) ----

    Locator parse_locator() {
        Span span = peek().span;
        ArithExpr e = parse_additive();
        if (auto* leaf = std::get_if<ALeaf>(&e.node)) return std::move(*leaf->loc);
        return Locator{span, PureExprLoc{std::move(e)}};
    }

    // Binary operators must start on the same line as their left operand;
    // there are no statement separators.
    bool op_on_same_line() const { return peek().span.line == prev().span.line; }

    ArithExpr parse_additive() {
        ArithExpr lhs = parse_multiplicative();
        while ((peek().is_sym("+") || peek().is_sym("-")) && op_on_same_line()) {
            ArithOp op = advance().lexeme == "+" ? ArithOp::Add : ArithOp::Sub;
            ArithExpr rhs = parse_multiplicative();
            ABinary bin{op, std::make_shared<ArithExpr>(std::move(lhs)),
                        std::make_shared<ArithExpr>(std::move(rhs))};
            lhs = ArithExpr{std::move(bin)};
        }
        return lhs;
    }

    ArithExpr parse_multiplicative() {
        ArithExpr lhs = parse_factor();
        while ((peek().is_sym("*") || peek().is_sym("/")) && op_on_same_line()) {
            ArithOp op = advance().lexeme == "*" ? ArithOp::Mul : ArithOp::Div;
            ArithExpr rhs = parse_factor();
            ABinary bin{op, std::make_shared<ArithExpr>(std::move(lhs)),
                        std::make_shared<ArithExpr>(std::move(rhs))};
            lhs = ArithExpr{std::move(bin)};
        }
        return lhs;
    }

    ArithExpr parse_factor() {
        if (peek().kind == TokenKind::Ident && peek().lexeme == "length" && peek(1).is_sym("(")) {
            advance();
            advance();
            ALength len{std::make_shared<Locator>(parse_locator())};
            expect_sym(")");
            return ArithExpr{std::move(len)};
        }
        if (peek().is_sym("(")) {
            advance();
            ArithExpr inner = parse_additive();
            expect_sym(")");
            return inner;
        }
        return ArithExpr{ALeaf{std::make_shared<Locator>(parse_postfix())}};
    }

    Locator parse_postfix() {
        Locator loc = parse_primary();
        for (;;) {
            if (peek().is_sym(".")) {
                advance();
                FieldAcc fa;
                fa.of = std::make_shared<Locator>(std::move(loc));
                Span span = fa.of->span;
                fa.field = expect_ident("field name");
                loc = Locator{span, std::move(fa)};
                continue;
            }
            // A '[' on a fresh line starts a new statement, not a selection.
            if (peek().is_sym("[") && peek().span.line == prev().span.line) {
                advance();
                loc = parse_selector(std::move(loc));
                expect_sym("]");
                continue;
            }
            break;
        }
        return loc;
    }

    Locator parse_selector(Locator from) {
        Span span = from.span;
        if (is_quant_kw(peek())) {
            FilterLoc f;
            f.from = std::make_shared<Locator>(std::move(from));
            f.quant = quant_of(advance());
            if (!match_kw("st")) {
                expect_kw("such");
                expect_kw("that");
            }
            f.pred = expect_ident("predicate name");
            expect_sym("(");
            f.args = parse_args();
            expect_sym(")");
            return Locator{span, std::move(f)};
        }
        SelectLoc sel;
        sel.from = std::make_shared<Locator>(std::move(from));
        sel.key = std::make_shared<Locator>(parse_locator());
        return Locator{span, std::move(sel)};
    }

    Locator parse_primary() {
        Span span = peek().span;
        if (peek().kind == TokenKind::Natural) {
            NatLit lit{Nat(advance().lexeme)};
            return Locator{span, std::move(lit)};
        }
        if (match_kw("true")) return Locator{span, BoolLit{true}};
        if (match_kw("false")) return Locator{span, BoolLit{false}};
        if (match_kw("consume")) return Locator{span, ConsumeLoc{}};
        if (peek().kind == TokenKind::Ident) return Locator{span, VarLoc{advance().lexeme}};
        if (match_kw("var")) {
            VarDefLoc vd;
            vd.name = expect_ident("variable name");
            expect_sym(":");
            // A quantity annotation here is legal but carries no meaning:
            // newly defined variables are always empty.
            vd.declared = parse_type().base;
            return Locator{span, std::move(vd)};
        }
        if (match_sym("[")) {
            ListLit list;
            if (!peek().is_sym("]")) {
                list.elems.push_back(parse_locator());
                while (match_sym(",")) {
                    if (peek().is_sym("]")) break;
                    list.elems.push_back(parse_locator());
                }
            }
            expect_sym("]");
            return Locator{span, std::move(list)};
        }
        if (match_kw("copy")) {
            expect_sym("(");
            CopyLoc c{std::make_shared<Locator>(parse_locator())};
            expect_sym(")");
            return Locator{span, std::move(c)};
        }
        if (match_kw("zip")) {
            expect_sym("(");
            ZipLoc z;
            if (!peek().is_sym(")")) {
                z.parts.push_back(parse_locator());
                while (match_sym(",")) z.parts.push_back(parse_locator());
            }
            expect_sym(")");
            return Locator{span, std::move(z)};
        }
        fail(peek(), "expected a locator, got '" + describe(peek()) + "'");
    }
};

inline Program parse_tokens(std::vector<Token> tokens, DiagnosticBag& diags) {
    Parser p(std::move(tokens), diags);
    return p.parse_program();
}

inline Program parse_source(std::string_view src, DiagnosticBag& diags) {
    return parse_tokens(tokenize(src, diags), diags);
}

} // namespace psa
