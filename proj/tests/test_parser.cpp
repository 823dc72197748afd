#include <catch2/catch_amalgamated.hpp>

#include "psamathe/parser.hpp"
#include "psamathe/printer.hpp"

using namespace psa;

namespace {

std::vector<Token> lex_ok(std::string_view src) {
    DiagnosticBag diags("test.psa");
    auto toks = tokenize(src, diags);
    REQUIRE(!diags.has_errors());
    return toks;
}

Program parse_ok(std::string_view src) {
    DiagnosticBag diags("test.psa");
    Program p = parse_source(src, diags);
    INFO(diags.render());
    REQUIRE(!diags.has_errors());
    return p;
}

} // namespace

TEST_CASE("tokenize simple flows") {
    auto toks = lex_ok("x --> y");
    REQUIRE(toks.size() == 4); // + EOF
    CHECK(toks[0].kind == TokenKind::Ident);
    CHECK(toks[0].lexeme == "x");
    CHECK(toks[1].is_sym("-->"));
    CHECK(toks[2].lexeme == "y");
}

TEST_CASE("tokenize type declarations") {
    auto toks = lex_ok("type Token is fungible asset nat");
    std::vector<std::pair<TokenKind, std::string>> expect = {
        {TokenKind::Keyword, "type"},     {TokenKind::Ident, "Token"},
        {TokenKind::Keyword, "is"},       {TokenKind::Keyword, "fungible"},
        {TokenKind::Keyword, "asset"},    {TokenKind::Keyword, "nat"},
    };
    REQUIRE(toks.size() == expect.size() + 1);
    for (size_t i = 0; i < expect.size(); ++i) {
        CHECK(toks[i].kind == expect[i].first);
        CHECK(toks[i].lexeme == expect[i].second);
    }
}

TEST_CASE("tokenize filters") {
    auto toks = lex_ok("tickets[nonempty st ticketWins(winNum, _)]");
    std::vector<std::string> lexemes;
    for (const auto& t : toks)
        if (t.kind != TokenKind::Eof) lexemes.push_back(t.lexeme);
    CHECK(lexemes == std::vector<std::string>{"tickets", "[", "nonempty", "st", "ticketWins",
                                              "(", "winNum", ",", "_", ")", "]"});
    CHECK(toks[2].kind == TokenKind::Keyword);
    CHECK(toks[3].kind == TokenKind::Keyword);
}

TEST_CASE("tokenize rejects stray characters with spans") {
    DiagnosticBag diags("test.psa");
    tokenize("x --> $y", diags);
    REQUIRE(diags.has_errors());
    CHECK(diags.all()[0].span.line == 1);
    CHECK(diags.all()[0].span.col == 7);
}

TEST_CASE("spans are ordered and non-overlapping") {
    auto toks = lex_ok("balance --> lotteryOwner.balance\ntickets --> consume");
    for (size_t i = 1; i + 1 < toks.size(); ++i) {
        const Token& a = toks[i - 1];
        const Token& b = toks[i];
        bool ordered = a.span.line < b.span.line ||
                       (a.span.line == b.span.line && a.span.col + a.span.len <= b.span.col);
        CHECK(ordered);
    }
}

TEST_CASE("parse a field-destination flow") {
    Program p = parse_ok("balance --> lotteryOwner.balance");
    REQUIRE(p.body.size() == 1);
    const auto& flow = std::get<FlowStmt>(p.body[0].node);
    CHECK(loc_as<VarLoc>(flow.source).name == "balance");
    const auto& field = loc_as<FieldAcc>(flow.dest);
    CHECK(field.field == "balance");
    CHECK(loc_as<VarLoc>(*field.of).name == "lotteryOwner");
}

TEST_CASE("parse a consume destination") {
    Program p = parse_ok("tickets --> consume");
    REQUIRE(p.body.size() == 1);
    const auto& flow = std::get<FlowStmt>(p.body[0].node);
    CHECK(loc_as<VarLoc>(flow.source).name == "tickets");
    CHECK(loc_is<ConsumeLoc>(flow.dest));
}

TEST_CASE("reversed flows desugar to source --> dest") {
    Program p = parse_ok("var user : User <-- users[one such that P(_)]");
    REQUIRE(p.body.size() == 1);
    const auto& flow = std::get<FlowStmt>(p.body[0].node);

    const auto& filter = loc_as<FilterLoc>(flow.source);
    CHECK(loc_as<VarLoc>(*filter.from).name == "users");
    CHECK(filter.quant == TypeQuant::One);
    CHECK(filter.pred == "P");
    REQUIRE(filter.args.size() == 1);
    CHECK(filter.args[0].is_hole());

    const auto& def = loc_as<VarDefLoc>(flow.dest);
    CHECK(def.name == "user");
    CHECK(std::get<NamedBase>(def.declared).name == "User");
}

TEST_CASE("flow-through-transformer statements") {
    Program p = parse_ok("winners --> payEach(jackpot / length(winners), _) --> pool.balance");
    REQUIRE(p.body.size() == 1);
    const auto& ft = std::get<FlowTransformStmt>(p.body[0].node);
    CHECK(!ft.call.is_new);
    CHECK(ft.call.name == "payEach");
    REQUIRE(ft.call.args.size() == 2);
    CHECK(loc_is<PureExprLoc>(*ft.call.args[0].loc));
    CHECK(ft.call.args[1].is_hole());
}

TEST_CASE("amount selection chains after key selection") {
    Program p = parse_ok("account[src][amount] --> account[dst]");
    const auto& flow = std::get<FlowStmt>(p.body[0].node);
    const auto& outer = loc_as<SelectLoc>(flow.source);
    CHECK(loc_as<VarLoc>(*outer.key).name == "amount");
    const auto& inner = loc_as<SelectLoc>(*outer.from);
    CHECK(loc_as<VarLoc>(*inner.from).name == "account");
    CHECK(loc_as<VarLoc>(*inner.key).name == "src");
}

TEST_CASE("a bracket on a new line starts a new statement") {
    Program p = parse_ok("x --> y\n[a, b] --> z");
    REQUIRE(p.body.size() == 2);
    CHECK(loc_is<VarLoc>(std::get<FlowStmt>(p.body[0].node).dest));
    CHECK(loc_is<ListLit>(std::get<FlowStmt>(p.body[1].node).source));
}

TEST_CASE("transformer declarations carry params, return, and body") {
    Program p = parse_ok(R"(transformer transfer(account : any table(owner) Token, src : any address, dst : any address, amount : any nat) -> success : one bool {
    account[src][amount] --> account[dst]
    true --> success
}
)");
    REQUIRE(p.transformers.size() == 1);
    const auto& d = p.transformers[0];
    CHECK(d.name == "transfer");
    REQUIRE(d.params.size() == 4);
    CHECK(d.params[0].name == "account");
    CHECK(d.params[0].type.quant == TypeQuant::Any);
    CHECK(d.params[1].type.quant == TypeQuant::Any);
    // address desugars to nat
    CHECK(std::holds_alternative<NatBase>(d.params[1].type.base));
    CHECK(d.ret.name == "success");
    CHECK(d.ret.type.quant == TypeQuant::One);
    CHECK(d.body.size() == 2);
}

TEST_CASE("omitted quantities parse as absent") {
    Program p = parse_ok("transformer f(x : nat) -> y : bool {\n    true --> y\n}\n");
    CHECK(!p.transformers[0].params[0].type.quant.has_value());
    CHECK(!p.transformers[0].ret.type.quant.has_value());
}

TEST_CASE("try/catch statements nest") {
    Program p = parse_ok("try {\n    a --> b\n} catch {\n    try {\n        c --> d\n    } catch {\n    }\n}");
    const auto& tc = std::get<TryCatchStmt>(p.body[0].node);
    REQUIRE(tc.try_body.size() == 1);
    REQUIRE(tc.catch_body.size() == 1);
    CHECK(std::holds_alternative<TryCatchStmt>(tc.catch_body[0].node));
}

TEST_CASE("error recovery produces one diagnostic per broken statement") {
    DiagnosticBag diags("test.psa");
    parse_source("x --> --> y\n5 + --> z\nvar : nat\nok --> fine", diags);
    int errors = 0;
    for (const auto& d : diags.all())
        if (d.severity == Severity::Error) ++errors;
    CHECK(errors >= 3);
    // Recovery still parses the healthy trailing statement.
}

TEST_CASE("parser is deterministic") {
    std::string src = "type T is asset nat\n5 --> var x : nat\nx --> var y : T\n";
    DiagnosticBag d1("a.psa"), d2("a.psa");
    std::string p1 = print_program(parse_source(src, d1));
    std::string p2 = print_program(parse_source(src, d2));
    CHECK(p1 == p2);
}

TEST_CASE("pretty-print then re-parse is a fixpoint") {
    std::string src = R"(type Token is fungible asset nat
type Ticket is consumable asset { owner : TicketOwner, guess : nat }

transformer f(pot : any Token, amt : any nat, t : one Ticket) -> done : one bool {
    t --> consume
    try {
        pot[amt] --> var grabbed : Token
        grabbed --> pot
    } catch {
    }
    true --> done
}

var tickets : list Ticket
var pool : table(owner) Token
100 --> new Token(_) --> pool[1]
pool[1][2 * (3 + 4)] --> pool[2]
tickets[one st f(pool, jackpot / length(tickets), _)] --> consume
)";
    DiagnosticBag d1("a.psa");
    Program p1 = parse_source(src, d1);
    INFO(d1.render());
    REQUIRE(!d1.has_errors());
    std::string printed = print_program(p1);

    DiagnosticBag d2("a.psa");
    Program p2 = parse_source(printed, d2);
    INFO(printed);
    REQUIRE(!d2.has_errors());
    CHECK(print_program(p2) == printed);
}

TEST_CASE("quantity-stripped printing removes optional annotations only") {
    std::string src = "transformer f(x : any nat, t : one nat) -> y : one bool {\n"
                      "    true --> y\n}\n\nstuff[one st f(5, _)] --> var z : nat\n";
    DiagnosticBag d("a.psa");
    Program p = parse_source(src, d);
    REQUIRE(!d.has_errors());
    PrintOptions strip;
    strip.strip_quantities = true;
    std::string out = print_program(p, strip);
    CHECK(out.find("any nat") == std::string::npos);
    CHECK(out.find("one bool") == std::string::npos);
    CHECK(out.find("one st f") != std::string::npos); // filter quantity is structural
}
