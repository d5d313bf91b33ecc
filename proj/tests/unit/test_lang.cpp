#include <doctest.h>

#include <random>

#include "dfv/lang/parser.hpp"
#include "dfv/lang/pretty.hpp"
#include "dfv/lang/typecheck.hpp"

using namespace dfv;
using namespace dfv::lang;

TEST_CASE("counter node parses to arrow of literal and pre plus one")
{
    Program p = parse("node C(i: bool) returns (c: int); let c = 0 -> pre c + 1; tel");
    REQUIRE(p.nodes.size() == 1);
    const auto& eq = p.nodes[0].equations.at(0);
    Expr want = Expr::make_arrow(Expr::make_literal(Value::integer(0)),
                                 Expr::make_binary(BinaryOp::Add, Expr::make_pre(Expr::make_var("c")),
                                                   Expr::make_literal(Value::integer(1))));
    CHECK(same_structure(eq.rhs, want));
}

TEST_CASE("empty file yields empty program")
{
    Program p = parse("");
    CHECK(p.nodes.empty());
    CHECK(p.externs.empty());
    CHECK(parse("  -- only a comment\n(* block *)\n").nodes.empty());
}

TEST_CASE("assertion with implication and pre keeps subterm shape")
{
    Program p = parse(R"(
node F(Engage: bool; In, Gamma: real) returns (P, Q: real);
let
  Q = 0.0 -> pre(Q) + 1.0;
  P = Q;
  assert true -> (Engage and In > Gamma => P > pre(Q));
tel
)");
    const Expr& a = p.nodes[0].assertions.at(0);
    REQUIRE(a.kind == Expr::Kind::Arrow);
    const Expr& imp = a.args[1];
    REQUIRE(imp.kind == Expr::Kind::Binary);
    CHECK(imp.binary_op == BinaryOp::Implies);
    CHECK(imp.args[0].binary_op == BinaryOp::And);
    CHECK(imp.args[1].binary_op == BinaryOp::Gt);
    CHECK(imp.args[1].args[1].kind == Expr::Kind::Pre);
}

TEST_CASE("precedence and associativity")
{
    auto e = parse_expression("a or b and not c = d + e * f");
    CHECK(pretty(e) == "a or b and not c = d + e * f");
    CHECK(parse_expression("a => b => c").args[1].binary_op == BinaryOp::Implies);
    CHECK(parse_expression("1 -> 2 -> 3").args[1].kind == Expr::Kind::Arrow);
    CHECK(parse_expression("a - b - c").args[0].binary_op == BinaryOp::Sub);
    CHECK(parse_expression("if a then 1 else 2 + 3").args[2].kind == Expr::Kind::Binary);
    CHECK_THROWS_AS((void)parse_expression("a < b < c"), ParseError);
}

TEST_CASE("syntax errors name position, found and expected")
{
    try {
        (void)parse("node N(x: real) returns (y: real);\nlet\n  y = x +;\ntel");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.pos().line == 3);
        CHECK(e.found() == "';'");
        CHECK(!e.expected().empty());
    }
    CHECK_THROWS_AS((void)parse("node N(x: real) returns (y: real); let y = x when x; tel"), ParseError);
    CHECK_THROWS_AS((void)parse("type t = int;"), ParseError);
}

TEST_CASE("property annotations")
{
    Program p = parse(R"(
node N(x: bool) returns (ok: bool);
let
  ok = x or not x;
  --!PROPERTY: ok = true;
tel
)");
    REQUIRE(p.nodes[0].properties.size() == 1);
    CHECK(p.nodes[0].properties[0].signal == "ok");
    CHECK(pretty(p).find("--!PROPERTY: ok = true;") != std::string::npos);
}

TEST_CASE("typecheck rejects instantaneous cycles and accepts guarded ones")
{
    try {
        (void)typecheck(parse("node N(i: int) returns (x: int); let x = x + 1; tel"));
        FAIL("expected a cycle");
    } catch (const TypeCheckError& e) {
        CHECK(e.kind() == TypeCheckError::Kind::CausalityCycle);
        CHECK(std::string(e.what()).find("x") != std::string::npos);
    }
    CHECK_NOTHROW((void)typecheck(parse("node N(i: int) returns (x: int); let x = 0 -> pre x + 1; tel")));
}

TEST_CASE("typecheck errors")
{
    using K = TypeCheckError::Kind;
    auto kind_of = [](const char* src) {
        try {
            (void)typecheck(parse(src));
        } catch (const TypeCheckError& e) {
            return e.kind();
        }
        FAIL("no error for " << src);
        return K::Arity;
    };
    CHECK(kind_of("node N(a: bool) returns (x: real); let x = a + 1.0; tel") == K::TypeMismatch);
    CHECK(kind_of("node N(a: real) returns (x: real); let x = a; x = a; tel") == K::MultiplyDefined);
    CHECK(kind_of("node N(a: real) returns (x: real); let x = b; tel") == K::Undefined);
    CHECK(kind_of("node N(a: real) returns (x: real); let x = N(a); tel") == K::RecursiveNode);
    CHECK(kind_of("node M(a: real) returns (y: real); let y = a; tel\n"
                  "node N(a: real) returns (x: real); let x = M(a, a); tel")
          == K::Arity);
    CHECK(kind_of("node N(a: real) returns (x: real); let x = a; --!PROPERTY: x; tel") == K::BadProperty);
}

TEST_CASE("integer literals widen to real")
{
    auto tp = typecheck(parse("node N(a: real) returns (x: real); let x = a + 1 + -2; tel"));
    CHECK(tp.node("N").equations[0].rhs.type == Type::Real);
}

TEST_CASE("call tree lists callees first")
{
    auto tp = typecheck(parse(R"(
node A(x: real) returns (y: real); let y = x; tel
node B(x: real) returns (y: real); let y = A(x); tel
node C(x: real) returns (y: real); let y = B(x) + A(x); tel
)"));
    auto order = tp.call_tree("C");
    REQUIRE(order.size() == 3);
    CHECK(order.back() == "C");
    CHECK(order.front() == "A");
}

namespace {

// Random well-formed expressions over a fixed signature for round trips.
Expr random_expr(std::mt19937& rng, int depth, Type t)
{
    std::uniform_int_distribution<int> pick(0, 9);
    int k = depth <= 0 ? 0 : pick(rng);
    if (t == Type::Bool) {
        switch (k % 8) {
        case 0: return Expr::make_var(rng() % 2 ? "p" : "q");
        case 1: return Expr::make_unary(UnaryOp::Not, random_expr(rng, depth - 1, Type::Bool));
        case 2: {
            BinaryOp ops[] = {BinaryOp::And, BinaryOp::Or, BinaryOp::Implies};
            return Expr::make_binary(ops[rng() % 3], random_expr(rng, depth - 1, Type::Bool),
                                     random_expr(rng, depth - 1, Type::Bool));
        }
        case 3: {
            BinaryOp ops[] = {BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge};
            return Expr::make_binary(ops[rng() % 6], random_expr(rng, depth - 1, Type::Real),
                                     random_expr(rng, depth - 1, Type::Real));
        }
        case 4: return Expr::make_pre(random_expr(rng, depth - 1, Type::Bool));
        case 5: return Expr::make_arrow(random_expr(rng, depth - 1, t), random_expr(rng, depth - 1, t));
        case 6:
            return Expr::make_ite(random_expr(rng, depth - 1, Type::Bool), random_expr(rng, depth - 1, t),
                                  random_expr(rng, depth - 1, t));
        default: return Expr::make_literal(Value::boolean(rng() % 2));
        }
    }
    switch (k % 8) {
    case 0: return Expr::make_var(rng() % 2 ? "x" : "y");
    case 1: return Expr::make_unary(UnaryOp::Neg, random_expr(rng, depth - 1, t));
    case 2: {
        BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div};
        return Expr::make_binary(ops[rng() % 4], random_expr(rng, depth - 1, t), random_expr(rng, depth - 1, t));
    }
    case 3: return Expr::make_pre(random_expr(rng, depth - 1, t));
    case 4: return Expr::make_arrow(random_expr(rng, depth - 1, t), random_expr(rng, depth - 1, t));
    case 5:
        return Expr::make_ite(random_expr(rng, depth - 1, Type::Bool), random_expr(rng, depth - 1, t),
                              random_expr(rng, depth - 1, t));
    case 6: {
        // parsed literals are always finite decimals
        std::int64_t dens[] = {1, 2, 4, 5};
        return Expr::make_literal(Value::real(Rational(static_cast<int>(rng() % 41) - 20, dens[rng() % 4])));
    }
    default: return Expr::make_call("F", {random_expr(rng, depth - 1, t)}, false);
    }
}

}  // namespace

TEST_CASE("pretty printing round-trips random expressions")
{
    std::mt19937 rng(11);
    for (int i = 0; i < 3000; ++i) {
        Expr e = random_expr(rng, 5, i % 2 ? Type::Bool : Type::Real);
        std::string s = pretty(e);
        Expr back = parse_expression(s);
        INFO(s);
        CHECK(same_structure(e, back));
        CHECK(pretty(back) == s);
    }
}

TEST_CASE("pretty printing round-trips whole programs")
{
    const char* src = R"(
extern sin_deg(a: real) returns (r: real);
node Sat(x, lo, hi: real) returns (y: real);
let
  y = if x < lo then lo else if x > hi then hi else x;
tel
node Top(a: real; b: bool) returns (ok: bool; z: real);
var w: real;
let
  w = Sat(a, -1.0, 1.0) + sin_deg(a);
  z = 0.0 -> pre(z) + w / 3.0;
  ok = b => z >= -(10.0);
  assert a > -5.0 and a < 5.0;
  --!PROPERTY: ok;
tel
)";
    Program p = parse(src);
    Program q = parse(pretty(p));
    CHECK(same_structure(p, q));
    CHECK(pretty(q) == pretty(p));
    CHECK_NOTHROW((void)typecheck(q));
}
