#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hilfer/expr.hpp"

using namespace hilfer::expr;

TEST_CASE("literals, variables, arithmetic") {
    CHECK(parse("2 + 3*4").eval({}) == 14.0);
    CHECK(parse("x").eval({{"x", 3.5}}) == 3.5);
    CHECK(parse("1.5e2").eval({}) == 150.0);
    CHECK(parse(".5").eval({}) == 0.5);
    CHECK(parse("t - 1*x + y").eval({{"t", 1.5}, {"x", 2.0}, {"y", 0.3}}) ==
          doctest::Approx(-0.2).epsilon(1e-15));
}

TEST_CASE("the impulse map of the worked example") {
    Expr phi0 = parse("t - 0*x + y");
    CHECK(phi0.eval({{"t", 0.7}, {"x", 123.0}, {"y", 1.305}}) == doctest::Approx(2.005));
    // structure: ((t - (0 * x)) + y)
    CHECK(phi0.root()->kind == ast::Kind::Binary);
    CHECK(phi0.root()->op == '+');
}

TEST_CASE("power is right-associative and tighter than unary minus") {
    CHECK(parse("2^3^2").eval({}) == 512.0);
    CHECK(parse("-2^2").eval({}) == -4.0);
    CHECK(parse("2^-1").eval({}) == 0.5);
}

TEST_CASE("functions") {
    CHECK(parse("abs(x)").eval({{"x", -4.0}}) == 4.0);
    CHECK(parse("min(2, max(3, 1))").eval({}) == 2.0);
    CHECK(parse("pow(2, 10)").eval({}) == 1024.0);
    CHECK(parse("exp(ln(7))").eval({}) == doctest::Approx(7.0));
    CHECK(parse("sin(0) + cos(0)").eval({}) == 1.0);
    CHECK(parse("sqrt(16)").eval({}) == 4.0);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(parse("1/x").eval({{"x", 0.0}}), DomainError);
    CHECK_THROWS_AS(parse("ln(x)").eval({{"x", 0.0}}), DomainError);
    CHECK_THROWS_AS(parse("ln(x)").eval({{"x", -2.0}}), DomainError);
    CHECK_THROWS_AS(parse("x^(0-1)").eval({{"x", 0.0}}), DomainError);
    CHECK_THROWS_AS(parse("pow(x, 0-2)").eval({{"x", 0.0}}), DomainError);
    CHECK_THROWS_AS(parse("sqrt(0-1)").eval({}), DomainError);
}

TEST_CASE("missing binding") {
    CHECK_THROWS_AS(parse("t + x").eval({{"t", 1.0}}), MissingBindingError);
}

TEST_CASE("syntax errors carry offsets and expected sets") {
    try {
        parse("1 + ");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 4);
        CHECK(!e.expected.empty());
    }
    try {
        parse("(1 + 2");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset == 6);
    }
    CHECK_THROWS_AS(parse("2 @ 3"), ParseError);
    CHECK_THROWS_AS(parse("min(1)"), ParseError);  // arity
}

TEST_CASE("unknown identifiers") {
    try {
        parse("t + foo");
        FAIL("expected UnknownIdentifierError");
    } catch (const UnknownIdentifierError& e) {
        CHECK(e.offset == 4);
    }
    CHECK_THROWS_AS(parse("z"), UnknownIdentifierError);
}

TEST_CASE("uses() reports free variables") {
    CHECK(parse("t - 0*x + y").uses("y"));
    CHECK(!parse("t*t").uses("x"));
}

// ---------------------------------------------------------------------------
// randomized structural properties
// ---------------------------------------------------------------------------

namespace {

struct Gen {
    std::mt19937 rng;
    explicit Gen(unsigned seed) : rng(seed) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    // builds a random source string and its fully parenthesized equivalent
    std::pair<std::string, std::string> build(int depth) {
        if (depth <= 0) {
            switch (pick(4)) {
                case 0: return {"t", "t"};
                case 1: return {"x", "x"};
                case 2: return {"y", "y"};
                default: {
                    double v = std::uniform_real_distribution<double>(0.0, 9.5)(rng);
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.3f", v);
                    return {buf, buf};
                }
            }
        }
        auto [a, pa] = build(depth - 1);
        auto [b, pb] = build(depth - 1);
        switch (pick(6)) {
            case 0: return {a + " + " + b, "(" + pa + " + " + pb + ")"};
            case 1: return {a + " - (" + b + ")", "(" + pa + " - (" + pb + "))"};
            case 2: return {a + " * (" + b + ")", "(" + pa + " * (" + pb + "))"};
            case 3: return {"abs(" + a + ")", "abs(" + pa + ")"};
            case 4: return {"min(" + a + ", " + b + ")", "min(" + pa + ", " + pb + ")"};
            default: return {"cos(" + a + ") * " + b, "(cos(" + pa + ") * " + pb + ")"};
        }
    }
};

}  // namespace

TEST_CASE("round trip: parse -> pretty -> parse is structurally identical") {
    Gen gen(12345);
    for (int i = 0; i < 200; ++i) {
        auto [src, _] = gen.build(3);
        Expr e1 = parse(src);
        Expr e2 = parse(e1.pretty());
        CHECK(structurally_equal(e1, e2));
        CHECK(e2.pretty() == e1.pretty());
    }
}

TEST_CASE("precedence: source equals fully parenthesized equivalent") {
    Gen gen(777);
    Bindings b{{"t", 0.7}, {"x", -1.3}, {"y", 2.1}};
    for (int i = 0; i < 200; ++i) {
        auto [src, paren] = gen.build(3);
        double v1 = parse(src).eval(b);
        double v2 = parse(paren).eval(b);
        CHECK(v1 == v2);  // identical operation order, bit-identical
    }
}

TEST_CASE("determinism: repeated evaluation is bit-identical") {
    Expr e = parse("exp(sin(t) * x) - y/(1 + abs(x))");
    Bindings b{{"t", 0.3}, {"x", 1.7}, {"y", -0.9}};
    double first = e.eval(b);
    for (int i = 0; i < 10; ++i) CHECK(e.eval(b) == first);
}
