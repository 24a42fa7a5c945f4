#include "fibcon/expression.hpp"
#include "fibcon/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace fibcon::expr;

namespace {

double at(const Expr& e, std::vector<double> x) { return e.eval(x); }

} // namespace

TEST(Parse, ExamplesFromTheTorusAndFocusFocusSystems)
{
    const auto e = parse_expression("cos(2*pi*x) + cos(2*pi*y)", 2);
    EXPECT_DOUBLE_EQ(at(e, {0, 0}), 2.0);
    EXPECT_NEAR(at(e, {0.5, 0.25}), -1.0, 1e-15);
    const auto g = parse_expression("re1*im2 + re2*im1", 4);
    EXPECT_DOUBLE_EQ(at(g, {1, 2, 3, 4}), 1 * 4 + 3 * 2);
}

TEST(Parse, Precedence)
{
    EXPECT_DOUBLE_EQ(at(parse_expression("1 + 2*3^2", 1), {0}), 19.0);
    EXPECT_DOUBLE_EQ(at(parse_expression("-x1^2", 1), {3}), -9.0);
    EXPECT_DOUBLE_EQ(at(parse_expression("(1 - x1)/2 - 3", 1), {5}), -5.0);
    EXPECT_DOUBLE_EQ(at(parse_expression("2^-1", 1), {0}), 0.5);
    EXPECT_DOUBLE_EQ(at(parse_expression("x1^(2)", 1), {3}), 9.0);
    EXPECT_DOUBLE_EQ(at(parse_expression("abs(x1) + sign(x1)", 1), {-3}), 2.0);
    EXPECT_NEAR(at(parse_expression("exp(1) - e", 1), {0}), 0.0, 1e-15);
}

TEST(Parse, Aliases)
{
    EXPECT_DOUBLE_EQ(at(parse_expression("x3 - re_2 + im2 - x4", 4), {0, 0, 5, 7}), 0.0);
    EXPECT_THROW(parse_expression("x", 4), UnknownIdentifier);
    EXPECT_THROW(parse_expression("x5", 4), UnknownIdentifier);
    EXPECT_THROW(parse_expression("tan(x1)", 2), UnknownIdentifier);
}

TEST(Parse, SyntaxErrorsCarryOffsets)
{
    try {
        parse_expression("1/)", 2);
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.position, 2u);
    }
    EXPECT_THROW(parse_expression("", 2), SyntaxError);
    EXPECT_THROW(parse_expression("x^1.5", 2), SyntaxError);
    EXPECT_THROW(parse_expression("(x + y", 2), SyntaxError);
    EXPECT_THROW(parse_expression("x y", 2), SyntaxError);
    try {
        parse_expression("x + q", 2);
        FAIL();
    } catch (const UnknownIdentifier& e) {
        EXPECT_EQ(e.name, "q");
        EXPECT_EQ(e.position, 4u);
    }
}

TEST(Eval, DivisionGuard)
{
    const auto e = parse_expression("1/x", 2);
    EXPECT_THROW(at(e, {0, 0}), EvaluationError);
    EXPECT_TRUE(std::isnan(Program(e)(std::vector<double>{0, 0})));
}

TEST(Differentiate, Examples)
{
    const auto e = parse_expression("cos(2*pi*x)", 2);
    const auto d = differentiate(e, 0);
    for (double x : {0.0, 0.1, 0.37}) {
        EXPECT_NEAR(at(d, {x, 0}), -2 * std::numbers::pi * std::sin(2 * std::numbers::pi * x), 1e-12);
    }
    const auto g = parse_expression("re1*im2 + re2*im1", 4);
    EXPECT_EQ(differentiate(g, 0).to_string(), "x4");
    EXPECT_TRUE(differentiate(parse_expression("3.5", 2), 0).is_zero());
    EXPECT_TRUE(differentiate(parse_expression("y^3", 2), 0).is_zero());
}

TEST(Differentiate, MatchesFiniteDifferences)
{
    const char* texts[] = {"sin(x1*x2) + x3^3/(1 + x4^2)", "exp(-(x1^2 + x2^2)) * cos(3*x3)",
                           "abs(x1 - 0.3) * x2 + sign(x4) * x3", "(x1 + 2)^-2 - x2^4"};
    fibcon::Rng rng(5);
    for (const char* t : texts) {
        const auto e = parse_expression(t, 4);
        for (int var = 0; var < 4; ++var) {
            const Program d(differentiate(e, var));
            for (int s = 0; s < 50; ++s) {
                std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
                if (std::abs(x[0] - 0.3) < 1e-3 || std::abs(x[3]) < 1e-3)
                    continue;
                const double h = 1e-6;
                auto xp = x, xm = x;
                xp[static_cast<std::size_t>(var)] += h;
                xm[static_cast<std::size_t>(var)] -= h;
                const double fd = (e.eval(xp) - e.eval(xm)) / (2 * h);
                EXPECT_NEAR(d(x), fd, 1e-6 * std::max(1.0, std::abs(fd))) << t << " d/dx" << var + 1;
            }
        }
    }
}

TEST(Program, AgreesWithTreeEvaluation)
{
    const auto e = parse_expression("exp(-((x - 1)^2 + y^2)) + exp(-((x + 1)^2 + y^2)) - abs(x*y)", 2);
    const Program p(e);
    fibcon::Rng rng(6);
    for (int s = 0; s < 100; ++s) {
        std::vector<double> x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        EXPECT_DOUBLE_EQ(p(x), e.eval(x));
    }
}

TEST(Print, RoundTrips)
{
    const char* texts[] = {"cos(2*pi*x) + cos(2*pi*y)", "-(x^2) + 3/(y - 2)", "x^-3 * sign(y) - abs(-y)"};
    fibcon::Rng rng(7);
    for (const char* t : texts) {
        const auto e = parse_expression(t, 2);
        const auto back = parse_expression(e.to_string(), 2);
        for (int s = 0; s < 20; ++s) {
            std::vector<double> x{rng.uniform(0.1, 1), rng.uniform(-1, 1)};
            EXPECT_DOUBLE_EQ(e.eval(x), back.eval(x)) << e.to_string();
        }
    }
}
