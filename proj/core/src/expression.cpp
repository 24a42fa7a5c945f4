#include "fibcon/expression.hpp"

#include <fmt/format.h>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace fibcon::expr {

SyntaxError::SyntaxError(std::string message, std::size_t offset)
    : ExpressionError(fmt::format("syntax error at offset {}: {}", offset, message)), position(offset)
{
}

UnknownIdentifier::UnknownIdentifier(std::string id, std::size_t offset)
    : ExpressionError(fmt::format("unknown identifier '{}' at offset {}", id, offset)), name(std::move(id)),
      position(offset)
{
}

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0, int index = 0)
{
    return std::make_shared<const Node>(Node{op, value, index, std::move(a), std::move(b)});
}

bool is_const(const Expr& e, double v) { return e.is_constant() && e.node().value == v; }

constexpr double tiny_divisor = 1e-300;

double apply_unary(Op op, double a, int index)
{
    switch (op) {
    case Op::Neg: return -a;
    case Op::Pow: {
        double r = 1.0;
        const int n = index < 0 ? -index : index;
        for (int i = 0; i < n; ++i)
            r *= a;
        return index < 0 ? 1.0 / r : r;
    }
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Exp: return std::exp(a);
    case Op::Abs: return std::abs(a);
    case Op::Sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
    default: return std::numeric_limits<double>::quiet_NaN();
    }
}

double eval_node(const Node& n, std::span<const double> x)
{
    switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var:
        if (static_cast<std::size_t>(n.index) >= x.size())
            throw EvaluationError(fmt::format("variable x{} not supplied", n.index + 1));
        return x[static_cast<std::size_t>(n.index)];
    case Op::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Op::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Op::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Op::Div: {
        const double d = eval_node(*n.b, x);
        if (std::abs(d) < tiny_divisor)
            throw EvaluationError("division by (nearly) zero");
        return eval_node(*n.a, x) / d;
    }
    case Op::Pow: {
        const double a = eval_node(*n.a, x);
        if (n.index < 0 && std::abs(a) < tiny_divisor)
            throw EvaluationError("negative power of (nearly) zero");
        return apply_unary(Op::Pow, a, n.index);
    }
    default: return apply_unary(n.op, eval_node(*n.a, x), n.index);
    }
}

int arity_node(const Node& n)
{
    int r = n.op == Op::Var ? n.index + 1 : 0;
    if (n.a)
        r = std::max(r, arity_node(*n.a));
    if (n.b)
        r = std::max(r, arity_node(*n.b));
    return r;
}

int precedence(Op op)
{
    switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
    }
}

std::string format_number(double v)
{
    if (v == std::numbers::pi)
        return "pi";
    return fmt::format("{}", v);
}

std::string print(const Node& n)
{
    auto wrap = [](const Node& child, int min_prec) {
        const std::string s = print(child);
        const bool negative_literal = child.op == Op::Const && child.value < 0;
        return (precedence(child.op) < min_prec || negative_literal) ? "(" + s + ")" : s;
    };
    const int p = precedence(n.op);
    switch (n.op) {
    case Op::Const: return format_number(n.value);
    case Op::Var: return fmt::format("x{}", n.index + 1);
    case Op::Add: return wrap(*n.a, p) + " + " + wrap(*n.b, p);
    case Op::Sub: return wrap(*n.a, p) + " - " + wrap(*n.b, p + 1);
    case Op::Mul: return wrap(*n.a, p) + "*" + wrap(*n.b, p + 1);
    case Op::Div: return wrap(*n.a, p) + "/" + wrap(*n.b, p + 1);
    case Op::Neg: return "-" + wrap(*n.a, p);
    case Op::Pow: return wrap(*n.a, p + 1) + "^" + (n.index < 0 ? fmt::format("({})", n.index) : fmt::format("{}", n.index));
    case Op::Sin: return "sin(" + print(*n.a) + ")";
    case Op::Cos: return "cos(" + print(*n.a) + ")";
    case Op::Exp: return "exp(" + print(*n.a) + ")";
    case Op::Abs: return "abs(" + print(*n.a) + ")";
    case Op::Sign: return "sign(" + print(*n.a) + ")";
    }
    return "?";
}

} // namespace

Expr::Expr() : root_(make(Op::Const)) {}

Expr Expr::constant(double v) { return Expr(make(Op::Const, nullptr, nullptr, v)); }

Expr Expr::variable(int index) { return Expr(make(Op::Var, nullptr, nullptr, 0.0, index)); }

double Expr::eval(std::span<const double> x) const { return eval_node(*root_, x); }

int Expr::arity() const { return arity_node(*root_); }

std::string Expr::to_string() const { return print(*root_); }

// Constructors fold constants and drop neutral elements so that derivatives
// stay small.
Expr operator+(const Expr& a, const Expr& b)
{
    if (a.is_constant() && b.is_constant())
        return Expr::constant(a.node().value + b.node().value);
    if (a.is_zero())
        return b;
    if (b.is_zero())
        return a;
    if (b.node().op == Op::Neg)
        return a - Expr(b.node().a);
    return Expr(make(Op::Add, a.ptr(), b.ptr()));
}

Expr operator-(const Expr& a, const Expr& b)
{
    if (a.is_constant() && b.is_constant())
        return Expr::constant(a.node().value - b.node().value);
    if (b.is_zero())
        return a;
    if (a.is_zero())
        return -b;
    if (b.node().op == Op::Neg)
        return a + Expr(b.node().a);
    return Expr(make(Op::Sub, a.ptr(), b.ptr()));
}

Expr operator*(const Expr& a, const Expr& b)
{
    if (a.is_constant() && b.is_constant())
        return Expr::constant(a.node().value * b.node().value);
    if (a.is_zero() || b.is_zero())
        return Expr::constant(0.0);
    if (is_const(a, 1.0))
        return b;
    if (is_const(b, 1.0))
        return a;
    if (is_const(a, -1.0))
        return -b;
    if (is_const(b, -1.0))
        return -a;
    if (b.is_constant())
        return b * a;
    return Expr(make(Op::Mul, a.ptr(), b.ptr()));
}

Expr operator/(const Expr& a, const Expr& b)
{
    if (b.is_constant() && std::abs(b.node().value) >= tiny_divisor) {
        if (a.is_constant())
            return Expr::constant(a.node().value / b.node().value);
        if (is_const(b, 1.0))
            return a;
    }
    if (a.is_zero() && !b.is_zero())
        return Expr::constant(0.0);
    return Expr(make(Op::Div, a.ptr(), b.ptr()));
}

Expr operator-(const Expr& a)
{
    if (a.is_constant())
        return Expr::constant(-a.node().value);
    if (a.node().op == Op::Neg)
        return Expr(a.node().a);
    return Expr(make(Op::Neg, a.ptr()));
}

Expr pow(const Expr& a, int exponent)
{
    if (exponent == 0)
        return Expr::constant(1.0);
    if (exponent == 1)
        return a;
    if (a.is_constant() && (exponent > 0 || a.node().value != 0.0))
        return Expr::constant(apply_unary(Op::Pow, a.node().value, exponent));
    if (a.node().op == Op::Pow) {
        const long long e = static_cast<long long>(a.node().index) * exponent;
        if (e >= std::numeric_limits<int>::min() && e <= std::numeric_limits<int>::max())
            return pow(Expr(a.node().a), static_cast<int>(e));
    }
    return Expr(make(Op::Pow, a.ptr(), nullptr, 0.0, exponent));
}

namespace {

Expr unary(Op op, const Expr& a)
{
    if (a.is_constant())
        return Expr::constant(apply_unary(op, a.node().value, 0));
    return Expr(make(op, a.ptr()));
}

} // namespace

Expr sin(const Expr& a) { return unary(Op::Sin, a); }
Expr cos(const Expr& a) { return unary(Op::Cos, a); }
Expr exp(const Expr& a) { return unary(Op::Exp, a); }
Expr abs(const Expr& a) { return unary(Op::Abs, a); }
Expr sign(const Expr& a) { return unary(Op::Sign, a); }

Expr differentiate(const Expr& e, int v)
{
    const Node& n = e.node();
    auto d = [v](const NodePtr& p) { return differentiate(Expr(p), v); };
    const Expr a = n.a ? Expr(n.a) : Expr();
    const Expr b = n.b ? Expr(n.b) : Expr();
    switch (n.op) {
    case Op::Const: return Expr::constant(0.0);
    case Op::Var: return Expr::constant(n.index == v ? 1.0 : 0.0);
    case Op::Add: return d(n.a) + d(n.b);
    case Op::Sub: return d(n.a) - d(n.b);
    case Op::Mul: return d(n.a) * b + a * d(n.b);
    case Op::Div: return (d(n.a) * b - a * d(n.b)) / pow(b, 2);
    case Op::Neg: return -d(n.a);
    case Op::Pow: return Expr::constant(n.index) * pow(a, n.index - 1) * d(n.a);
    case Op::Sin: return cos(a) * d(n.a);
    case Op::Cos: return -(sin(a) * d(n.a));
    case Op::Exp: return e * d(n.a);
    case Op::Abs: return sign(a) * d(n.a);
    case Op::Sign: return Expr::constant(0.0);
    }
    return Expr::constant(0.0);
}

// ---- parser --------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(std::string_view s, std::size_t dim) : s_(s), dim_(dim) {}

    Expr parse()
    {
        skip();
        if (pos_ == s_.size())
            throw SyntaxError("empty expression", pos_);
        Expr e = sum();
        skip();
        if (pos_ != s_.size())
            throw SyntaxError(fmt::format("unexpected '{}'", s_[pos_]), pos_);
        return e;
    }

private:
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            if (pos_ >= s_.size())
                throw SyntaxError(fmt::format("expected '{}' at end of input", c), pos_);
            throw SyntaxError(fmt::format("expected '{}'", c), pos_);
        }
    }

    Expr sum()
    {
        Expr lhs = product();
        for (;;) {
            if (accept('+'))
                lhs = lhs + product();
            else if (accept('-'))
                lhs = lhs - product();
            else
                return lhs;
        }
    }

    Expr product()
    {
        Expr lhs = signed_factor();
        for (;;) {
            if (accept('*'))
                lhs = lhs * signed_factor();
            else if (accept('/'))
                lhs = lhs / signed_factor();
            else
                return lhs;
        }
    }

    Expr signed_factor()
    {
        if (accept('-'))
            return -signed_factor();
        if (accept('+'))
            return signed_factor();
        return power();
    }

    Expr power()
    {
        Expr base = primary();
        if (!accept('^'))
            return base;
        skip();
        const bool paren = accept('(');
        skip();
        const std::size_t start = pos_;
        bool negative = false;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
            negative = s_[pos_] == '-';
            ++pos_;
        }
        const std::size_t digits = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ == digits)
            throw SyntaxError("exponent must be an integer", start);
        int value = 0;
        const auto res = std::from_chars(s_.data() + digits, s_.data() + pos_, value);
        if (res.ec != std::errc())
            throw SyntaxError("exponent out of range", start);
        if (paren)
            expect(')');
        skip();
        if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
            throw SyntaxError("exponent must be an integer", start);
        if (pos_ < s_.size() && s_[pos_] == '^')
            throw SyntaxError("chained '^' is ambiguous; use parentheses", pos_);
        return pow(base, negative ? -value : value);
    }

    Expr primary()
    {
        skip();
        if (pos_ >= s_.size())
            throw SyntaxError("unexpected end of input", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return identifier();
        throw SyntaxError(fmt::format("unexpected '{}'", c), pos_);
    }

    Expr number()
    {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
            ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t q = pos_ + 1;
            if (q < s_.size() && (s_[q] == '+' || s_[q] == '-'))
                ++q;
            if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
                pos_ = q;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                    ++pos_;
            }
        }
        double v = 0.0;
        const auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != s_.data() + pos_)
            throw SyntaxError("malformed number", start);
        return Expr::constant(v);
    }

    Expr identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        const std::string_view id = s_.substr(start, pos_ - start);

        static constexpr std::array<std::pair<std::string_view, Op>, 5> functions{
            {{"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp}, {"abs", Op::Abs}, {"sign", Op::Sign}}};
        for (const auto& [name, op] : functions) {
            if (id != name)
                continue;
            expect('(');
            Expr arg = sum();
            expect(')');
            switch (op) {
            case Op::Sin: return sin(arg);
            case Op::Cos: return cos(arg);
            case Op::Exp: return exp(arg);
            case Op::Abs: return abs(arg);
            default: return sign(arg);
            }
        }
        skip();
        if (pos_ < s_.size() && s_[pos_] == '(')
            throw UnknownIdentifier(std::string(id), start);
        if (id == "pi")
            return Expr::constant(std::numbers::pi);
        if (id == "e")
            return Expr::constant(std::numbers::e);
        if (const int v = variable_index(id); v >= 0)
            return Expr::variable(v);
        throw UnknownIdentifier(std::string(id), start);
    }

    int variable_index(std::string_view id) const
    {
        auto number_after = [&](std::string_view prefix) -> long {
            if (id.size() <= prefix.size() || id.substr(0, prefix.size()) != prefix)
                return -1;
            std::string_view rest = id.substr(prefix.size());
            if (!rest.empty() && rest.front() == '_' && prefix != "x")
                rest.remove_prefix(1);
            if (rest.empty() || rest.front() == '0')
                return -1;
            long k = 0;
            const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), k);
            if (res.ec != std::errc() || res.ptr != rest.data() + rest.size())
                return -1;
            return k;
        };
        const auto d = static_cast<long>(dim_);
        if (dim_ == 2 && id == "x")
            return 0;
        if (dim_ == 2 && id == "y")
            return 1;
        if (const long k = number_after("x"); k >= 1 && k <= d)
            return static_cast<int>(k - 1);
        if (const long k = number_after("re"); k >= 1 && 2 * k <= d)
            return static_cast<int>(2 * k - 2);
        if (const long k = number_after("im"); k >= 1 && 2 * k <= d)
            return static_cast<int>(2 * k - 1);
        return -1;
    }

    std::string_view s_;
    std::size_t dim_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse_expression(std::string_view text, std::size_t dim) { return Parser(text, dim).parse(); }

// ---- compiled form ---------------------------------------------------------

namespace {

template <typename Emit>
std::size_t emit_postfix(const Node& n, Emit& emit)
{
    // Returns the stack depth needed for this subtree.
    std::size_t need = 1;
    if (n.a && n.b) {
        const std::size_t da = emit_postfix(*n.a, emit);
        const std::size_t db = emit_postfix(*n.b, emit);
        need = std::max(da, db + 1);
    } else if (n.a) {
        need = emit_postfix(*n.a, emit);
    }
    emit(n);
    return need;
}

} // namespace

Program::Program(const Expr& e)
{
    auto emit = [this](const Node& n) { code_.push_back({n.op, n.value, n.index}); };
    depth_ = emit_postfix(e.node(), emit);
}

double Program::eval(const double* x) const
{
    constexpr std::size_t inline_depth = 64;
    std::array<double, inline_depth> small{};
    std::vector<double> big;
    double* st = small.data();
    if (depth_ > inline_depth) {
        big.resize(depth_);
        st = big.data();
    }
    std::size_t sp = 0;
    for (const auto& in : code_) {
        switch (in.op) {
        case Op::Const: st[sp++] = in.value; break;
        case Op::Var: st[sp++] = x[in.index]; break;
        case Op::Add: --sp; st[sp - 1] += st[sp]; break;
        case Op::Sub: --sp; st[sp - 1] -= st[sp]; break;
        case Op::Mul: --sp; st[sp - 1] *= st[sp]; break;
        case Op::Div:
            --sp;
            st[sp - 1] = std::abs(st[sp]) < tiny_divisor ? std::numeric_limits<double>::quiet_NaN() : st[sp - 1] / st[sp];
            break;
        case Op::Pow:
            st[sp - 1] = (in.index < 0 && std::abs(st[sp - 1]) < tiny_divisor)
                             ? std::numeric_limits<double>::quiet_NaN()
                             : apply_unary(Op::Pow, st[sp - 1], in.index);
            break;
        default: st[sp - 1] = apply_unary(in.op, st[sp - 1], in.index); break;
        }
    }
    return sp == 1 ? st[0] : std::numeric_limits<double>::quiet_NaN();
}

} // namespace fibcon::expr
