#pragma once

// Real expressions over the coordinates x1..x{2n} of R^{2n}, with symbolic
// differentiation and a compiled postfix form for grid sweeps.

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fibcon::expr {

class ExpressionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public ExpressionError {
public:
    SyntaxError(std::string message, std::size_t offset);
    std::size_t position;
};

class UnknownIdentifier : public ExpressionError {
public:
    UnknownIdentifier(std::string name, std::size_t offset);
    std::string name;
    std::size_t position;
};

class EvaluationError : public ExpressionError {
public:
    using ExpressionError::ExpressionError;
};

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Abs, Sign };

struct Node {
    Op op;
    double value = 0.0; // Const
    int index = 0;      // Var: coordinate index; Pow: exponent
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

class Expr {
public:
    Expr();
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    static Expr constant(double v);
    static Expr variable(int index);

    const Node& node() const { return *root_; }
    const std::shared_ptr<const Node>& ptr() const { return root_; }

    bool is_constant() const { return root_->op == Op::Const; }
    bool is_zero() const { return is_constant() && root_->value == 0.0; }

    /// Throws EvaluationError on division by a value of magnitude below 1e-300.
    double eval(std::span<const double> x) const;

    /// Largest variable index used plus one.
    int arity() const;

    std::string to_string() const;

private:
    std::shared_ptr<const Node> root_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr abs(const Expr& a);
Expr sign(const Expr& a);

/// Parses infix text over a 2n-dimensional phase space.  Variables are
/// x1..x{dim}; re_k/im_k (also rek/imk) name x_{2k-1}, x_{2k}; x and y alias
/// x1 and x2 when dim == 2.  Constants pi and e; functions sin cos exp abs;
/// `^` takes an integer exponent.  Offsets in errors are 0-based.
Expr parse_expression(std::string_view text, std::size_t dim);

Expr differentiate(const Expr& e, int variable);

/// Flat postfix program.  eval() returns NaN where Expr::eval would throw.
class Program {
public:
    Program() = default;
    explicit Program(const Expr& e);

    double eval(const double* x) const;
    double operator()(std::span<const double> x) const { return eval(x.data()); }

private:
    struct Instr {
        Op op;
        double value;
        int index;
    };
    std::vector<Instr> code_;
    std::size_t depth_ = 0;
};

} // namespace fibcon::expr
