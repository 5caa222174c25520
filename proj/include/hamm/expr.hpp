#ifndef HAMM_EXPR_HPP
#define HAMM_EXPR_HPP

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hamm/grid.hpp"

/*
 * Expression language used by problem files.
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := ('-' | '+') unary | power
 *   power   := primary ('^' unary)?            (right associative)
 *   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
 *
 * Names: the variables allowed by the role, the constants e and pi, the
 * functions exp sin cos sqrt abs min max, and (functional role only) the
 * atoms U(a), DU(a), INT(body).
 */

namespace hamm {

enum class Role {
    Nonlinearity, // f(t,u,v)
    Coefficient,  // gamma(t)
    Functional,   // h[u]
    Kernel,       // k(t,s)
    Bound,        // declared bound in rho
    Constant,     // closed numeric expression
};

std::string_view to_string(Role role);

enum class Var { T, U, V, S, Rho };

enum class Func { Exp, Sin, Cos, Sqrt, Abs, Min, Max };

enum class Op {
    Number,
    Variable,
    Negate,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Call,
    PointValue, // U(a)
    PointDeriv, // DU(a)
    Integral,   // INT(body)
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op;
    double number = 0.0;
    Var var = Var::T;
    Func func = Func::Exp;
    std::vector<NodePtr> args;
    std::size_t position = 0;
};

bool structurally_equal(const Node& a, const Node& b);

// Bindings for a single evaluation. Unused fields are ignored.
struct EvalPoint {
    double t = 0.0;
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    double rho = 0.0;
};

class Expr {
public:
    static Expr parse(std::string_view text, Role role);

    Role role() const { return role_; }
    const Node& root() const { return *root_; }
    const std::string& source() const { return source_; }

    bool uses(Var var) const;

    // Canonical fully parenthesized text; parses back to the same tree.
    std::string print() const;

    double eval(const EvalPoint& at) const;

    double operator()(double t) const { return eval({.t = t}); }

    // Role-specific conveniences.
    double nonlinearity(double t, double u, double v) const;
    double kernel(double t, double s) const;
    double bound(double rho) const;
    double constant() const;
    double functional(const GridFunctiond& u) const;

    friend bool operator==(const Expr& a, const Expr& b) {
        return a.role_ == b.role_ && structurally_equal(*a.root_, *b.root_);
    }

private:
    Expr(NodePtr root, Role role, std::string source)
        : root_(std::move(root)), role_(role), source_(std::move(source)) {}

    NodePtr root_;
    Role role_;
    std::string source_;
};

double eval_nonlinearity(const Expr& e, double t, double u, double v);
double eval_functional(const Expr& e, const GridFunctiond& u);

} // namespace hamm

#endif // HAMM_EXPR_HPP
