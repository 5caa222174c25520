#include "hamm/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "hamm/errors.hpp"

namespace hamm {

std::string_view to_string(Role role) {
    switch (role) {
    case Role::Nonlinearity: return "nonlinearity";
    case Role::Coefficient: return "coefficient";
    case Role::Functional: return "functional";
    case Role::Kernel: return "kernel";
    case Role::Bound: return "bound";
    case Role::Constant: return "constant";
    }
    return "?";
}

namespace {

enum class Tok { Number, Name, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    std::string_view text;
    double number = 0.0;
    std::size_t position = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        const std::size_t start = pos_;
        if (pos_ == src_.size()) {
            current_ = {Tok::End, {}, 0.0, start};
            return;
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            lex_number(start);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size()
                   && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            current_ = {Tok::Name, src_.substr(start, pos_ - start), 0.0, start};
            return;
        }
        ++pos_;
        Tok kind;
        switch (c) {
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        case '*': kind = Tok::Star; break;
        case '/': kind = Tok::Slash; break;
        case '^': kind = Tok::Caret; break;
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case ',': kind = Tok::Comma; break;
        default: throw ParseError(std::string("unexpected character '") + c + "'", start);
        }
        current_ = {kind, src_.substr(start, 1), 0.0, start};
    }

    void lex_number(std::size_t start) {
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t count = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            count += digits();
        }
        if (count == 0)
            throw ParseError("malformed number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                ++pos_;
            if (digits() == 0)
                pos_ = save; // not an exponent; leave 'e' for the next token
        }
        const std::string_view text = src_.substr(start, pos_ - start);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw ParseError("malformed number '" + std::string(text) + "'", start);
        current_ = {Tok::Number, text, value, start};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token current_{Tok::End, {}, 0.0, 0};
};

NodePtr make(Op op, std::size_t pos, std::vector<NodePtr> args = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->position = pos;
    n->args = std::move(args);
    return n;
}

struct FuncInfo {
    std::string_view name;
    Func func;
    std::size_t arity;
};

constexpr FuncInfo kFunctions[] = {
    {"exp", Func::Exp, 1}, {"sin", Func::Sin, 1},  {"cos", Func::Cos, 1}, {"sqrt", Func::Sqrt, 1},
    {"abs", Func::Abs, 1}, {"min", Func::Min, 2}, {"max", Func::Max, 2},
};

constexpr std::pair<std::string_view, Var> kVariables[] = {
    {"t", Var::T}, {"u", Var::U}, {"v", Var::V}, {"s", Var::S}, {"rho", Var::Rho},
};

std::string_view name_of(Var v) {
    for (auto& [name, var] : kVariables)
        if (var == v)
            return name;
    return "?";
}

std::string_view name_of(Func f) {
    for (auto& info : kFunctions)
        if (info.func == f)
            return info.name;
    return "?";
}

bool allowed(Role role, Var var, bool inside_integral) {
    switch (role) {
    case Role::Nonlinearity: return var == Var::T || var == Var::U || var == Var::V;
    case Role::Coefficient: return var == Var::T;
    case Role::Kernel: return var == Var::T || var == Var::S;
    case Role::Bound: return var == Var::Rho;
    case Role::Constant: return false;
    case Role::Functional: return inside_integral && var == Var::S;
    }
    return false;
}

class Parser {
public:
    Parser(std::string_view text, Role role) : lex_(text), role_(role) {}

    NodePtr parse() {
        NodePtr root = expr();
        if (lex_.peek().kind != Tok::End)
            throw ParseError("unexpected '" + std::string(lex_.peek().text) + "'", lex_.peek().position);
        return root;
    }

private:
    NodePtr expr() {
        NodePtr lhs = term();
        while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
            Token op = lex_.take();
            lhs = make(op.kind == Tok::Plus ? Op::Add : Op::Sub, op.position, {lhs, term()});
        }
        return lhs;
    }

    NodePtr term() {
        NodePtr lhs = unary();
        while (lex_.peek().kind == Tok::Star || lex_.peek().kind == Tok::Slash) {
            Token op = lex_.take();
            lhs = make(op.kind == Tok::Star ? Op::Mul : Op::Div, op.position, {lhs, unary()});
        }
        return lhs;
    }

    NodePtr unary() {
        if (lex_.peek().kind == Tok::Minus) {
            Token op = lex_.take();
            return make(Op::Negate, op.position, {unary()});
        }
        if (lex_.peek().kind == Tok::Plus) {
            lex_.take();
            return unary();
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (lex_.peek().kind == Tok::Caret) {
            Token op = lex_.take();
            return make(Op::Pow, op.position, {base, unary()});
        }
        return base;
    }

    void expect(Tok kind, std::string_view what) {
        if (lex_.peek().kind != kind) {
            const auto& t = lex_.peek();
            throw ParseError("expected " + std::string(what) + ", found "
                                 + (t.kind == Tok::End ? std::string("end of input") : "'" + std::string(t.text) + "'"),
                             t.position);
        }
        lex_.take();
    }

    std::vector<NodePtr> call_args() {
        expect(Tok::LParen, "'('");
        std::vector<NodePtr> args{expr()};
        while (lex_.peek().kind == Tok::Comma) {
            lex_.take();
            args.push_back(expr());
        }
        expect(Tok::RParen, "')'");
        return args;
    }

    NodePtr primary() {
        const Token tok = lex_.take();
        switch (tok.kind) {
        case Tok::Number: {
            auto n = make(Op::Number, tok.position);
            std::const_pointer_cast<Node>(n)->number = tok.number;
            return n;
        }
        case Tok::LParen: {
            NodePtr inner = expr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        case Tok::Name: return named(tok);
        case Tok::End: throw ParseError("unexpected end of input", tok.position);
        default: throw ParseError("unexpected '" + std::string(tok.text) + "'", tok.position);
        }
    }

    NodePtr named(const Token& tok) {
        const std::string_view name = tok.text;
        if (name == "U" || name == "DU" || name == "INT")
            return functional_atom(tok);

        for (auto& info : kFunctions) {
            if (info.name != name)
                continue;
            auto args = call_args();
            if (args.size() != info.arity)
                throw ParseError(std::string(name) + " takes " + std::to_string(info.arity) + " argument(s)",
                                 tok.position);
            auto n = make(Op::Call, tok.position, std::move(args));
            std::const_pointer_cast<Node>(n)->func = info.func;
            return n;
        }
        if (name == "e" || name == "pi") {
            auto n = make(Op::Number, tok.position);
            std::const_pointer_cast<Node>(n)->number = name == "e" ? std::numbers::e : std::numbers::pi;
            return n;
        }
        for (auto& [vname, var] : kVariables) {
            if (vname != name)
                continue;
            if (!allowed(role_, var, integral_depth_ > 0))
                throw ParseError("variable '" + std::string(name) + "' is not allowed in a "
                                     + std::string(to_string(role_)) + " expression"
                                     + (role_ == Role::Functional && var == Var::S ? " outside INT(...)" : ""),
                                 tok.position);
            if (point_depth_ > 0 && var != Var::S)
                throw ParseError("point atom arguments may only use s", tok.position);
            auto n = make(Op::Variable, tok.position);
            std::const_pointer_cast<Node>(n)->var = var;
            return n;
        }
        throw ParseError("unknown name '" + std::string(name) + "'", tok.position);
    }

    NodePtr functional_atom(const Token& tok) {
        if (role_ != Role::Functional)
            throw ParseError("'" + std::string(tok.text) + "' is only allowed in functional expressions",
                             tok.position);
        if (point_depth_ > 0)
            throw ParseError("functional atoms cannot appear inside U(...) or DU(...)", tok.position);
        if (tok.text == "INT") {
            if (integral_depth_ > 0)
                throw ParseError("INT(...) cannot be nested", tok.position);
            ++integral_depth_;
            auto args = call_args();
            --integral_depth_;
            if (args.size() != 1)
                throw ParseError("INT takes 1 argument", tok.position);
            return make(Op::Integral, tok.position, std::move(args));
        }
        ++point_depth_;
        auto args = call_args();
        --point_depth_;
        if (args.size() != 1)
            throw ParseError(std::string(tok.text) + " takes 1 argument", tok.position);
        return make(tok.text == "U" ? Op::PointValue : Op::PointDeriv, tok.position, std::move(args));
    }

    Lexer lex_;
    Role role_;
    int integral_depth_ = 0;
    int point_depth_ = 0;
};

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void print_node(const Node& n, std::ostringstream& os) {
    auto binary = [&](const char* sym) {
        os << '(';
        print_node(*n.args[0], os);
        os << ' ' << sym << ' ';
        print_node(*n.args[1], os);
        os << ')';
    };
    auto call = [&](std::string_view name) {
        os << name << '(';
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i)
                os << ", ";
            print_node(*n.args[i], os);
        }
        os << ')';
    };
    switch (n.op) {
    case Op::Number: os << format_number(n.number); break;
    case Op::Variable: os << name_of(n.var); break;
    case Op::Negate:
        os << "(-";
        print_node(*n.args[0], os);
        os << ')';
        break;
    case Op::Add: binary("+"); break;
    case Op::Sub: binary("-"); break;
    case Op::Mul: binary("*"); break;
    case Op::Div: binary("/"); break;
    case Op::Pow: binary("^"); break;
    case Op::Call: call(name_of(n.func)); break;
    case Op::PointValue: call("U"); break;
    case Op::PointDeriv: call("DU"); break;
    case Op::Integral: call("INT"); break;
    }
}

class Evaluator {
public:
    Evaluator(Role role, const std::string& source, const GridFunctiond* fn)
        : role_(role), source_(source), fn_(fn) {}

    double eval(const Node& n, const EvalPoint& at) const {
        switch (n.op) {
        case Op::Number: return n.number;
        case Op::Variable:
            switch (n.var) {
            case Var::T: return at.t;
            case Var::U: return at.u;
            case Var::V: return at.v;
            case Var::S: return at.s;
            case Var::Rho: return at.rho;
            }
            return 0.0;
        case Op::Negate: return -eval(*n.args[0], at);
        case Op::Add: return eval(*n.args[0], at) + eval(*n.args[1], at);
        case Op::Sub: return eval(*n.args[0], at) - eval(*n.args[1], at);
        case Op::Mul: return eval(*n.args[0], at) * eval(*n.args[1], at);
        case Op::Div: {
            const double a = eval(*n.args[0], at);
            const double b = eval(*n.args[1], at);
            if (b == 0.0 && std::isfinite(a))
                fail(n, at, "division by zero");
            return a / b;
        }
        case Op::Pow: {
            const double a = eval(*n.args[0], at);
            const double b = eval(*n.args[1], at);
            if (a == 0.0 && b < 0.0)
                fail(n, at, "zero raised to a negative power");
            return checked(n, at, std::pow(a, b), {a, b}, "power of a negative base");
        }
        case Op::Call: return call(n, at);
        case Op::PointValue:
        case Op::PointDeriv: {
            const double a = eval(*n.args[0], at);
            if (!(a >= 0.0 && a <= 1.0))
                fail(n, at, "point " + format_number(a) + " outside [0,1]");
            return n.op == Op::PointValue ? eval_at(*fn_, a) : eval_deriv_at(*fn_, a);
        }
        case Op::Integral: {
            const Gridd& grid = fn_->grid;
            VectorXd samples(grid.size());
            EvalPoint inner = at;
            for (Eigen::Index j = 0; j < grid.size(); ++j) {
                inner.s = grid.node(j);
                samples(j) = eval(*n.args[0], inner);
            }
            return integrate(samples, grid);
        }
        }
        return 0.0;
    }

private:
    double call(const Node& n, const EvalPoint& at) const {
        const double a = eval(*n.args[0], at);
        switch (n.func) {
        case Func::Exp: return std::exp(a);
        case Func::Sin: return checked(n, at, std::sin(a), {a}, "sin of a non-finite value");
        case Func::Cos: return checked(n, at, std::cos(a), {a}, "cos of a non-finite value");
        case Func::Sqrt:
            if (a < 0.0)
                fail(n, at, "sqrt of negative value " + format_number(a));
            return std::sqrt(a);
        case Func::Abs: return std::abs(a);
        case Func::Min: return std::min(a, eval(*n.args[1], at));
        case Func::Max: return std::max(a, eval(*n.args[1], at));
        }
        return 0.0;
    }

    // NaN produced from finite operands is a domain error; NaN from
    // non-finite operands (overflow upstream) propagates silently.
    double checked(const Node& n, const EvalPoint& at, double result, std::initializer_list<double> operands,
                   const std::string& what) const {
        if (std::isnan(result)) {
            bool finite_inputs = true;
            for (double x : operands)
                finite_inputs = finite_inputs && std::isfinite(x);
            if (finite_inputs)
                fail(n, at, what);
        }
        return result;
    }

    [[noreturn]] void fail(const Node& n, const EvalPoint& at, const std::string& what) const {
        std::ostringstream os;
        os << what << " in " << to_string(role_) << " expression '" << source_ << "' at position "
           << n.position;
        switch (role_) {
        case Role::Nonlinearity: os << " (t=" << at.t << ", u=" << at.u << ", v=" << at.v << ")"; break;
        case Role::Coefficient: os << " (t=" << at.t << ")"; break;
        case Role::Kernel: os << " (t=" << at.t << ", s=" << at.s << ")"; break;
        case Role::Bound: os << " (rho=" << at.rho << ")"; break;
        case Role::Functional: os << " (s=" << at.s << ")"; break;
        case Role::Constant: break;
        }
        throw EvaluationError(os.str());
    }

    Role role_;
    const std::string& source_;
    const GridFunctiond* fn_;
};

bool uses_var(const Node& n, Var var) {
    if (n.op == Op::Variable && n.var == var)
        return true;
    for (auto& a : n.args)
        if (uses_var(*a, var))
            return true;
    return false;
}

} // namespace

bool structurally_equal(const Node& a, const Node& b) {
    if (a.op != b.op || a.args.size() != b.args.size())
        return false;
    switch (a.op) {
    case Op::Number:
        if (a.number != b.number)
            return false;
        break;
    case Op::Variable:
        if (a.var != b.var)
            return false;
        break;
    case Op::Call:
        if (a.func != b.func)
            return false;
        break;
    default: break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!structurally_equal(*a.args[i], *b.args[i]))
            return false;
    return true;
}

Expr Expr::parse(std::string_view text, Role role) {
    bool blank = true;
    for (char c : text)
        blank = blank && std::isspace(static_cast<unsigned char>(c));
    if (blank)
        throw ParseError("empty " + std::string(to_string(role)) + " expression", 0);
    return Expr(Parser(text, role).parse(), role, std::string(text));
}

bool Expr::uses(Var var) const { return uses_var(*root_, var); }

std::string Expr::print() const {
    std::ostringstream os;
    print_node(*root_, os);
    return os.str();
}

double Expr::eval(const EvalPoint& at) const {
    if (role_ == Role::Functional)
        throw EvaluationError("functional expression '" + source_ + "' needs a grid function");
    return Evaluator(role_, source_, nullptr).eval(*root_, at);
}

double Expr::nonlinearity(double t, double u, double v) const { return eval({.t = t, .u = u, .v = v}); }

double Expr::kernel(double t, double s) const { return eval({.t = t, .s = s}); }

double Expr::bound(double rho) const { return eval({.rho = rho}); }

double Expr::constant() const { return eval({}); }

double Expr::functional(const GridFunctiond& u) const {
    if (role_ != Role::Functional)
        throw EvaluationError("expression '" + source_ + "' is not a functional");
    return Evaluator(role_, source_, &u).eval(*root_, {});
}

double eval_nonlinearity(const Expr& e, double t, double u, double v) {
    if (e.role() != Role::Nonlinearity)
        throw EvaluationError("expression '" + e.source() + "' is not a nonlinearity");
    return e.nonlinearity(t, u, v);
}

double eval_functional(const Expr& e, const GridFunctiond& u) { return e.functional(u); }

} // namespace hamm
