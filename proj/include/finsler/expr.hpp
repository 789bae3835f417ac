// Scalar-field expressions over coordinates x1..xn: recursive-descent parser,
// printer, and evaluation templated over the scalar type so the same tree
// yields values, gradients and Hessians through nested dual numbers.
//
// Grammar:
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := atom ("^" const_atom)?
//   atom   := NUMBER | "x"INDEX | FUNC "(" expr ")" | "(" expr ")" | "-" factor
// Whitespace is insignificant; '^' binds tighter than unary minus and its
// exponent must be a constant expression.
#pragma once

#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/errors.hpp"
#include "finsler/linalg.hpp"

namespace finsler {

namespace detail {
class ExprParser;
}

enum class Func { sin, cos, exp, log, sqrt, tanh };

inline const char* func_name(Func f) {
    switch (f) {
        case Func::sin: return "sin";
        case Func::cos: return "cos";
        case Func::exp: return "exp";
        case Func::log: return "log";
        case Func::sqrt: return "sqrt";
        case Func::tanh: return "tanh";
    }
    return "?";
}

// Value and exact first/second partials of a scalar field at a point.
struct Jet2 {
    double value = 0.0;
    Vec grad;
    Mat hess;
};

class ScalarExpr {
public:
    enum class Kind { number, variable, neg, add, sub, mul, div, pow, call };

    struct Node {
        Kind kind;
        double num = 0.0;       // number payload, or constant exponent for pow
        int var = -1;           // 0-based variable index
        Func func = Func::sin;  // call payload
        int lhs = -1;
        int rhs = -1;
        std::size_t src = 0;  // byte offset in the source text
    };

    ScalarExpr() = default;

    int arity() const { return arity_; }
    const std::string& source() const { return source_; }

    template <class T>
    T eval(std::span<const T> x) const {
        assert(static_cast<int>(x.size()) == arity_);
        return eval_node<T>(root_, x);
    }

    template <class T>
    T eval(const std::vector<T>& x) const {
        return eval(std::span<const T>(x.data(), x.size()));
    }

    double eval_at(const Vec& x) const { return eval<double>(x); }

    std::string str() const { return print_node(root_, 0); }

    bool same_tree(const ScalarExpr& other) const {
        return arity_ == other.arity_ && node_equal(root_, other, other.root_);
    }

    // True when no variable occurs anywhere in the tree.
    bool is_constant() const { return subtree_constant(root_); }

    friend ScalarExpr parse_expression(std::string_view src, int n);
    friend class detail::ExprParser;

private:
    std::vector<Node> pool_;
    int root_ = -1;
    int arity_ = 0;
    std::string source_;

    bool subtree_constant(int id) const {
        const Node& nd = pool_[static_cast<std::size_t>(id)];
        switch (nd.kind) {
            case Kind::number: return true;
            case Kind::variable: return false;
            case Kind::neg:
            case Kind::call: return subtree_constant(nd.lhs);
            case Kind::pow: return subtree_constant(nd.lhs);
            default: return subtree_constant(nd.lhs) && subtree_constant(nd.rhs);
        }
    }

    bool node_equal(int id, const ScalarExpr& o, int oid) const {
        const Node& a = pool_[static_cast<std::size_t>(id)];
        const Node& b = o.pool_[static_cast<std::size_t>(oid)];
        if (a.kind != b.kind) return false;
        switch (a.kind) {
            case Kind::number: return a.num == b.num;
            case Kind::variable: return a.var == b.var;
            case Kind::neg:
            case Kind::call:
                return (a.kind != Kind::call || a.func == b.func) && node_equal(a.lhs, o, b.lhs);
            case Kind::pow: return a.num == b.num && node_equal(a.lhs, o, b.lhs);
            default: return node_equal(a.lhs, o, b.lhs) && node_equal(a.rhs, o, b.rhs);
        }
    }

    template <class T>
    T eval_node(int id, std::span<const T> x) const {
        const Node& nd = pool_[static_cast<std::size_t>(id)];
        switch (nd.kind) {
            case Kind::number: return T(nd.num);
            case Kind::variable: return x[static_cast<std::size_t>(nd.var)];
            case Kind::neg: return -eval_node<T>(nd.lhs, x);
            case Kind::add: return eval_node<T>(nd.lhs, x) + eval_node<T>(nd.rhs, x);
            case Kind::sub: return eval_node<T>(nd.lhs, x) - eval_node<T>(nd.rhs, x);
            case Kind::mul: return eval_node<T>(nd.lhs, x) * eval_node<T>(nd.rhs, x);
            case Kind::div: {
                T den = eval_node<T>(nd.rhs, x);
                if (value_of(den) == 0.0) throw EvalDomainError("division by zero", nd.src);
                return eval_node<T>(nd.lhs, x) / den;
            }
            case Kind::pow: {
                T base = eval_node<T>(nd.lhs, x);
                double c = nd.num;
                bool integral = (c == std::floor(c)) && std::isfinite(c);
                double bv = value_of(base);
                if (!integral && bv < 0.0)
                    throw EvalDomainError("negative base with non-integer exponent", nd.src);
                if (bv == 0.0 && c < 0.0) throw EvalDomainError("zero base with negative exponent", nd.src);
                using finsler::pow;
                using std::pow;
                return pow(base, c);
            }
            case Kind::call: {
                T arg = eval_node<T>(nd.lhs, x);
                double av = value_of(arg);
                using std::cos, std::exp, std::log, std::sin, std::sqrt, std::tanh;
                switch (nd.func) {
                    case Func::sin: return sin(arg);
                    case Func::cos: return cos(arg);
                    case Func::exp: return exp(arg);
                    case Func::log:
                        if (av <= 0.0) throw EvalDomainError("log of nonpositive value", nd.src);
                        return log(arg);
                    case Func::sqrt:
                        if (av < 0.0) throw EvalDomainError("sqrt of negative value", nd.src);
                        return sqrt(arg);
                    case Func::tanh: return tanh(arg);
                }
                throw EvalDomainError("unknown function", nd.src);
            }
        }
        throw EvalDomainError("corrupt expression tree", nd.src);
    }

    // Precedence: 0 sum, 1 product, 2 power/unary, 3 atom.
    std::string print_node(int id, int parent_prec) const {
        const Node& nd = pool_[static_cast<std::size_t>(id)];
        std::string s;
        int prec = 3;
        switch (nd.kind) {
            case Kind::number: s = format_number(nd.num); break;
            case Kind::variable: s = "x" + std::to_string(nd.var + 1); break;
            case Kind::neg:
                prec = 2;
                s = "-" + print_node(nd.lhs, 2);
                break;
            case Kind::add:
                prec = 0;
                s = print_node(nd.lhs, 0) + " + " + print_node(nd.rhs, 1);
                break;
            case Kind::sub:
                prec = 0;
                s = print_node(nd.lhs, 0) + " - " + print_node(nd.rhs, 1);
                break;
            case Kind::mul:
                prec = 1;
                s = print_node(nd.lhs, 1) + "*" + print_node(nd.rhs, 2);
                break;
            case Kind::div:
                prec = 1;
                s = print_node(nd.lhs, 1) + "/" + print_node(nd.rhs, 2);
                break;
            case Kind::pow: {
                prec = 2;
                std::string e = format_number(nd.num);
                if (nd.num < 0.0) e = "(" + e + ")";
                s = print_node(nd.lhs, 3) + "^" + e;
                break;
            }
            case Kind::call:
                s = std::string(func_name(nd.func)) + "(" + print_node(nd.lhs, 0) + ")";
                break;
        }
        if (prec < parent_prec) s = "(" + s + ")";
        return s;
    }

    static std::string format_number(double v) {
        char buf[40];
        for (int prec : {15, 17}) {
            std::snprintf(buf, sizeof buf, "%.*g", prec, v);
            double back = 0.0;
            std::sscanf(buf, "%lf", &back);
            if (back == v) break;
        }
        return buf;
    }
};

namespace detail {

class ExprParser {
public:
    ExprParser(std::string_view src, int arity, ScalarExpr& out)
        : src_(src), arity_(arity), out_(out) {}

    void run() {
        if (src_.find_first_not_of(" \t\r\n") == std::string_view::npos)
            throw ParseError("empty expression", 0);
        out_.arity_ = arity_;
        out_.source_ = std::string(src_);
        out_.root_ = parse_expr();
        skip_ws();
        if (pos_ < src_.size())
            throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
    }

private:
    std::string_view src_;
    int arity_;
    ScalarExpr& out_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\r' || src_[pos_] == '\n'))
            ++pos_;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    int add(ScalarExpr::Node nd) {
        out_.pool_.push_back(nd);
        return static_cast<int>(out_.pool_.size()) - 1;
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            skip_ws();
            if (pos_ >= src_.size()) break;
            char c = src_[pos_];
            if (c != '+' && c != '-') break;
            std::size_t at = pos_++;
            int rhs = parse_term();
            ScalarExpr::Node nd;
            nd.kind = (c == '+') ? ScalarExpr::Kind::add : ScalarExpr::Kind::sub;
            nd.lhs = lhs;
            nd.rhs = rhs;
            nd.src = at;
            lhs = add(nd);
        }
        return lhs;
    }

    int parse_term() {
        int lhs = parse_factor();
        for (;;) {
            skip_ws();
            if (pos_ >= src_.size()) break;
            char c = src_[pos_];
            if (c != '*' && c != '/') break;
            std::size_t at = pos_++;
            int rhs = parse_factor();
            ScalarExpr::Node nd;
            nd.kind = (c == '*') ? ScalarExpr::Kind::mul : ScalarExpr::Kind::div;
            nd.lhs = lhs;
            nd.rhs = rhs;
            nd.src = at;
            lhs = add(nd);
        }
        return lhs;
    }

    int parse_factor() {
        int base = parse_atom();
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '^') {
            std::size_t at = pos_++;
            int e = parse_atom();
            if (!out_.subtree_constant(e))
                throw ParseError("exponent must be a constant expression", at);
            std::vector<double> dummy(static_cast<std::size_t>(arity_), 0.0);
            double c = out_.eval_node<double>(e, std::span<const double>(dummy));
            ScalarExpr::Node nd;
            nd.kind = ScalarExpr::Kind::pow;
            nd.lhs = base;
            nd.num = c;
            nd.src = at;
            return add(nd);
        }
        return base;
    }

    int parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("expected operand, found end of input", pos_);
        char c = src_[pos_];
        if (c == '-') {
            std::size_t at = pos_++;
            // unary minus applies to a whole factor, so x^k binds first
            int inner = parse_factor();
            ScalarExpr::Node nd;
            nd.kind = ScalarExpr::Kind::neg;
            nd.lhs = inner;
            nd.src = at;
            return add(nd);
        }
        if (c == '(') {
            ++pos_;
            int inner = parse_expr();
            skip_ws();
            if (pos_ >= src_.size() || src_[pos_] != ')')
                throw ParseError("expected ')'", pos_);
            ++pos_;
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    int parse_number() {
        std::size_t at = pos_;
        const char* begin = src_.data() + pos_;
        const char* end = src_.data() + src_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc() || ptr == begin) throw ParseError("malformed number", at);
        pos_ += static_cast<std::size_t>(ptr - begin);
        ScalarExpr::Node nd;
        nd.kind = ScalarExpr::Kind::number;
        nd.num = v;
        nd.src = at;
        return add(nd);
    }

    int parse_ident() {
        std::size_t at = pos_;
        std::size_t end = pos_;
        while (end < src_.size() && ((src_[end] >= 'a' && src_[end] <= 'z') ||
                                     (src_[end] >= 'A' && src_[end] <= 'Z')))
            ++end;
        std::string_view name = src_.substr(pos_, end - pos_);
        if (name == "x") {
            pos_ = end;
            if (pos_ >= src_.size() || src_[pos_] < '0' || src_[pos_] > '9')
                throw ParseError("expected coordinate index after 'x'", pos_);
            int idx = 0;
            while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
                idx = idx * 10 + (src_[pos_] - '0');
                ++pos_;
            }
            if (idx < 1 || idx > arity_)
                throw ParseError("variable index out of range: x" + std::to_string(idx) +
                                     " with " + std::to_string(arity_) + " coordinates",
                                 at);
            ScalarExpr::Node nd;
            nd.kind = ScalarExpr::Kind::variable;
            nd.var = idx - 1;
            nd.src = at;
            return add(nd);
        }
        static constexpr std::pair<std::string_view, Func> kFuncs[] = {
            {"sin", Func::sin}, {"cos", Func::cos},   {"exp", Func::exp},
            {"log", Func::log}, {"sqrt", Func::sqrt}, {"tanh", Func::tanh},
        };
        for (auto [fname, f] : kFuncs) {
            if (name == fname) {
                pos_ = end;
                skip_ws();
                if (pos_ >= src_.size() || src_[pos_] != '(')
                    throw ParseError("expected '(' after function name", pos_);
                ++pos_;
                int arg = parse_expr();
                skip_ws();
                if (pos_ >= src_.size() || src_[pos_] != ')')
                    throw ParseError("expected ')'", pos_);
                ++pos_;
                ScalarExpr::Node nd;
                nd.kind = ScalarExpr::Kind::call;
                nd.func = f;
                nd.lhs = arg;
                nd.src = at;
                return add(nd);
            }
        }
        throw ParseError("unknown identifier '" + std::string(name) + "'", at);
    }
};

}  // namespace detail

inline ScalarExpr parse_expression(std::string_view src, int n) {
    if (n < 1) throw ParseError("coordinate count must be positive", 0);
    ScalarExpr e;
    detail::ExprParser p(src, n, e);
    p.run();
    return e;
}

// Value, gradient and Hessian by nested duals. Each unordered pair (i,j) is
// evaluated once and mirrored, so the Hessian is symmetric bit for bit.
inline Jet2 eval_jet2(const ScalarExpr& e, const Vec& x) {
    int n = e.arity();
    Jet2 jet;
    jet.value = e.eval<double>(x);
    jet.grad.assign(static_cast<std::size_t>(n), 0.0);
    jet.hess = Mat(n);
    std::vector<D2> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            for (int k = 0; k < n; ++k)
                xs[static_cast<std::size_t>(k)] =
                    seed2(x[static_cast<std::size_t>(k)], k == i ? 1.0 : 0.0, k == j ? 1.0 : 0.0);
            D2 r = e.eval<D2>(xs);
            if (j == i) jet.grad[static_cast<std::size_t>(i)] = der1(r);
            double h = der12(r);
            jet.hess(i, j) = h;
            jet.hess(j, i) = h;
        }
    }
    return jet;
}

inline double eval_scalar(const ScalarExpr& e, const Vec& x) { return e.eval<double>(x); }

}  // namespace finsler
