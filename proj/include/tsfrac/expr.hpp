#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsfrac/errors.hpp"
#include "tsfrac/gammafn.hpp"

namespace tsfrac {

enum class Var { theta, p, h, pa };

inline std::string_view var_name(Var v) {
    switch (v) {
    case Var::theta: return "theta";
    case Var::p: return "p";
    case Var::h: return "h";
    case Var::pa: return "pa";
    }
    return "?";
}

struct Bindings {
    double theta = 0.0;
    double p = 0.0;
    double h = 0.0;
    double pa = 0.0;

    double get(Var v) const {
        switch (v) {
        case Var::theta: return theta;
        case Var::p: return p;
        case Var::h: return h;
        case Var::pa: return pa;
        }
        return 0.0;
    }
};

/**
 * Immutable arithmetic expression over the config variables.
 *
 * Grammar (loosest to tightest): + -, * /, unary -, ^ (right associative),
 * atoms. Functions: exp, abs, sqrt, sin, cos, ln, gamma. Constants: e, pi.
 * Whitespace is insignificant. Evaluation is pure; a non-finite intermediate
 * value raises NonFiniteResult instead of propagating.
 */
class Expr {
    enum class Kind { Number, Variable, ConstE, ConstPi, Unary, Binary, Call };
    enum class Fn { Exp, Abs, Sqrt, Sin, Cos, Ln, Gamma };

    struct Node {
        Kind kind;
        double number = 0.0;
        Var var = Var::theta;
        char op = 0; // + - * / ^ for Binary, '-' for Unary
        Fn fn = Fn::Exp;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };
    using NodePtr = std::shared_ptr<const Node>;

public:
    Expr() = default;

    static Expr parse(std::string_view text, std::span<const Var> allowed,
                      std::string_view role) {
        Parser p(text, allowed, role);
        Expr e;
        e.root_ = p.parse_full();
        return e;
    }

    static Expr parse(std::string_view text, std::initializer_list<Var> allowed,
                      std::string_view role) {
        std::vector<Var> vars(allowed);
        return parse(text, std::span<const Var>(vars), role);
    }

    bool empty() const { return root_ == nullptr; }

    double eval(const Bindings& b) const {
        if (!root_)
            throw ExpressionEvalError("eval of empty expression");
        return eval_node(*root_, b);
    }

    /// Canonical printer; parsing the result reproduces the same tree.
    std::string str() const {
        std::string out;
        if (root_)
            print_node(*root_, out, 0);
        return out;
    }

    friend bool operator==(const Expr& a, const Expr& b) {
        return node_equal(a.root_.get(), b.root_.get());
    }

private:
    NodePtr root_;

    static double eval_node(const Node& n, const Bindings& b) {
        double v = 0.0;
        switch (n.kind) {
        case Kind::Number: v = n.number; break;
        case Kind::Variable: v = b.get(n.var); break;
        case Kind::ConstE: v = 2.718281828459045235360287; break;
        case Kind::ConstPi: v = kPi; break;
        case Kind::Unary: v = -eval_node(*n.lhs, b); break;
        case Kind::Binary: {
            const double l = eval_node(*n.lhs, b);
            const double r = eval_node(*n.rhs, b);
            switch (n.op) {
            case '+': v = l + r; break;
            case '-': v = l - r; break;
            case '*': v = l * r; break;
            case '/': v = l / r; break;
            case '^': v = std::pow(l, r); break;
            }
            break;
        }
        case Kind::Call: {
            const double a = eval_node(*n.lhs, b);
            switch (n.fn) {
            case Fn::Exp: v = std::exp(a); break;
            case Fn::Abs: v = std::abs(a); break;
            case Fn::Sqrt: v = std::sqrt(a); break;
            case Fn::Sin: v = std::sin(a); break;
            case Fn::Cos: v = std::cos(a); break;
            case Fn::Ln: v = std::log(a); break;
            case Fn::Gamma: v = gamma_fn(a); break;
            }
            break;
        }
        }
        if (!std::isfinite(v))
            throw NonFiniteResult("expression produced a non-finite value");
        return v;
    }

    // Precedence levels: 1 additive, 2 multiplicative, 3 unary minus,
    // 4 power, 5 atom.
    static int prec(const Node& n) {
        switch (n.kind) {
        case Kind::Binary:
            if (n.op == '+' || n.op == '-') return 1;
            if (n.op == '*' || n.op == '/') return 2;
            return 4;
        case Kind::Unary: return 3;
        default: return 5;
        }
    }

    static void print_node(const Node& n, std::string& out, int) {
        switch (n.kind) {
        case Kind::Number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.number);
            if (n.number < 0.0) {
                out += '(';
                out += buf;
                out += ')';
            } else {
                out += buf;
            }
            break;
        }
        case Kind::Variable: out += var_name(n.var); break;
        case Kind::ConstE: out += 'e'; break;
        case Kind::ConstPi: out += "pi"; break;
        case Kind::Unary:
            out += '-';
            print_child(*n.lhs, out, prec(*n.lhs) < 3);
            break;
        case Kind::Binary: {
            const int pr = prec(n);
            if (n.op == '^') {
                // right associative: parenthesize left at <= , right at <
                print_child(*n.lhs, out, prec(*n.lhs) <= pr);
                out += '^';
                print_child(*n.rhs, out, prec(*n.rhs) < pr);
            } else {
                print_child(*n.lhs, out, prec(*n.lhs) < pr);
                out += n.op;
                // strict structure preservation: a-(b-c) must keep parens
                print_child(*n.rhs, out, prec(*n.rhs) <= pr);
            }
            break;
        }
        case Kind::Call:
            out += fn_name(n.fn);
            out += '(';
            print_node(*n.lhs, out, 0);
            out += ')';
            break;
        }
    }

    static void print_child(const Node& n, std::string& out, bool parens) {
        if (parens) out += '(';
        print_node(n, out, 0);
        if (parens) out += ')';
    }

    static std::string_view fn_name(Fn f) {
        switch (f) {
        case Fn::Exp: return "exp";
        case Fn::Abs: return "abs";
        case Fn::Sqrt: return "sqrt";
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Ln: return "ln";
        case Fn::Gamma: return "gamma";
        }
        return "?";
    }

    static bool node_equal(const Node* a, const Node* b) {
        if (a == b) return true;
        if (!a || !b) return false;
        if (a->kind != b->kind) return false;
        switch (a->kind) {
        case Kind::Number: return a->number == b->number;
        case Kind::Variable: return a->var == b->var;
        case Kind::ConstE:
        case Kind::ConstPi: return true;
        case Kind::Unary: return node_equal(a->lhs.get(), b->lhs.get());
        case Kind::Binary:
            return a->op == b->op && node_equal(a->lhs.get(), b->lhs.get()) &&
                   node_equal(a->rhs.get(), b->rhs.get());
        case Kind::Call:
            return a->fn == b->fn && node_equal(a->lhs.get(), b->lhs.get());
        }
        return false;
    }

    class Parser {
    public:
        Parser(std::string_view text, std::span<const Var> allowed,
               std::string_view role)
            : text_(text), allowed_(allowed), role_(role) {}

        NodePtr parse_full() {
            skip_ws();
            if (pos_ >= text_.size())
                throw SyntaxError(pos_, "an expression");
            auto e = parse_additive();
            skip_ws();
            if (pos_ < text_.size())
                throw SyntaxError(pos_, "end of expression");
            return e;
        }

    private:
        NodePtr parse_additive() {
            auto lhs = parse_multiplicative();
            for (;;) {
                skip_ws();
                if (peek() == '+' || peek() == '-') {
                    const char op = take();
                    lhs = binary(op, lhs, parse_multiplicative());
                } else {
                    return lhs;
                }
            }
        }

        NodePtr parse_multiplicative() {
            auto lhs = parse_unary();
            for (;;) {
                skip_ws();
                if (peek() == '*' || peek() == '/') {
                    const char op = take();
                    lhs = binary(op, lhs, parse_unary());
                } else {
                    return lhs;
                }
            }
        }

        NodePtr parse_unary() {
            skip_ws();
            if (peek() == '-') {
                take();
                auto n = std::make_shared<Node>();
                n->kind = Kind::Unary;
                n->op = '-';
                n->lhs = parse_unary();
                return n;
            }
            return parse_power();
        }

        NodePtr parse_power() {
            auto base = parse_atom();
            skip_ws();
            if (peek() == '^') {
                take();
                // exponent may carry its own unary minus: 2^-3
                return binary('^', base, parse_unary());
            }
            return base;
        }

        NodePtr parse_atom() {
            skip_ws();
            const char c = peek();
            if (c == '(') {
                take();
                auto e = parse_additive();
                expect(')');
                return e;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
                return parse_number();
            if (std::isalpha(static_cast<unsigned char>(c)))
                return parse_identifier();
            throw SyntaxError(pos_, "a number, name, or '('");
        }

        NodePtr parse_number() {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '.'))
                ++pos_;
            if (pos_ < text_.size() &&
                (text_[pos_] == 'e' || text_[pos_] == 'E')) {
                // exponent only when followed by digits or a signed digit run
                std::size_t q = pos_ + 1;
                if (q < text_.size() && (text_[q] == '+' || text_[q] == '-'))
                    ++q;
                if (q < text_.size() &&
                    std::isdigit(static_cast<unsigned char>(text_[q]))) {
                    pos_ = q;
                    while (pos_ < text_.size() &&
                           std::isdigit(
                               static_cast<unsigned char>(text_[pos_])))
                        ++pos_;
                }
            }
            double value = 0.0;
            const auto res = std::from_chars(text_.data() + start,
                                             text_.data() + pos_, value);
            if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
                throw SyntaxError(start, "a numeric literal");
            auto n = std::make_shared<Node>();
            n->kind = Kind::Number;
            n->number = value;
            return n;
        }

        NodePtr parse_identifier() {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_'))
                ++pos_;
            const std::string name(text_.substr(start, pos_ - start));

            static constexpr std::pair<std::string_view, Fn> fns[] = {
                {"exp", Fn::Exp}, {"abs", Fn::Abs}, {"sqrt", Fn::Sqrt},
                {"sin", Fn::Sin}, {"cos", Fn::Cos}, {"ln", Fn::Ln},
                {"gamma", Fn::Gamma},
            };
            for (const auto& [fname, fn] : fns) {
                if (name == fname) {
                    skip_ws();
                    expect('(');
                    auto arg = parse_additive();
                    expect(')');
                    auto n = std::make_shared<Node>();
                    n->kind = Kind::Call;
                    n->fn = fn;
                    n->lhs = std::move(arg);
                    return n;
                }
            }
            if (name == "e") {
                auto n = std::make_shared<Node>();
                n->kind = Kind::ConstE;
                return n;
            }
            if (name == "pi") {
                auto n = std::make_shared<Node>();
                n->kind = Kind::ConstPi;
                return n;
            }

            static constexpr std::pair<std::string_view, Var> vars[] = {
                {"theta", Var::theta}, {"p", Var::p}, {"h", Var::h},
                {"pa", Var::pa},
            };
            for (const auto& [vname, var] : vars) {
                if (name == vname) {
                    for (Var a : allowed_) {
                        if (a == var) {
                            auto n = std::make_shared<Node>();
                            n->kind = Kind::Variable;
                            n->var = var;
                            return n;
                        }
                    }
                    throw VariableNotAllowed(name, std::string(role_), start);
                }
            }
            throw UnknownIdentifier(name, start);
        }

        static NodePtr binary(char op, NodePtr l, NodePtr r) {
            auto n = std::make_shared<Node>();
            n->kind = Kind::Binary;
            n->op = op;
            n->lhs = std::move(l);
            n->rhs = std::move(r);
            return n;
        }

        char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
        char take() { return text_[pos_++]; }

        void expect(char c) {
            skip_ws();
            if (peek() != c)
                throw SyntaxError(pos_, std::string("'") + c + "'");
            take();
        }

        void skip_ws() {
            while (pos_ < text_.size() &&
                   std::isspace(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }

        std::string_view text_;
        std::span<const Var> allowed_;
        std::string_view role_;
        std::size_t pos_ = 0;
    };
};

} // namespace tsfrac
