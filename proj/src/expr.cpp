#include "lvdiff/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace lvdiff {

using Node = ExprNode;
using Ptr = std::shared_ptr<const ExprNode>;

bool operator==(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size()) return false;
    if (a.kind == Node::Kind::constant && !(a.value == b.value)) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!(*a.args[i] == *b.args[i])) return false;
    return true;
}

namespace {

Ptr make(Node::Kind k, std::vector<Ptr> args = {}, double value = 0.0, std::string name = {}) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->args = std::move(args);
    n->value = value;
    n->name = std::move(name);
    return n;
}

bool depends_on_coordinates(const Node& n) {
    if (n.kind == Node::Kind::x || n.kind == Node::Kind::y) return true;
    for (const auto& a : n.args)
        if (depends_on_coordinates(*a)) return true;
    return false;
}

int arity(const std::string& f) {
    if (f == "sin" || f == "cos" || f == "exp" || f == "abs") return 1;
    if (f == "max" || f == "min") return 2;
    return -1;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Ptr parse() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("empty expression", 1);
        Ptr e = expr();
        skip();
        if (pos_ < s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", col());
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    int col() const { return static_cast<int>(pos_) + 1; }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' before end of input", col());
            throw ParseError(std::string("expected '") + c + "'", col());
        }
    }

    Ptr expr() {
        Ptr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Node::Kind::add, {lhs, term()});
            else if (accept('-')) lhs = make(Node::Kind::sub, {lhs, term()});
            else return lhs;
        }
    }

    Ptr term() {
        Ptr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Node::Kind::mul, {lhs, unary()});
            else if (accept('/')) lhs = make(Node::Kind::div, {lhs, unary()});
            else return lhs;
        }
    }

    Ptr unary() {
        if (accept('-')) return make(Node::Kind::neg, {unary()});
        return power();
    }

    Ptr power() {
        Ptr base = primary();
        skip();
        const int at = col();
        if (accept('^')) {
            Ptr ex = unary();
            if (depends_on_coordinates(*ex)) throw ParseError("exponent must be constant", at + 1);
            return make(Node::Kind::pow, {base, ex});
        }
        return base;
    }

    Ptr primary() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", col());
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) throw ParseError("malformed number", col());
            pos_ += static_cast<std::size_t>(end - begin);
            return make(Node::Kind::constant, {}, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const int start = col();
            std::string id;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                id += s_[pos_++];
            if (id == "x") return make(Node::Kind::x);
            if (id == "y") return make(Node::Kind::y);
            if (id == "pi") return make(Node::Kind::constant, {}, std::numbers::pi);
            const int n = arity(id);
            if (n < 0) throw ParseError("unknown identifier '" + id + "'", start);
            expect('(');
            std::vector<Ptr> args{expr()};
            for (int k = 1; k < n; ++k) {
                expect(',');
                args.push_back(expr());
            }
            expect(')');
            return make(Node::Kind::call, std::move(args), 0.0, id);
        }
        if (accept('(')) {
            Ptr e = expr();
            expect(')');
            return e;
        }
        throw ParseError(std::string("unexpected '") + c + "'", col());
    }
};

struct EvalError {
    const char* what;
};

double eval(const Node& n, double x, double y, bool strict) {
    switch (n.kind) {
        case Node::Kind::constant: return n.value;
        case Node::Kind::x: return x;
        case Node::Kind::y: return y;
        case Node::Kind::add: return eval(*n.args[0], x, y, strict) + eval(*n.args[1], x, y, strict);
        case Node::Kind::sub: return eval(*n.args[0], x, y, strict) - eval(*n.args[1], x, y, strict);
        case Node::Kind::mul: return eval(*n.args[0], x, y, strict) * eval(*n.args[1], x, y, strict);
        case Node::Kind::div: {
            const double den = eval(*n.args[1], x, y, strict);
            if (strict && den == 0.0) throw EvalError{"division by zero"};
            return eval(*n.args[0], x, y, strict) / den;
        }
        case Node::Kind::neg: return -eval(*n.args[0], x, y, strict);
        case Node::Kind::pow: return std::pow(eval(*n.args[0], x, y, strict), eval(*n.args[1], x, y, strict));
        case Node::Kind::call: {
            const double a = eval(*n.args[0], x, y, strict);
            if (n.name == "sin") return std::sin(a);
            if (n.name == "cos") return std::cos(a);
            if (n.name == "exp") return std::exp(a);
            if (n.name == "abs") return std::abs(a);
            const double b = eval(*n.args[1], x, y, strict);
            return n.name == "max" ? std::max(a, b) : std::min(a, b);
        }
    }
    return 0.0;
}

void print(const Node& n, std::string& out) {
    switch (n.kind) {
        case Node::Kind::constant: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            return;
        }
        case Node::Kind::x: out += 'x'; return;
        case Node::Kind::y: out += 'y'; return;
        case Node::Kind::neg:
            out += "(-";
            print(*n.args[0], out);
            out += ')';
            return;
        case Node::Kind::call:
            out += n.name + '(';
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ", ";
                print(*n.args[i], out);
            }
            out += ')';
            return;
        default: break;
    }
    const char* op = n.kind == Node::Kind::add ? " + "
                   : n.kind == Node::Kind::sub ? " - "
                   : n.kind == Node::Kind::mul ? " * "
                   : n.kind == Node::Kind::div ? " / "
                                               : "^";
    out += '(';
    print(*n.args[0], out);
    out += op;
    print(*n.args[1], out);
    out += ')';
}

}  // namespace

Expr parse_expression(const std::string& src) { return Expr(Parser(src).parse()); }

double Expr::evaluate(double x, double y) const { return eval(*root_, x, y, false); }

ScalarField Expr::sample(const Grid& grid) const {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto [x, y] = grid.coordinate(k);
        try {
            v[k] = eval(*root_, x, y, true);
        } catch (const EvalError& e) {
            throw ConfigError(std::string(e.what) + " in '" + to_string() + "' at x=" + std::to_string(x) +
                              (grid.dim() == 2 ? ", y=" + std::to_string(y) : ""));
        }
        if (!std::isfinite(v[k]))
            throw ConfigError("non-finite value of '" + to_string() + "' at x=" + std::to_string(x));
    }
    return ScalarField(grid, std::move(v));
}

std::string Expr::to_string() const {
    std::string s;
    print(*root_, s);
    return s;
}

}  // namespace lvdiff
