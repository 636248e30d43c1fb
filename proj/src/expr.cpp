#include "frachjb/expr.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <numbers>

namespace frachjb {

struct Expression::Node {
    enum class Kind { constant, time, state, control, neg, add, sub, mul, div, pow, call };
    enum class Fn { sin, cos, tan, exp, log, sqrt, abs, tanh, sinh, cosh, atan, pow, min, max };

    Kind kind;
    double value = 0.0;
    std::size_t index = 0;
    Fn fn = Fn::sin;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

struct FunctionInfo {
    const char* name;
    Node::Fn fn;
    std::size_t arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sin", Node::Fn::sin, 1},   {"cos", Node::Fn::cos, 1},   {"tan", Node::Fn::tan, 1},
    {"exp", Node::Fn::exp, 1},   {"log", Node::Fn::log, 1},   {"sqrt", Node::Fn::sqrt, 1},
    {"abs", Node::Fn::abs, 1},   {"tanh", Node::Fn::tanh, 1}, {"sinh", Node::Fn::sinh, 1},
    {"cosh", Node::Fn::cosh, 1}, {"atan", Node::Fn::atan, 1}, {"pow", Node::Fn::pow, 2},
    {"min", Node::Fn::min, 2},   {"max", Node::Fn::max, 2},
};

NodePtr make(Node::Kind kind, std::vector<NodePtr> args = {}) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->args = std::move(args);
    return n;
}

class Parser {
public:
    Parser(const std::string& text, std::size_t n_states, std::size_t n_controls, bool allow_u)
        : s_(text), n_states_(n_states), n_controls_(n_controls), allow_u_(allow_u) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

    bool uses_controls = false;

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ExpressionError(msg, pos_ + 1); }

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

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Node::Kind::add, {lhs, term()});
            } else if (accept('-')) {
                lhs = make(Node::Kind::sub, {lhs, term()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Node::Kind::mul, {lhs, unary()});
            } else if (accept('/')) {
                lhs = make(Node::Kind::div, {lhs, unary()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Kind::neg, {unary()});
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return make(Node::Kind::pow, {base, unary()});
        return base;
    }

    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const char* begin = s_.data() + pos_;
        double v = 0.0;
        auto [end, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
        if (ec != std::errc() || end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::constant;
        n->value = v;
        return n;
    }

    NodePtr name() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            ++pos_;
        }
        const std::string id = s_.substr(start, pos_ - start);
        skip();
        if (pos_ < s_.size() && s_[pos_] == '(') return call(id, start);

        auto n = std::make_shared<Node>();
        if (id == "t") {
            n->kind = Node::Kind::time;
            return n;
        }
        if (id == "pi" || id == "e") {
            n->kind = Node::Kind::constant;
            n->value = id == "pi" ? std::numbers::pi : std::numbers::e;
            return n;
        }
        if ((id[0] == 'x' || id[0] == 'u') && id.size() > 1) {
            std::size_t k = 0;
            const auto [end, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), k);
            if (ec == std::errc() && end == id.data() + id.size() && k >= 1) {
                const bool state = id[0] == 'x';
                const std::size_t limit = state ? n_states_ : n_controls_;
                if (!state && !allow_u_) {
                    pos_ = start;
                    fail("control '" + id + "' is not available in a terminal operand");
                }
                if (k > limit) {
                    pos_ = start;
                    fail("'" + id + "' is not declared (" + std::to_string(limit) +
                         (state ? " states)" : " controls)"));
                }
                if (!state) uses_controls = true;
                n->kind = state ? Node::Kind::state : Node::Kind::control;
                n->index = k - 1;
                return n;
            }
        }
        pos_ = start;
        fail("unknown name '" + id + "'");
    }

    NodePtr call(const std::string& id, std::size_t start) {
        const FunctionInfo* info = nullptr;
        for (const auto& f : kFunctions) {
            if (id == f.name) info = &f;
        }
        if (!info) {
            pos_ = start;
            fail("unknown function '" + id + "'");
        }
        accept('(');
        std::vector<NodePtr> args{expr()};
        while (accept(',')) args.push_back(expr());
        if (!accept(')')) fail("expected ')'");
        if (args.size() != info->arity) {
            pos_ = start;
            fail("function '" + id + "' takes " + std::to_string(info->arity) + " argument(s)");
        }
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::call;
        n->fn = info->fn;
        n->args = std::move(args);
        return n;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    std::size_t n_states_;
    std::size_t n_controls_;
    bool allow_u_;
};

double eval(const Node& n, double t, std::span<const double> x, std::span<const double> u) {
    auto arg = [&](std::size_t i) { return eval(*n.args[i], t, x, u); };
    switch (n.kind) {
        case Node::Kind::constant: return n.value;
        case Node::Kind::time: return t;
        case Node::Kind::state: return x[n.index];
        case Node::Kind::control: return u[n.index];
        case Node::Kind::neg: return -arg(0);
        case Node::Kind::add: return arg(0) + arg(1);
        case Node::Kind::sub: return arg(0) - arg(1);
        case Node::Kind::mul: return arg(0) * arg(1);
        case Node::Kind::div: return arg(0) / arg(1);
        case Node::Kind::pow: {
            const double b = arg(0);
            const double e = arg(1);
            if (e == 2.0) return b * b;
            return std::pow(b, e);
        }
        case Node::Kind::call: break;
    }
    switch (n.fn) {
        case Node::Fn::sin: return std::sin(arg(0));
        case Node::Fn::cos: return std::cos(arg(0));
        case Node::Fn::tan: return std::tan(arg(0));
        case Node::Fn::exp: return std::exp(arg(0));
        case Node::Fn::log: return std::log(arg(0));
        case Node::Fn::sqrt: return std::sqrt(arg(0));
        case Node::Fn::abs: return std::abs(arg(0));
        case Node::Fn::tanh: return std::tanh(arg(0));
        case Node::Fn::sinh: return std::sinh(arg(0));
        case Node::Fn::cosh: return std::cosh(arg(0));
        case Node::Fn::atan: return std::atan(arg(0));
        case Node::Fn::pow: return std::pow(arg(0), arg(1));
        case Node::Fn::min: return std::min(arg(0), arg(1));
        case Node::Fn::max: return std::max(arg(0), arg(1));
    }
    return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& text, std::size_t n_states,
                             std::size_t n_controls, bool allow_controls) {
    Parser parser(text, n_states, n_controls, allow_controls);
    Expression e;
    e.text_ = text;
    e.root_ = parser.parse();
    e.uses_controls_ = parser.uses_controls;
    return e;
}

double Expression::operator()(double t, std::span<const double> x,
                              std::span<const double> u) const {
    return eval(*root_, t, x, u);
}

}  // namespace frachjb
