#include "confrig/expression.hpp"

#include "confrig/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace confrig {

struct Expression::Node {
    enum class Kind { Number, Variable, Unary, Binary, Call } kind = Kind::Number;
    double number = 0.0;
    std::string name;
    char op = 0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

const std::vector<std::string>& functions() {
    static const std::vector<std::string> f = {"sin", "cos", "tan", "exp", "log", "sqrt", "abs"};
    return f;
}

class Parser {
public:
    Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars) {}

    NodePtr run() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError("expression \"" + s_ + "\": " + msg + " at offset " + std::to_string(pos_));
    }

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

    static NodePtr binary(char op, NodePtr a, NodePtr b) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Binary;
        n->op = op;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }

    NodePtr expr() {
        NodePtr e = term();
        for (;;) {
            if (accept('+')) e = binary('+', e, term());
            else if (accept('-')) e = binary('-', e, term());
            else return e;
        }
    }

    NodePtr term() {
        NodePtr e = unary();
        for (;;) {
            if (accept('*')) e = binary('*', e, unary());
            else if (accept('/')) e = binary('/', e, unary());
            else return e;
        }
    }

    NodePtr unary() {
        if (accept('+')) return unary();
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Unary;
            n->op = '-';
            n->lhs = unary();
            return n;
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return binary('^', base, unary());
        return base;
    }

    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (accept('(')) {
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            auto n = std::make_shared<Node>();
            const char* first = s_.data() + pos_;
            const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), n->number);
            if (ec != std::errc()) fail("bad number");
            pos_ += static_cast<std::size_t>(ptr - first);
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            auto n = std::make_shared<Node>();
            n->name = name;
            if (std::find(functions().begin(), functions().end(), name) != functions().end()) {
                if (!accept('(')) fail("expected '(' after " + name);
                n->kind = Node::Kind::Call;
                n->lhs = expr();
                if (!accept(')')) fail("expected ')'");
                return n;
            }
            if (name == "pi") {
                n->number = std::numbers::pi;
                return n;
            }
            if (std::find(vars_.begin(), vars_.end(), name) == vars_.end()) fail("unknown name '" + name + "'");
            n->kind = Node::Kind::Variable;
            return n;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

double evaluate(const Node& n, const std::map<std::string, double>& vars) {
    switch (n.kind) {
        case Node::Kind::Number:
            return n.number;
        case Node::Kind::Variable: {
            const auto it = vars.find(n.name);
            if (it == vars.end()) throw InputError("expression: unbound variable '" + n.name + "'");
            return it->second;
        }
        case Node::Kind::Unary:
            return -evaluate(*n.lhs, vars);
        case Node::Kind::Binary: {
            const double a = evaluate(*n.lhs, vars);
            const double b = evaluate(*n.rhs, vars);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                default: return std::pow(a, b);
            }
        }
        case Node::Kind::Call: {
            const double a = evaluate(*n.lhs, vars);
            if (n.name == "sin") return std::sin(a);
            if (n.name == "cos") return std::cos(a);
            if (n.name == "tan") return std::tan(a);
            if (n.name == "exp") return std::exp(a);
            if (n.name == "log") return std::log(a);
            if (n.name == "sqrt") return std::sqrt(a);
            return std::abs(a);
        }
    }
    return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables) {
    Expression e;
    e.text_ = text;
    e.root_ = Parser(text, variables).run();
    return e;
}

double Expression::eval(const std::map<std::string, double>& vars) const { return evaluate(*root_, vars); }

double eval_constant(const std::string& text, const std::map<std::string, double>& vars) {
    std::vector<std::string> names;
    for (const auto& [k, v] : vars) names.push_back(k);
    return Expression::parse(text, names).eval(vars);
}

}  // namespace confrig
