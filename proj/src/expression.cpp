#include "bfem/expression.hpp"

#include "bfem/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace bfem {

struct Expression::Node {
    enum class Op { Const, X, Y, Add, Sub, Mul, Div, Pow, Neg, Call } op;
    double value = 0.0;
    double (*fn)(double) = nullptr;
    std::vector<std::shared_ptr<const Node>> args;

    double eval(double x, double y) const {
        switch (op) {
            case Op::Const: return value;
            case Op::X: return x;
            case Op::Y: return y;
            case Op::Add: return args[0]->eval(x, y) + args[1]->eval(x, y);
            case Op::Sub: return args[0]->eval(x, y) - args[1]->eval(x, y);
            case Op::Mul: return args[0]->eval(x, y) * args[1]->eval(x, y);
            case Op::Div: return args[0]->eval(x, y) / args[1]->eval(x, y);
            case Op::Pow: return std::pow(args[0]->eval(x, y), args[1]->eval(x, y));
            case Op::Neg: return -args[0]->eval(x, y);
            case Op::Call: return fn(args[0]->eval(x, y));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0.0, double (*fn)(double) = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->value = value;
    n->fn = fn;
    n->args = std::move(args);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    NodePtr parse() {
        NodePtr n = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InvalidArgument("expression '" + std::string(s_) + "': " + what + " at column " +
                              std::to_string(pos_ + 1));
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

    NodePtr sum() {
        NodePtr lhs = product();
        while (true) {
            if (accept('+')) lhs = make(Op::Add, {lhs, product()});
            else if (accept('-')) lhs = make(Op::Sub, {lhs, product()});
            else return lhs;
        }
    }

    NodePtr product() {
        NodePtr lhs = unary();
        while (true) {
            if (accept('*')) lhs = make(Op::Mul, {lhs, unary()});
            else if (accept('/')) lhs = make(Op::Div, {lhs, unary()});
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Op::Neg, {unary()});
        if (accept('+')) return unary();
        return power();
    }

    // right associative; binds tighter than unary minus on its left
    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Op::Pow, {base, unary()});
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        if (accept('(')) {
            NodePtr n = sum();
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
            if (ec != std::errc()) fail("bad number");
            pos_ = static_cast<std::size_t>(ptr - s_.data());
            return make(Op::Const, {}, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string_view name = s_.substr(start, pos_ - start);
            if (name == "x") return make(Op::X);
            if (name == "y") return make(Op::Y);
            if (name == "pi") return make(Op::Const, {}, std::numbers::pi);
            double (*fn)(double) = nullptr;
            if (name == "sin") fn = [](double v) { return std::sin(v); };
            else if (name == "cos") fn = [](double v) { return std::cos(v); };
            else if (name == "tan") fn = [](double v) { return std::tan(v); };
            else if (name == "exp") fn = [](double v) { return std::exp(v); };
            else if (name == "log") fn = [](double v) { return std::log(v); };
            else if (name == "sqrt") fn = [](double v) { return std::sqrt(v); };
            else if (name == "abs") fn = [](double v) { return std::abs(v); };
            else {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "'");
            }
            if (!accept('(')) fail("expected '(' after function name");
            NodePtr arg = sum();
            if (!accept(')')) fail("expected ')'");
            return make(Op::Call, {arg}, 0.0, fn);
        }
        fail("unexpected character");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::string_view text) : text_(text), root_(Parser(text).parse()) {}
Expression::~Expression() = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

double Expression::operator()(double x, double y) const { return root_->eval(x, y); }

}  // namespace bfem
