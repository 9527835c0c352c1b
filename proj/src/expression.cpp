#include "wzlab/expression.hpp"

#include "wzlab/errors.hpp"

#include <cctype>
#include <cmath>
#include <vector>

namespace wzlab {

struct Expression::Node {
    enum class Op { constant, variable, add, sub, mul, div, pow, neg };
    Op op = Op::constant;
    double value = 0.0;
    int variable = 0;
    std::shared_ptr<const Node> lhs, rhs;

    [[nodiscard]] double eval(const Vector& x) const {
        switch (op) {
            case Op::constant: return value;
            case Op::variable: return x[variable];
            case Op::add: return lhs->eval(x) + rhs->eval(x);
            case Op::sub: return lhs->eval(x) - rhs->eval(x);
            case Op::mul: return lhs->eval(x) * rhs->eval(x);
            case Op::div: return lhs->eval(x) / rhs->eval(x);
            case Op::pow: return std::pow(lhs->eval(x), rhs->eval(x));
            case Op::neg: return -lhs->eval(x);
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

class Parser {
public:
    Parser(const std::string& text, int dim) : text_(text), dim_(dim) {}

    NodePtr parse() {
        NodePtr root = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParameterError("expression '" + text_ + "' at column " + std::to_string(pos_ + 1) + ": " + what);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr binary(Op op, NodePtr l, NodePtr r) {
        auto n = std::make_shared<Expression::Node>();
        n->op = op;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    NodePtr expr() {
        NodePtr left = term();
        for (;;) {
            if (accept('+')) left = binary(Op::add, left, term());
            else if (accept('-')) left = binary(Op::sub, left, term());
            else return left;
        }
    }

    NodePtr term() {
        NodePtr left = unary();
        for (;;) {
            if (accept('*')) left = binary(Op::mul, left, unary());
            else if (accept('/')) left = binary(Op::div, left, unary());
            else return left;
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            auto n = std::make_shared<Expression::Node>();
            n->op = Op::neg;
            n->lhs = unary();
            return n;
        }
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return binary(Op::pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        if (accept('(')) {
            NodePtr inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == 'x') return variable();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("bad number");
        pos_ += static_cast<std::size_t>(end - begin);
        auto n = std::make_shared<Expression::Node>();
        n->value = v;
        return n;
    }

    NodePtr variable() {
        ++pos_;  // 'x'
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        int index = 1;
        if (pos_ == start) {
            if (dim_ != 1) fail("bare 'x' is only allowed for one-dimensional models; use x1..x" + std::to_string(dim_));
        } else {
            index = std::stoi(text_.substr(start, pos_ - start));
        }
        if (index < 1 || index > dim_) fail("variable x" + std::to_string(index) + " out of range 1.." + std::to_string(dim_));
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::variable;
        n->variable = index - 1;
        return n;
    }

    const std::string& text_;
    int dim_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& source, int dim) : source_(source), dim_(dim) {
    if (dim < 1) throw ParameterError("expression dimension must be >= 1");
    root_ = Parser(source_, dim_).parse();
}

double Expression::operator()(const Vector& x) const {
    if (x.size() != dim_) throw ParameterError("expression evaluated with wrong dimension");
    return root_->eval(x);
}

}  // namespace wzlab
