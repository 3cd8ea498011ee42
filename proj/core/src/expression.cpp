#include "krein/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "krein/errors.hpp"

namespace krein {

namespace {

using Fn = std::function<double(double)>;

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Fn run() {
        Fn e = expr();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw SpecError("expression error: " + why, 0, static_cast<int>(pos_) + 1);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Fn expr() {
        Fn lhs = term();
        for (;;) {
            if (eat('+')) {
                Fn rhs = term();
                lhs = [lhs, rhs](double t) { return lhs(t) + rhs(t); };
            } else if (eat('-')) {
                Fn rhs = term();
                lhs = [lhs, rhs](double t) { return lhs(t) - rhs(t); };
            } else {
                return lhs;
            }
        }
    }

    Fn term() {
        Fn lhs = factor();
        for (;;) {
            if (eat('*')) {
                Fn rhs = factor();
                lhs = [lhs, rhs](double t) { return lhs(t) * rhs(t); };
            } else if (eat('/')) {
                Fn rhs = factor();
                lhs = [lhs, rhs](double t) { return lhs(t) / rhs(t); };
            } else {
                return lhs;
            }
        }
    }

    Fn factor() {
        Fn base = unary();
        if (eat('^')) {
            Fn exponent = factor();  // right associative
            return [base, exponent](double t) { return std::pow(base(t), exponent(t)); };
        }
        return base;
    }

    Fn unary() {
        bool negate = false;
        for (;;) {
            if (eat('-'))
                negate = !negate;
            else if (eat('+'))
                ;
            else
                break;
        }
        Fn p = primary();
        if (negate)
            return [p](double t) { return -p(t); };
        return p;
    }

    Fn primary() {
        skip_ws();
        if (pos_ >= text_.size())
            fail("expected a value");

        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Fn e = expr();
            if (!eat(')'))
                fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        if (std::isalpha(static_cast<unsigned char>(c)))
            return word();
        fail(std::string("unexpected character '") + c + "'");
    }

    Fn number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin)
            fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return [v](double) { return v; };
    }

    Fn word() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name = text_.substr(start, pos_ - start);

        if (name == "t")
            return [](double t) { return t; };
        if (name == "pi")
            return [](double) { return M_PI; };

        if (name == "exp" || name == "sin" || name == "cos" || name == "abs") {
            if (!eat('('))
                fail("expected '(' after '" + name + "'");
            Fn arg = expr();
            if (!eat(')'))
                fail("expected ')'");
            if (name == "exp") return [arg](double t) { return std::exp(arg(t)); };
            if (name == "sin") return [arg](double t) { return std::sin(arg(t)); };
            if (name == "cos") return [arg](double t) { return std::cos(arg(t)); };
            return [arg](double t) { return std::abs(arg(t)); };
        }
        pos_ = start;
        fail("unknown identifier '" + name + "'");
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.fn_ = Parser(text).run();
    e.source_ = text;
    return e;
}

}  // namespace krein
