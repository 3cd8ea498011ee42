#pragma once

#include <functional>
#include <memory>
#include <string>

namespace krein {

// Minimal real-valued arithmetic expressions in one variable t:
//
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := unary ('^' factor)?
//   unary   := ('+'|'-')* primary
//   primary := NUMBER | 't' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
//   FUNC    := exp | sin | cos | abs
//
// Parse errors carry a 1-based column.  The source text is retained so a
// parsed expression serializes back to exactly what was written.
class Expression {
public:
    Expression() = default;

    static Expression parse(const std::string& text);

    double operator()(double t) const { return fn_(t); }
    const std::string& source() const { return source_; }
    bool valid() const { return static_cast<bool>(fn_); }

    friend bool operator==(const Expression& a, const Expression& b) {
        return a.source_ == b.source_;
    }

private:
    std::function<double(double)> fn_;
    std::string source_;
};

}  // namespace krein
