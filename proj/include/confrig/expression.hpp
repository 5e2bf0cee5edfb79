#pragma once

// Arithmetic expressions over named variables, used for factor formulas and
// numeric fields in scenario files.
//
// Grammar: expr := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*;
// unary := ('+'|'-') unary | power; power := atom ('^' unary)?;
// atom := number | name | name '(' expr ')' | '(' expr ')'.
// '^' is right associative and binds tighter than unary minus on its left
// (-x^2 = -(x^2)). Functions: sin cos tan exp log sqrt abs. Constant: pi.

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace confrig {

class Expression {
public:
    /// Parses `text`; names other than pi, the functions and `variables`
    /// raise InputError.
    static Expression parse(const std::string& text, const std::vector<std::string>& variables = {});

    /// Unbound variables raise InputError.
    double eval(const std::map<std::string, double>& vars = {}) const;
    const std::string& text() const { return text_; }

    struct Node;

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

/// Parses and evaluates a closed expression such as "pi/3" or "1e-5".
double eval_constant(const std::string& text, const std::map<std::string, double>& vars = {});

}  // namespace confrig
