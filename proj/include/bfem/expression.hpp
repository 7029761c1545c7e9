#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace bfem {

/// Arithmetic expression in x and y: numbers, + - * / ^, parentheses,
/// pi, and sin cos tan exp log sqrt abs. Compiled once, evaluated often.
class Expression {
public:
    /// Throws InvalidArgument with the offending column on syntax errors.
    explicit Expression(std::string_view text);
    ~Expression();
    Expression(const Expression&);
    Expression& operator=(const Expression&);
    Expression(Expression&&) noexcept;
    Expression& operator=(Expression&&) noexcept;

    [[nodiscard]] double operator()(double x, double y = 0.0) const;
    [[nodiscard]] const std::string& text() const noexcept { return text_; }

    struct Node;

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

}  // namespace bfem
