#pragma once

#include "wzlab/linalg.hpp"

#include <memory>
#include <string>

namespace wzlab {

/// Restricted arithmetic expression over x1..xm: + - * / ^, parentheses,
/// unary minus and decimal literals. When m = 1, "x" is accepted for x1.
class Expression {
public:
    Expression(const std::string& source, int dim);

    [[nodiscard]] double operator()(const Vector& x) const;
    [[nodiscard]] const std::string& source() const noexcept { return source_; }
    [[nodiscard]] int dim() const noexcept { return dim_; }

    struct Node;

private:
    std::string source_;
    int dim_;
    std::shared_ptr<const Node> root_;
};

}  // namespace wzlab
