#ifndef HILFER_EXPR_HPP
#define HILFER_EXPR_HPP

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hilfer::expr {

/// Syntax error with the byte offset of the offending token and the set of
/// token kinds that would have been accepted there.
struct ParseError : std::runtime_error {
    ParseError(std::string msg, std::size_t offset, std::vector<std::string> expected);
    std::size_t offset;
    std::vector<std::string> expected;
};

struct UnknownIdentifierError : std::runtime_error {
    UnknownIdentifierError(const std::string& name, std::size_t offset);
    std::size_t offset;
};

struct MissingBindingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// ln of a non-positive value, division by zero, 0^negative, sqrt of a
/// negative value, or any operation producing a non-finite result.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Bindings = std::map<std::string, double>;

namespace ast {
struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class Kind { Literal, Variable, Unary, Binary, Call };

struct Node {
    Kind kind;
    double literal = 0.0;          // Literal
    std::string name;              // Variable / Call
    char op = 0;                   // Unary ('-') / Binary ('+','-','*','/','^')
    std::vector<NodePtr> children;
};
}  // namespace ast

/// Immutable parsed expression over the variables {t, x, y}. Evaluation is
/// pure and reentrant; instances may be shared freely across threads.
class Expr {
  public:
    Expr() = default;

    double eval(const Bindings& bindings) const;

    /// Grammar-faithful text form; parse(pretty()) yields an identical tree.
    std::string pretty() const;

    const std::string& source() const { return source_; }
    const ast::NodePtr& root() const { return root_; }
    bool empty() const { return root_ == nullptr; }

    /// true when the variable occurs anywhere in the tree
    bool uses(const std::string& var) const;

    friend Expr parse(const std::string& source);

  private:
    ast::NodePtr root_;
    std::string source_;
};

/// Recursive-descent parse of the scalar expression language: numeric
/// literals (decimal and scientific), variables t|x|y, + - * / ^ with the
/// usual precedence (^ right-associative and binding tighter than unary
/// minus), parentheses, and the functions pow, abs, exp, ln, sin, cos,
/// sqrt, min, max.
Expr parse(const std::string& source);

/// Structural equality of two parsed trees (round-trip test helper).
bool structurally_equal(const Expr& a, const Expr& b);

}  // namespace hilfer::expr

#endif
