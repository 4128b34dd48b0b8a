#include "hilfer/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace hilfer::expr {

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += v[i];
    }
    return out;
}

}  // namespace

ParseError::ParseError(std::string msg, std::size_t off, std::vector<std::string> exp)
    : std::runtime_error(msg + " at byte " + std::to_string(off) + " (expected: " + join(exp) + ")"),
      offset(off),
      expected(std::move(exp)) {}

UnknownIdentifierError::UnknownIdentifierError(const std::string& name, std::size_t off)
    : std::runtime_error("unknown identifier '" + name + "' at byte " + std::to_string(off)),
      offset(off) {}

namespace {

using ast::Kind;
using ast::Node;
using ast::NodePtr;

NodePtr make_literal(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Literal;
    n->literal = v;
    return n;
}

NodePtr make_var(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->name = std::move(name);
    return n;
}

NodePtr make_unary(char op, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Unary;
    n->op = op;
    n->children = {std::move(a)};
    return n;
}

NodePtr make_binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Binary;
    n->op = op;
    n->children = {std::move(a), std::move(b)};
    return n;
}

NodePtr make_call(std::string name, std::vector<NodePtr> args) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Call;
    n->name = std::move(name);
    n->children = std::move(args);
    return n;
}

int function_arity(const std::string& name) {
    if (name == "pow" || name == "min" || name == "max") return 2;
    if (name == "abs" || name == "exp" || name == "ln" || name == "sin" ||
        name == "cos" || name == "sqrt")
        return 1;
    return -1;
}

class Parser {
  public:
    explicit Parser(const std::string& src) : src_(src) {}

    NodePtr run() {
        NodePtr e = expression();
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError("trailing input", pos_, {"operator", "end of input"});
        return e;
    }

  private:
    const std::string& src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError("syntax error", pos_, {what});
    }

    // expression := term (('+'|'-') term)*
    NodePtr expression() {
        NodePtr a = term();
        for (;;) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                a = make_binary(c, a, term());
            } else {
                return a;
            }
        }
    }

    // term := factor (('*'|'/') factor)*
    NodePtr term() {
        NodePtr a = factor();
        for (;;) {
            char c = peek();
            if (c == '*' || c == '/') {
                ++pos_;
                a = make_binary(c, a, factor());
            } else {
                return a;
            }
        }
    }

    // factor := '-' factor | power ; unary minus binds looser than '^'
    NodePtr factor() {
        if (accept('-')) return make_unary('-', factor());
        return power();
    }

    // power := atom ('^' factor)? ; right-associative
    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return make_binary('^', base, factor());
        return base;
    }

    NodePtr atom() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            NodePtr e = expression();
            expect(')', "')'");
            return e;
        }
        if (std::isdigit((unsigned char)c) || c == '.') return number();
        if (std::isalpha((unsigned char)c) || c == '_') return identifier();
        throw ParseError("syntax error", pos_, {"number", "variable", "function", "'('", "'-'"});
    }

    NodePtr number() {
        std::size_t start = pos_;
        const char* begin = src_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", start, {"number"});
        pos_ += (std::size_t)(end - begin);
        return make_literal(v);
    }

    NodePtr identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
            ++pos_;
        std::string name = src_.substr(start, pos_ - start);
        if (name == "t" || name == "x" || name == "y") return make_var(name);
        int arity = function_arity(name);
        if (arity < 0) throw UnknownIdentifierError(name, start);
        expect('(', "'('");
        std::vector<NodePtr> args;
        args.push_back(expression());
        for (int i = 1; i < arity; ++i) {
            expect(',', "','");
            args.push_back(expression());
        }
        expect(')', "')'");
        return make_call(name, std::move(args));
    }
};

double check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

double eval_node(const Node& n, const Bindings& b) {
    switch (n.kind) {
        case Kind::Literal:
            return n.literal;
        case Kind::Variable: {
            auto it = b.find(n.name);
            if (it == b.end()) throw MissingBindingError("no binding for variable '" + n.name + "'");
            return it->second;
        }
        case Kind::Unary:
            return -eval_node(*n.children[0], b);
        case Kind::Binary: {
            double a = eval_node(*n.children[0], b);
            double c = eval_node(*n.children[1], b);
            switch (n.op) {
                case '+': return check_finite(a + c, "addition");
                case '-': return check_finite(a - c, "subtraction");
                case '*': return check_finite(a * c, "multiplication");
                case '/':
                    if (c == 0.0) throw DomainError("division by zero");
                    return check_finite(a / c, "division");
                case '^':
                    if (a == 0.0 && c < 0.0) throw DomainError("0 raised to a negative power");
                    return check_finite(std::pow(a, c), "power");
            }
            break;
        }
        case Kind::Call: {
            double a = eval_node(*n.children[0], b);
            if (n.name == "abs") return std::fabs(a);
            if (n.name == "exp") return check_finite(std::exp(a), "exp");
            if (n.name == "ln") {
                if (a <= 0.0) throw DomainError("ln of a non-positive value");
                return std::log(a);
            }
            if (n.name == "sin") return std::sin(a);
            if (n.name == "cos") return std::cos(a);
            if (n.name == "sqrt") {
                if (a < 0.0) throw DomainError("sqrt of a negative value");
                return std::sqrt(a);
            }
            double c = eval_node(*n.children[1], b);
            if (n.name == "pow") {
                if (a == 0.0 && c < 0.0) throw DomainError("0 raised to a negative power");
                return check_finite(std::pow(a, c), "pow");
            }
            if (n.name == "min") return std::min(a, c);
            if (n.name == "max") return std::max(a, c);
            break;
        }
    }
    throw std::logic_error("expr: corrupt node");
}

void print_node(const Node& n, std::ostream& os) {
    switch (n.kind) {
        case Kind::Literal: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.literal;
            os << tmp.str();
            return;
        }
        case Kind::Variable:
            os << n.name;
            return;
        case Kind::Unary:
            os << "(-";
            print_node(*n.children[0], os);
            os << ")";
            return;
        case Kind::Binary:
            os << "(";
            print_node(*n.children[0], os);
            os << " " << n.op << " ";
            print_node(*n.children[1], os);
            os << ")";
            return;
        case Kind::Call:
            os << n.name << "(";
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i) os << ", ";
                print_node(*n.children[i], os);
            }
            os << ")";
            return;
    }
}

bool nodes_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.op != b.op || a.name != b.name) return false;
    if (a.kind == Kind::Literal && a.literal != b.literal) return false;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!nodes_equal(*a.children[i], *b.children[i])) return false;
    return true;
}

bool node_uses(const Node& n, const std::string& var) {
    if (n.kind == Kind::Variable) return n.name == var;
    for (const auto& c : n.children)
        if (node_uses(*c, var)) return true;
    return false;
}

}  // namespace

Expr parse(const std::string& source) {
    Parser p(source);
    Expr e;
    e.root_ = p.run();
    e.source_ = source;
    return e;
}

double Expr::eval(const Bindings& bindings) const {
    if (!root_) throw std::logic_error("eval of empty Expr");
    return eval_node(*root_, bindings);
}

std::string Expr::pretty() const {
    if (!root_) return "";
    std::ostringstream os;
    print_node(*root_, os);
    return os.str();
}

bool Expr::uses(const std::string& var) const {
    return root_ && node_uses(*root_, var);
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.empty() || b.empty()) return a.empty() == b.empty();
    return nodes_equal(*a.root(), *b.root());
}

}  // namespace hilfer::expr
