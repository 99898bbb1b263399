#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vemc/errors.hpp"

namespace vemc {

enum class TokenKind { Number, Identifier, Plus, Minus, Star, Slash, LParen, RParen, End };

struct Token {
    TokenKind kind;
    std::size_t offset = 0; ///< byte offset into the source string
    std::string text;       ///< spelling (numbers and identifiers)
    double value = 0.0;     ///< numeric value (numbers only)
};

/// Split an expression string into tokens. Numbers are decimal with an
/// optional exponent; identifiers match [A-Za-z_][A-Za-z0-9_]*; whitespace is
/// skipped. The list always ends with an End token.
std::vector<Token> tokenize(std::string_view text);

bool is_identifier(std::string_view name);

enum class BinaryOp { Add, Sub, Mul, Div };

/// Immutable arithmetic expression tree over numeric literals, identifiers,
/// unary negation, and the four binary operators.
class Expr {
public:
    struct Number {
        double value;
    };
    struct Variable {
        std::string name;
    };
    struct Negate {
        std::unique_ptr<Expr> operand;
    };
    struct Binary {
        BinaryOp op;
        std::unique_ptr<Expr> lhs;
        std::unique_ptr<Expr> rhs;
    };
    using Node = std::variant<Number, Variable, Negate, Binary>;

    explicit Expr(Node node) : node_(std::move(node)) {}

    const Node& node() const noexcept { return node_; }

    static Expr number(double value);
    static Expr variable(std::string name);
    static Expr negate(Expr operand);
    static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

private:
    Node node_;
};

/// Parse with the usual precedence: * and / over + and -, left associative,
/// parentheses override, unary minus binds tighter than any binary operator.
Expr parse(std::string_view text);

/// Fully parenthesized source form; parse(unparse(e)) is structurally equal
/// to e.
std::string unparse(const Expr& expr);

bool structurally_equal(const Expr& a, const Expr& b);

/// Evaluate in IEEE double precision. Throws EvalError for an unbound
/// identifier (named in the message) or for division by zero.
double evaluate(const Expr& expr, const std::map<std::string, double>& bindings);

std::set<std::string> free_variables(const Expr& expr);

/// An expression lowered to postfix instructions with identifiers resolved to
/// slot indices; evaluation is allocation-free and safe to call concurrently.
class CompiledExpr {
public:
    double eval(std::span<const double> slots) const;
    std::size_t slot_count() const noexcept { return slot_count_; }

private:
    friend CompiledExpr compile(const Expr&, std::span<const std::string>);

    enum class OpCode : std::uint8_t { PushConst, PushSlot, Negate, Add, Sub, Mul, Div };
    struct Instr {
        OpCode op;
        std::uint32_t index = 0;
    };

    std::vector<Instr> code_;
    std::vector<double> constants_;
    std::size_t slot_count_ = 0;
};

/// Resolve every identifier of expr against slot_names (by position). Throws
/// EvalError for an identifier that is not a slot name.
CompiledExpr compile(const Expr& expr, std::span<const std::string> slot_names);

} // namespace vemc
