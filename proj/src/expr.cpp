#include "vemc/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace vemc {

namespace {

bool is_ident_start(char c) {
    return c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

} // namespace

bool is_identifier(std::string_view name) {
    if (name.empty() || !is_ident_start(name[0])) return false;
    for (char c : name.substr(1)) {
        if (!is_ident_char(c)) return false;
    }
    return true;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        switch (c) {
        case '+': out.push_back({TokenKind::Plus, i, "+"}); ++i; continue;
        case '-': out.push_back({TokenKind::Minus, i, "-"}); ++i; continue;
        case '*': out.push_back({TokenKind::Star, i, "*"}); ++i; continue;
        case '/': out.push_back({TokenKind::Slash, i, "/"}); ++i; continue;
        case '(': out.push_back({TokenKind::LParen, i, "("}); ++i; continue;
        case ')': out.push_back({TokenKind::RParen, i, ")"}); ++i; continue;
        default: break;
        }
        if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
            const std::size_t start = i;
            while (i < text.size() && is_digit(text[i])) ++i;
            if (i < text.size() && text[i] == '.') {
                ++i;
                while (i < text.size() && is_digit(text[i])) ++i;
            }
            // Exponent only when well formed; otherwise leave it for the
            // identifier lexer so "1e" is a number followed by a name.
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < text.size() && is_digit(text[j])) {
                    ++j;
                    while (j < text.size() && is_digit(text[j])) ++j;
                    i = j;
                }
            }
            const std::string_view spelling = text.substr(start, i - start);
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(spelling.data(), spelling.data() + spelling.size(), value);
            if (ec != std::errc() || ptr != spelling.data() + spelling.size()) {
                throw LexError("malformed number '" + std::string(spelling) + "'", start);
            }
            out.push_back({TokenKind::Number, start, std::string(spelling), value});
            continue;
        }
        if (is_ident_start(c)) {
            const std::size_t start = i;
            while (i < text.size() && is_ident_char(text[i])) ++i;
            out.push_back({TokenKind::Identifier, start, std::string(text.substr(start, i - start))});
            continue;
        }
        throw LexError(std::string("illegal character '") + c + "'", i);
    }
    out.push_back({TokenKind::End, text.size(), ""});
    return out;
}

Expr Expr::number(double value) { return Expr(Number{value}); }
Expr Expr::variable(std::string name) { return Expr(Variable{std::move(name)}); }
Expr Expr::negate(Expr operand) {
    return Expr(Negate{std::make_unique<Expr>(std::move(operand))});
}
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
    return Expr(Binary{op, std::make_unique<Expr>(std::move(lhs)), std::make_unique<Expr>(std::move(rhs))});
}

namespace {

// expression := term (('+' | '-') term)*
// term       := factor (('*' | '/') factor)*
// factor     := '-' factor | primary
// primary    := number | identifier | '(' expression ')'
class Parser {
public:
    explicit Parser(std::span<const Token> tokens) : tokens_(tokens) {}

    Expr parse_expression() {
        Expr lhs = parse_term();
        while (peek().kind == TokenKind::Plus || peek().kind == TokenKind::Minus) {
            const BinaryOp op = take().kind == TokenKind::Plus ? BinaryOp::Add : BinaryOp::Sub;
            lhs = Expr::binary(op, std::move(lhs), parse_term());
        }
        return lhs;
    }

    const Token& peek() const { return tokens_[pos_]; }

private:
    Expr parse_term() {
        Expr lhs = parse_factor();
        while (peek().kind == TokenKind::Star || peek().kind == TokenKind::Slash) {
            const BinaryOp op = take().kind == TokenKind::Star ? BinaryOp::Mul : BinaryOp::Div;
            lhs = Expr::binary(op, std::move(lhs), parse_factor());
        }
        return lhs;
    }

    Expr parse_factor() {
        if (peek().kind == TokenKind::Minus) {
            take();
            return Expr::negate(parse_factor());
        }
        return parse_primary();
    }

    Expr parse_primary() {
        const Token& tok = peek();
        switch (tok.kind) {
        case TokenKind::Number:
            take();
            return Expr::number(tok.value);
        case TokenKind::Identifier:
            take();
            return Expr::variable(tok.text);
        case TokenKind::LParen: {
            take();
            Expr inner = parse_expression();
            if (peek().kind != TokenKind::RParen) {
                throw ParseError("unclosed parenthesis", peek().offset);
            }
            take();
            return inner;
        }
        case TokenKind::End:
            throw ParseError("unexpected end of expression", tok.offset);
        default:
            throw ParseError("unexpected token '" + tok.text + "'", tok.offset);
        }
    }

    const Token& take() { return tokens_[pos_++]; }

    std::span<const Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse(std::string_view text) {
    const std::vector<Token> tokens = tokenize(text);
    if (tokens.front().kind == TokenKind::End) {
        throw ParseError("empty expression", 0);
    }
    Parser parser(tokens);
    Expr expr = parser.parse_expression();
    if (parser.peek().kind != TokenKind::End) {
        throw ParseError("unexpected token '" + parser.peek().text + "'", parser.peek().offset);
    }
    return expr;
}

namespace {

void unparse_into(const Expr& expr, std::string& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Number>) {
                std::array<char, 32> buf{};
                std::snprintf(buf.data(), buf.size(), "%.17g", node.value);
                out += buf.data();
            } else if constexpr (std::is_same_v<T, Expr::Variable>) {
                out += node.name;
            } else if constexpr (std::is_same_v<T, Expr::Negate>) {
                out += "(-";
                unparse_into(*node.operand, out);
                out += ')';
            } else {
                out += '(';
                unparse_into(*node.lhs, out);
                switch (node.op) {
                case BinaryOp::Add: out += " + "; break;
                case BinaryOp::Sub: out += " - "; break;
                case BinaryOp::Mul: out += " * "; break;
                case BinaryOp::Div: out += " / "; break;
                }
                unparse_into(*node.rhs, out);
                out += ')';
            }
        },
        expr.node());
}

} // namespace

std::string unparse(const Expr& expr) {
    std::string out;
    unparse_into(expr, out);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.node().index() != b.node().index()) return false;
    return std::visit(
        [&](const auto& na) {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node());
            if constexpr (std::is_same_v<T, Expr::Number>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<T, Expr::Variable>) {
                return na.name == nb.name;
            } else if constexpr (std::is_same_v<T, Expr::Negate>) {
                return structurally_equal(*na.operand, *nb.operand);
            } else {
                return na.op == nb.op && structurally_equal(*na.lhs, *nb.lhs) &&
                       structurally_equal(*na.rhs, *nb.rhs);
            }
        },
        a.node());
}

double evaluate(const Expr& expr, const std::map<std::string, double>& bindings) {
    return std::visit(
        [&](const auto& node) -> double {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Number>) {
                return node.value;
            } else if constexpr (std::is_same_v<T, Expr::Variable>) {
                const auto it = bindings.find(node.name);
                if (it == bindings.end()) {
                    throw EvalError("unbound identifier '" + node.name + "'");
                }
                return it->second;
            } else if constexpr (std::is_same_v<T, Expr::Negate>) {
                return -evaluate(*node.operand, bindings);
            } else {
                const double lhs = evaluate(*node.lhs, bindings);
                const double rhs = evaluate(*node.rhs, bindings);
                switch (node.op) {
                case BinaryOp::Add: return lhs + rhs;
                case BinaryOp::Sub: return lhs - rhs;
                case BinaryOp::Mul: return lhs * rhs;
                case BinaryOp::Div:
                    if (rhs == 0.0) throw EvalError("division by zero");
                    return lhs / rhs;
                }
                throw EvalError("corrupt expression node");
            }
        },
        expr.node());
}

namespace {

void collect_variables(const Expr& expr, std::set<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Variable>) {
                out.insert(node.name);
            } else if constexpr (std::is_same_v<T, Expr::Negate>) {
                collect_variables(*node.operand, out);
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                collect_variables(*node.lhs, out);
                collect_variables(*node.rhs, out);
            }
        },
        expr.node());
}

constexpr std::size_t kMaxEvalStack = 64;

} // namespace

std::set<std::string> free_variables(const Expr& expr) {
    std::set<std::string> out;
    collect_variables(expr, out);
    return out;
}

double CompiledExpr::eval(std::span<const double> slots) const {
    if (slots.size() != slot_count_) {
        throw EvalError("expected " + std::to_string(slot_count_) + " slot values, got " +
                        std::to_string(slots.size()));
    }
    std::array<double, kMaxEvalStack> stack;
    std::size_t top = 0;
    for (const Instr& instr : code_) {
        switch (instr.op) {
        case OpCode::PushConst: stack[top++] = constants_[instr.index]; break;
        case OpCode::PushSlot: stack[top++] = slots[instr.index]; break;
        case OpCode::Negate: stack[top - 1] = -stack[top - 1]; break;
        case OpCode::Add: --top; stack[top - 1] += stack[top]; break;
        case OpCode::Sub: --top; stack[top - 1] -= stack[top]; break;
        case OpCode::Mul: --top; stack[top - 1] *= stack[top]; break;
        case OpCode::Div:
            --top;
            if (stack[top] == 0.0) throw EvalError("division by zero");
            stack[top - 1] /= stack[top];
            break;
        }
    }
    return stack[0];
}

CompiledExpr compile(const Expr& expr, std::span<const std::string> slot_names) {
    CompiledExpr compiled;
    compiled.slot_count_ = slot_names.size();

    std::size_t depth = 0;
    std::size_t max_depth = 0;
    const auto push = [&] {
        ++depth;
        max_depth = std::max(max_depth, depth);
    };

    const auto emit = [&](const Expr& e, const auto& self) -> void {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, Expr::Number>) {
                    compiled.constants_.push_back(node.value);
                    compiled.code_.push_back(
                        {CompiledExpr::OpCode::PushConst,
                         static_cast<std::uint32_t>(compiled.constants_.size() - 1)});
                    push();
                } else if constexpr (std::is_same_v<T, Expr::Variable>) {
                    const auto it = std::find(slot_names.begin(), slot_names.end(), node.name);
                    if (it == slot_names.end()) {
                        throw EvalError("unbound identifier '" + node.name + "'");
                    }
                    compiled.code_.push_back(
                        {CompiledExpr::OpCode::PushSlot,
                         static_cast<std::uint32_t>(it - slot_names.begin())});
                    push();
                } else if constexpr (std::is_same_v<T, Expr::Negate>) {
                    self(*node.operand, self);
                    compiled.code_.push_back({CompiledExpr::OpCode::Negate, 0});
                } else {
                    self(*node.lhs, self);
                    self(*node.rhs, self);
                    switch (node.op) {
                    case BinaryOp::Add: compiled.code_.push_back({CompiledExpr::OpCode::Add, 0}); break;
                    case BinaryOp::Sub: compiled.code_.push_back({CompiledExpr::OpCode::Sub, 0}); break;
                    case BinaryOp::Mul: compiled.code_.push_back({CompiledExpr::OpCode::Mul, 0}); break;
                    case BinaryOp::Div: compiled.code_.push_back({CompiledExpr::OpCode::Div, 0}); break;
                    }
                    --depth;
                }
            },
            e.node());
    };
    emit(expr, emit);

    if (max_depth > kMaxEvalStack) {
        throw ConfigError("expression too deep to compile");
    }
    return compiled;
}

} // namespace vemc
