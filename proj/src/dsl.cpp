#include "presic/dsl.hpp"

#include "presic/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

namespace presic::dsl {

enum class Op { number, var, lane_var, neg, add, sub, mul, div, pow, abs, sqrt, exp, log, min, max };

struct Node {
    Op op = Op::number;
    double value = 0.0;
    // var: absolute slot; lane_var: slot of coordinate 1 (lane is added at eval time)
    std::size_t slot = 0;
    std::string name;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_number(double v) {
    auto n = std::make_shared<Node>();
    n->op = Op::number;
    n->value = v;
    return n;
}

NodePtr make_op(Op op, std::vector<NodePtr> args, std::string name = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    n->name = std::move(name);
    return n;
}

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::end;
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                lex_number(t);
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                const std::size_t start = pos_;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    advance();
                }
                t.kind = Tok::ident;
                t.text = std::string(src_.substr(start, pos_ - start));
            } else {
                switch (c) {
                case '+': t.kind = Tok::plus; break;
                case '-': t.kind = Tok::minus; break;
                case '*': t.kind = Tok::star; break;
                case '/': t.kind = Tok::slash; break;
                case '^': t.kind = Tok::caret; break;
                case '(': t.kind = Tok::lparen; break;
                case ')': t.kind = Tok::rparen; break;
                case ',': t.kind = Tok::comma; break;
                default:
                    throw DslError(DslError::Kind::syntax, line_, col_,
                                   std::string("unexpected character '") + c + "'");
                }
                t.text = std::string(1, c);
                advance();
            }
            out.push_back(std::move(t));
        }
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
    }

    bool digit_at(std::size_t i) const {
        return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
    }

    void lex_number(Token& t) {
        const std::size_t start = pos_;
        while (digit_at(pos_)) advance();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            advance();
            while (digit_at(pos_)) advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (digit_at(look)) {
                while (pos_ < look) advance();
                while (digit_at(pos_)) advance();
            }
        }
        const std::string_view text = src_.substr(start, pos_ - start);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
            throw DslError(DslError::Kind::syntax, t.line, t.column,
                           "malformed number '" + std::string(text) + "'");
        }
        t.kind = Tok::number;
        t.text = std::string(text);
        t.number = value;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

std::optional<std::size_t> parse_index(std::string_view digits) {
    if (digits.empty() || digits.size() > 9) return std::nullopt;
    std::size_t v = 0;
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    return v;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, const Context& ctx) : toks_(std::move(tokens)), ctx_(ctx) {}

    NodePtr run() {
        NodePtr e = expr();
        if (peek().kind != Tok::end) fail(peek(), "unexpected '" + peek().text + "'");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    [[noreturn]] void fail(const Token& at, const std::string& msg) const {
        const std::string where = at.kind == Tok::end ? " at end of input" : "";
        throw DslError(DslError::Kind::syntax, at.line, at.column, msg + where);
    }

    void expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(peek(), std::string("expected ") + what);
        ++pos_;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
            const Op op = next().kind == Tok::plus ? Op::add : Op::sub;
            lhs = make_op(op, {lhs, term()});
        }
        return lhs;
    }

    NodePtr term() {
        NodePtr lhs = unary();
        while (peek().kind == Tok::star || peek().kind == Tok::slash) {
            const Op op = next().kind == Tok::star ? Op::mul : Op::div;
            lhs = make_op(op, {lhs, unary()});
        }
        return lhs;
    }

    NodePtr unary() {
        if (peek().kind == Tok::minus) {
            ++pos_;
            return make_op(Op::neg, {unary()});
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (peek().kind == Tok::caret) {
            ++pos_;
            return make_op(Op::pow, {base, unary()});
        }
        return base;
    }

    NodePtr primary() {
        const Token& t = next();
        switch (t.kind) {
        case Tok::number:
            return make_number(t.number);
        case Tok::lparen: {
            NodePtr inner = expr();
            expect(Tok::rparen, "')'");
            return inner;
        }
        case Tok::ident:
            if (peek().kind == Tok::lparen) return call(t);
            return variable(t);
        case Tok::end:
            fail(t, "expected an operand");
        default:
            fail(t, "unexpected '" + t.text + "'");
        }
    }

    NodePtr call(const Token& name) {
        struct Fn {
            const char* name;
            Op op;
            std::size_t min_args;
            bool variadic;
        };
        static constexpr Fn fns[] = {
            {"abs", Op::abs, 1, false}, {"sqrt", Op::sqrt, 1, false}, {"exp", Op::exp, 1, false},
            {"log", Op::log, 1, false}, {"min", Op::min, 2, true},    {"max", Op::max, 2, true},
        };
        const Fn* fn = nullptr;
        for (const auto& f : fns) {
            if (name.text == f.name) fn = &f;
        }
        if (fn == nullptr) {
            throw DslError(DslError::Kind::unknown_identifier, name.line, name.column,
                           "unknown function '" + name.text + "'");
        }
        expect(Tok::lparen, "'('");
        std::vector<NodePtr> args{expr()};
        while (peek().kind == Tok::comma) {
            ++pos_;
            args.push_back(expr());
        }
        expect(Tok::rparen, "')'");
        if (args.size() < fn->min_args || (!fn->variadic && args.size() != fn->min_args)) {
            throw DslError(DslError::Kind::bad_call, name.line, name.column,
                           "wrong number of arguments to '" + name.text + "'");
        }
        return make_op(fn->op, std::move(args), name.text);
    }

    [[noreturn]] void unknown(const Token& t) const {
        throw DslError(DslError::Kind::unknown_identifier, t.line, t.column,
                       "unknown identifier '" + t.text + "'");
    }

    void check_range(const Token& t, std::size_t index, std::size_t limit, const char* what) const {
        if (index < 1 || index > limit) {
            throw DslError(DslError::Kind::index_out_of_range, t.line, t.column,
                           "'" + t.text + "': " + what + " index must be in 1.." + std::to_string(limit));
        }
    }

    NodePtr variable(const Token& t) {
        auto n = std::make_shared<Node>();
        n->name = t.text;
        const std::string_view s = t.text;

        if (const auto* op = std::get_if<OperatorContext>(&ctx_)) {
            if (s.size() < 2 || s[0] != 'x') unknown(t);
            const auto underscore = s.find('_');
            const auto arg = parse_index(s.substr(1, underscore == std::string_view::npos ? s.size() - 1
                                                                                          : underscore - 1));
            if (!arg) unknown(t);
            check_range(t, *arg, op->arity, "argument");
            if (underscore == std::string_view::npos) {
                n->op = Op::lane_var;
                n->slot = (*arg - 1) * op->dimension;
                return n;
            }
            const auto coord = parse_index(s.substr(underscore + 1));
            if (!coord) unknown(t);
            check_range(t, *coord, op->dimension, "coordinate");
            n->op = Op::var;
            n->slot = (*arg - 1) * op->dimension + (*coord - 1);
            return n;
        }
        if (const auto* metric = std::get_if<MetricContext>(&ctx_)) {
            if (s.size() < 2 || (s[0] != 'u' && s[0] != 'v')) unknown(t);
            const auto coord = parse_index(s.substr(1));
            if (!coord) unknown(t);
            check_range(t, *coord, metric->dimension, "coordinate");
            n->op = Op::var;
            n->slot = (s[0] == 'u' ? 0 : metric->dimension) + (*coord - 1);
            return n;
        }
        if (s != "t") unknown(t);
        n->op = Op::var;
        n->slot = 0;
        return n;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const Context& ctx_;
};

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite result in ") + what);
    return v;
}

double eval_node(const Node& n, std::span<const double> vars, std::size_t lane) {
    switch (n.op) {
    case Op::number:
        return n.value;
    case Op::var:
        return vars[n.slot];
    case Op::lane_var:
        return vars[n.slot + lane];
    case Op::neg:
        return -eval_node(*n.args[0], vars, lane);
    default:
        break;
    }

    const double a = eval_node(*n.args[0], vars, lane);
    switch (n.op) {
    case Op::abs:
        return std::abs(a);
    case Op::sqrt:
        if (a < 0.0) throw NumericError("sqrt of negative value");
        return std::sqrt(a);
    case Op::exp:
        return checked(std::exp(a), "exp");
    case Op::log:
        if (a <= 0.0) throw NumericError("log of non-positive value");
        return std::log(a);
    case Op::min:
    case Op::max: {
        double acc = a;
        for (std::size_t i = 1; i < n.args.size(); ++i) {
            const double v = eval_node(*n.args[i], vars, lane);
            acc = n.op == Op::min ? std::min(acc, v) : std::max(acc, v);
        }
        return acc;
    }
    default:
        break;
    }

    const double b = eval_node(*n.args[1], vars, lane);
    switch (n.op) {
    case Op::add:
        return checked(a + b, "addition");
    case Op::sub:
        return checked(a - b, "subtraction");
    case Op::mul:
        return checked(a * b, "multiplication");
    case Op::div:
        if (b == 0.0) throw NumericError("division by zero");
        return checked(a / b, "division");
    case Op::pow:
        if (a == 0.0 && b < 0.0) throw NumericError("division by zero in power");
        if (a < 0.0 && b != std::trunc(b)) throw NumericError("negative base with non-integer exponent");
        return checked(std::pow(a, b), "power");
    default:
        throw std::logic_error("unhandled expression node");
    }
}

const char* binary_symbol(Op op) {
    switch (op) {
    case Op::add: return " + ";
    case Op::sub: return " - ";
    case Op::mul: return " * ";
    case Op::div: return " / ";
    case Op::pow: return "^";
    default: return nullptr;
    }
}

void format_node(const Node& n, std::string& out) {
    switch (n.op) {
    case Op::number:
        out += format_number(n.value);
        return;
    case Op::var:
    case Op::lane_var:
        out += n.name;
        return;
    case Op::neg:
        out += '-';
        format_node(*n.args[0], out);
        return;
    default:
        break;
    }
    if (const char* sym = binary_symbol(n.op)) {
        out += '(';
        format_node(*n.args[0], out);
        out += sym;
        format_node(*n.args[1], out);
        out += ')';
        return;
    }
    out += n.name;
    out += '(';
    for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i > 0) out += ", ";
        format_node(*n.args[i], out);
    }
    out += ')';
}

} // namespace

std::size_t slot_count(const Context& context) {
    if (const auto* op = std::get_if<OperatorContext>(&context)) return op->arity * op->dimension;
    if (const auto* m = std::get_if<MetricContext>(&context)) return 2 * m->dimension;
    return 1;
}

Expr parse(std::string_view source, const Context& context) {
    if (source.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw DslError(DslError::Kind::syntax, 1, 1, "empty expression");
    }
    Parser parser(Lexer(source).run(), context);
    return Expr(parser.run(), std::string(source), slot_count(context));
}

double Expr::eval(std::span<const double> vars, std::size_t lane) const {
    if (!root_) throw UsageError("evaluating an empty expression");
    if (vars.size() < slots_) throw UsageError("expression environment is missing variables");
    return eval_node(*root_, vars, lane);
}

std::string Expr::format() const {
    std::string out;
    if (root_) format_node(*root_, out);
    return out;
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw std::logic_error("number formatting failed");
    return std::string(buf, ptr);
}

} // namespace presic::dsl
