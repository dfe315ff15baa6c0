#include "exmax/exprlang.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace exmax::expr {

namespace {

const std::array<std::string_view, 6> kFunctions = {"exp", "ln", "sqrt", "abs", "sin", "cos"};

bool is_function(std::string_view name) {
    for (auto f : kFunctions)
        if (f == name) return true;
    return false;
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t offset;
    double number = 0.0;
    std::string text;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        current_.offset = pos_;
        current_.text.clear();
        if (pos_ >= src_.size()) {
            current_.kind = Tok::End;
            return;
        }
        char c = src_[pos_];
        switch (c) {
            case '+': current_.kind = Tok::Plus; ++pos_; return;
            case '-': current_.kind = Tok::Minus; ++pos_; return;
            case '*': current_.kind = Tok::Star; ++pos_; return;
            case '/': current_.kind = Tok::Slash; ++pos_; return;
            case '^': current_.kind = Tok::Caret; ++pos_; return;
            case '(': current_.kind = Tok::LParen; ++pos_; return;
            case ')': current_.kind = Tok::RParen; ++pos_; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                          src_[pos_] == '_'))
                ++pos_;
            current_.kind = Tok::Ident;
            current_.text.assign(src_.substr(start, pos_ - start));
            return;
        }
        throw ParseError(pos_, "a token");
    }

    void lex_number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // bare 'e' after digits is not an exponent
            }
        }
        std::string text(src_.substr(start, pos_ - start));
        if (text == ".") throw ParseError(start, "a number");
        current_.kind = Tok::Number;
        current_.number = std::strtod(text.c_str(), nullptr);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token current_;
};

NodePtr make_number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Number;
    n->number = v;
    return n;
}

class Parser {
  public:
    explicit Parser(std::string_view src) : lex_(src) {}

    NodePtr parse() {
        NodePtr e = expression(0);
        const Token& t = lex_.peek();
        if (t.kind != Tok::End) throw ParseError(t.offset, "end of input");
        return e;
    }

  private:
    // Binding powers: + - (10), * / (20), ^ (30, right-assoc). Unary minus
    // binds tighter than ^.
    static int lbp(Tok t) {
        switch (t) {
            case Tok::Plus:
            case Tok::Minus: return 10;
            case Tok::Star:
            case Tok::Slash: return 20;
            case Tok::Caret: return 30;
            default: return 0;
        }
    }

    NodePtr expression(int min_bp) {
        NodePtr left = prefix();
        for (;;) {
            Tok t = lex_.peek().kind;
            int bp = lbp(t);
            if (bp <= min_bp) break;
            Token op = lex_.take();
            // right-assoc '^' re-enters at bp-1
            NodePtr right = expression(t == Tok::Caret ? bp - 1 : bp);
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Binary;
            n->op = op_char(t);
            n->lhs = left;
            n->rhs = right;
            left = n;
        }
        return left;
    }

    static char op_char(Tok t) {
        switch (t) {
            case Tok::Plus: return '+';
            case Tok::Minus: return '-';
            case Tok::Star: return '*';
            case Tok::Slash: return '/';
            case Tok::Caret: return '^';
            default: return 0;
        }
    }

    NodePtr prefix() {
        Token t = lex_.take();
        switch (t.kind) {
            case Tok::Number: return make_number(t.number);
            case Tok::Minus: {
                auto n = std::make_shared<Node>();
                n->kind = NodeKind::Unary;
                n->op = '-';
                n->lhs = prefix();  // unary minus binds tighter than '^'
                return n;
            }
            case Tok::LParen: {
                NodePtr e = expression(0);
                const Token& close = lex_.peek();
                if (close.kind != Tok::RParen) throw ParseError(close.offset, "')'");
                lex_.take();
                return e;
            }
            case Tok::Ident: return identifier(t);
            default: throw ParseError(t.offset, "a number, '(', '-', or identifier");
        }
    }

    NodePtr identifier(const Token& t) {
        auto n = std::make_shared<Node>();
        if (t.text == "x") {
            n->kind = NodeKind::Variable;
            return n;
        }
        if (t.text == "pi" || t.text == "e") {
            n->kind = NodeKind::Constant;
            n->name = t.text;
            return n;
        }
        if (is_function(t.text)) {
            const Token& open = lex_.peek();
            if (open.kind != Tok::LParen) throw ParseError(open.offset, "'(' after function name");
            lex_.take();
            NodePtr arg = expression(0);
            const Token& close = lex_.peek();
            if (close.kind != Tok::RParen) throw ParseError(close.offset, "')'");
            lex_.take();
            n->kind = NodeKind::Call;
            n->name = t.text;
            n->lhs = arg;
            return n;
        }
        throw UnknownIdentifier(t.offset, t.text);
    }

    Lexer lex_;
};

int precedence_of(const Node& n) {
    switch (n.kind) {
        case NodeKind::Binary:
            return (n.op == '+' || n.op == '-') ? 10 : (n.op == '*' || n.op == '/') ? 20 : 30;
        case NodeKind::Unary: return 40;
        default: return 100;
    }
}

void print(const NodePtr& n, std::string& out);

void print_child(const NodePtr& child, int parent_prec, bool needs_paren_on_equal,
                 std::string& out) {
    bool paren = precedence_of(*child) < parent_prec ||
                 (needs_paren_on_equal && precedence_of(*child) == parent_prec);
    if (paren) out += '(';
    print(child, out);
    if (paren) out += ')';
}

void print(const NodePtr& n, std::string& out) {
    switch (n->kind) {
        case NodeKind::Number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n->number);
            out += buf;
            break;
        }
        case NodeKind::Variable: out += 'x'; break;
        case NodeKind::Constant: out += n->name; break;
        case NodeKind::Unary:
            out += '-';
            print_child(n->lhs, 40, false, out);
            break;
        case NodeKind::Call:
            out += n->name;
            out += '(';
            print(n->lhs, out);
            out += ')';
            break;
        case NodeKind::Binary: {
            int prec = precedence_of(*n);
            bool right_assoc = n->op == '^';
            print_child(n->lhs, prec, right_assoc, out);
            out += n->op;
            print_child(n->rhs, prec, !right_assoc, out);
            break;
        }
    }
}

}  // namespace

NodePtr parse(std::string_view text) { return Parser(text).parse(); }

double eval_expr(const NodePtr& ast, double x) {
    switch (ast->kind) {
        case NodeKind::Number: return ast->number;
        case NodeKind::Variable: return x;
        case NodeKind::Constant: return ast->name == "pi" ? std::numbers::pi : std::numbers::e;
        case NodeKind::Unary: return -eval_expr(ast->lhs, x);
        case NodeKind::Call: {
            double a = eval_expr(ast->lhs, x);
            if (ast->name == "exp") return std::exp(a);
            if (ast->name == "ln") {
                if (a <= 0.0) throw Error(Errc::ExpressionDomain, "ln of non-positive value");
                return std::log(a);
            }
            if (ast->name == "sqrt") {
                if (a < 0.0) throw Error(Errc::ExpressionDomain, "sqrt of negative value");
                return std::sqrt(a);
            }
            if (ast->name == "abs") return std::fabs(a);
            if (ast->name == "sin") return std::sin(a);
            return std::cos(a);
        }
        case NodeKind::Binary: {
            double l = eval_expr(ast->lhs, x);
            double r = eval_expr(ast->rhs, x);
            switch (ast->op) {
                case '+': return l + r;
                case '-': return l - r;
                case '*': return l * r;
                case '/':
                    if (r == 0.0) throw Error(Errc::ExpressionDomain, "division by zero");
                    return l / r;
                case '^': return std::pow(l, r);
            }
            break;
        }
    }
    throw Error(Errc::ExpressionDomain, "malformed AST");
}

std::string to_string(const NodePtr& ast) {
    std::string out;
    print(ast, out);
    return out;
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case NodeKind::Number: return a->number == b->number;
        case NodeKind::Variable: return true;
        case NodeKind::Constant: return a->name == b->name;
        case NodeKind::Unary: return a->op == b->op && structurally_equal(a->lhs, b->lhs);
        case NodeKind::Call: return a->name == b->name && structurally_equal(a->lhs, b->lhs);
        case NodeKind::Binary:
            return a->op == b->op && structurally_equal(a->lhs, b->lhs) &&
                   structurally_equal(a->rhs, b->rhs);
    }
    return false;
}

}  // namespace exmax::expr
