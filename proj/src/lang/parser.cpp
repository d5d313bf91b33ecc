#include "dfv/lang/parser.hpp"

#include <cctype>
#include <set>
#include <unordered_map>

namespace dfv::lang {

ParseError::ParseError(SourcePos pos, std::string found, std::vector<std::string> expected, std::string detail)
    : std::runtime_error([&] {
          std::string msg = std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": syntax error";
          if (!detail.empty()) msg += ": " + detail;
          msg += " (found " + found;
          if (!expected.empty()) {
              msg += ", expected ";
              for (std::size_t i = 0; i < expected.size(); ++i) {
                  if (i) msg += i + 1 == expected.size() ? " or " : ", ";
                  msg += expected[i];
              }
          }
          msg += ")";
          return msg;
      }()),
      pos_(pos),
      found_(std::move(found)),
      expected_(std::move(expected))
{
}

namespace {

enum class Tok {
    Ident,
    IntLit,
    RealLit,
    Keyword,
    Symbol,
    PropertyAnnot,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourcePos pos;
};

const std::set<std::string>& keywords()
{
    static const std::set<std::string> k = {
        "node", "returns", "var", "let", "tel", "extern", "assert", "if", "then", "else", "pre", "and",
        "or", "not", "true", "false", "bool", "int", "real",
        // recognized only to be rejected
        "when", "current", "fby", "merge", "every", "const", "type", "function",
    };
    return k;
}

const std::set<std::string>& unsupported_keywords()
{
    static const std::set<std::string> k = {"when", "current", "fby", "merge", "every", "const", "type", "function"};
    return k;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments(out);
            SourcePos pos{line_, col_};
            if (at_end()) {
                out.push_back({Tok::End, "end of input", pos});
                return out;
            }
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
                    id += advance();
                }
                out.push_back({keywords().count(id) ? Tok::Keyword : Tok::Ident, id, pos});
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string num;
                while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) num += advance();
                bool real = false;
                if (!at_end() && peek() == '.' && !(peek(1) == '.')) {
                    real = true;
                    num += advance();
                    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) num += advance();
                }
                out.push_back({real ? Tok::RealLit : Tok::IntLit, num, pos});
                continue;
            }
            static const char* two_char[] = {"->", "=>", "<>", "<=", ">="};
            bool matched = false;
            for (const char* sym : two_char) {
                if (c == sym[0] && peek(1) == sym[1]) {
                    advance();
                    advance();
                    out.push_back({Tok::Symbol, sym, pos});
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            if (std::string("(),;:=<>+-*/").find(c) != std::string::npos) {
                advance();
                out.push_back({Tok::Symbol, std::string(1, c), pos});
                continue;
            }
            throw ParseError(pos, std::string("character '") + c + "'", {}, "unexpected character");
        }
    }

private:
    [[nodiscard]] bool at_end() const { return i_ >= src_.size(); }
    [[nodiscard]] char peek(std::size_t ahead = 0) const
    {
        return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
    }
    char advance()
    {
        char c = src_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments(std::vector<Token>& out)
    {
        for (;;) {
            while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
            if (peek() == '-' && peek(1) == '-') {
                SourcePos pos{line_, col_};
                std::string_view rest = src_.substr(i_);
                bool annot = false;
                for (std::string_view marker : {"--!PROPERTY:", "--%PROPERTY"}) {
                    if (rest.substr(0, marker.size()) == marker) {
                        for (std::size_t k = 0; k < marker.size(); ++k) advance();
                        out.push_back({Tok::PropertyAnnot, std::string(marker), pos});
                        annot = true;
                        break;
                    }
                }
                // after an annotation marker the rest of the line is ordinary tokens
                if (!annot) {
                    while (!at_end() && peek() != '\n') advance();
                }
                continue;
            }
            if (peek() == '(' && peek(1) == '*') {
                SourcePos pos{line_, col_};
                advance();
                advance();
                while (!at_end() && !(peek() == '*' && peek(1) == ')')) advance();
                if (at_end()) throw ParseError(pos, "end of input", {"'*)'"}, "unterminated comment");
                advance();
                advance();
                continue;
            }
            return;
        }
    }

    std::string_view src_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

std::string describe(const Token& t)
{
    switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier '" + t.text + "'";
    case Tok::PropertyAnnot: return "property annotation";
    default: return "'" + t.text + "'";
    }
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Program program()
    {
        Program p;
        while (cur().kind != Tok::End) {
            if (is_kw("node")) {
                p.nodes.push_back(node_decl());
            } else if (is_kw("extern")) {
                p.externs.push_back(extern_decl());
            } else {
                reject_unsupported();
                fail({"'node'", "'extern'"});
            }
        }
        classify_calls(p);
        return p;
    }

    Expr lone_expression()
    {
        Expr e = expr();
        if (cur().kind != Tok::End) fail({"end of expression"});
        return e;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& next_tok() const { return toks_[std::min(pos_ + 1, toks_.size() - 1)]; }
    void bump() { if (pos_ + 1 < toks_.size()) ++pos_; }

    bool is_kw(std::string_view k) const { return cur().kind == Tok::Keyword && cur().text == k; }
    bool is_sym(std::string_view s) const { return cur().kind == Tok::Symbol && cur().text == s; }

    [[noreturn]] void fail(std::vector<std::string> expected, std::string detail = {}) const
    {
        throw ParseError(cur().pos, describe(cur()), std::move(expected), std::move(detail));
    }

    void reject_unsupported() const
    {
        if (cur().kind == Tok::Keyword && unsupported_keywords().count(cur().text)) {
            fail({}, "'" + cur().text + "' is not supported (base clock only, no constants or type declarations)");
        }
    }

    void expect_kw(std::string_view k)
    {
        if (!is_kw(k)) {
            reject_unsupported();
            fail({"'" + std::string(k) + "'"});
        }
        bump();
    }

    void expect_sym(std::string_view s)
    {
        if (!is_sym(s)) {
            reject_unsupported();
            fail({"'" + std::string(s) + "'"});
        }
        bump();
    }

    std::string ident()
    {
        if (cur().kind != Tok::Ident) {
            reject_unsupported();
            fail({"identifier"});
        }
        std::string s = cur().text;
        bump();
        return s;
    }

    Type type_name()
    {
        if (is_kw("bool")) { bump(); return Type::Bool; }
        if (is_kw("int")) { bump(); return Type::Int; }
        if (is_kw("real")) { bump(); return Type::Real; }
        fail({"'bool'", "'int'", "'real'"});
    }

    // a, b: real
    void decl_group(std::vector<VarDecl>& out)
    {
        std::vector<std::pair<std::string, SourcePos>> names;
        names.emplace_back(cur().text, cur().pos);
        ident();
        while (is_sym(",")) {
            bump();
            names.emplace_back(cur().text, cur().pos);
            ident();
        }
        expect_sym(":");
        Type t = type_name();
        for (auto& [n, p] : names) out.push_back({n, t, p});
    }

    // group { ';' group } [';'] inside parentheses
    std::vector<VarDecl> param_list()
    {
        std::vector<VarDecl> out;
        expect_sym("(");
        if (is_sym(")")) {
            bump();
            return out;
        }
        decl_group(out);
        while (is_sym(";")) {
            bump();
            if (is_sym(")")) break;
            decl_group(out);
        }
        expect_sym(")");
        return out;
    }

    ExternDecl extern_decl()
    {
        ExternDecl x;
        x.pos = cur().pos;
        expect_kw("extern");
        x.name = ident();
        x.params = param_list();
        expect_kw("returns");
        auto results = param_list();
        if (results.size() != 1) {
            throw ParseError(x.pos, "extern '" + x.name + "'", {"exactly one result"},
                             "uninterpreted functions return a single value");
        }
        x.result = results.front();
        expect_sym(";");
        return x;
    }

    NodeDecl node_decl()
    {
        NodeDecl n;
        n.pos = cur().pos;
        expect_kw("node");
        n.name = ident();
        n.inputs = param_list();
        expect_kw("returns");
        n.outputs = param_list();
        if (is_sym(";")) bump();
        if (is_kw("var")) {
            bump();
            do {
                decl_group(n.locals);
                expect_sym(";");
            } while (cur().kind == Tok::Ident);
        }
        expect_kw("let");
        while (!is_kw("tel")) {
            if (cur().kind == Tok::End) fail({"'tel'"});
            body_item(n);
        }
        bump();
        if (is_sym(";")) bump();
        return n;
    }

    void body_item(NodeDecl& n)
    {
        if (is_kw("assert")) {
            bump();
            n.assertions.push_back(expr());
            expect_sym(";");
            return;
        }
        if (cur().kind == Tok::PropertyAnnot) {
            SourcePos pos = cur().pos;
            bump();
            std::string sig = ident();
            if (is_sym("=")) {
                bump();
                expect_kw("true");
            }
            expect_sym(";");
            n.properties.push_back({sig, pos});
            return;
        }
        Equation eq;
        eq.pos = cur().pos;
        bool paren = false;
        if (is_sym("(")) {
            paren = true;
            bump();
        }
        if (cur().kind != Tok::Ident) {
            reject_unsupported();
            fail({"identifier", "'assert'", "'tel'"});
        }
        eq.targets.push_back(ident());
        while (is_sym(",")) {
            bump();
            eq.targets.push_back(ident());
        }
        if (paren) expect_sym(")");
        expect_sym("=");
        eq.rhs = expr();
        expect_sym(";");
        n.equations.push_back(std::move(eq));
    }

    Expr expr() { return arrow(); }

    Expr arrow()
    {
        Expr lhs = implies();
        if (is_sym("->")) {
            SourcePos pos = cur().pos;
            bump();
            Expr rhs = arrow();
            return Expr::make_arrow(std::move(lhs), std::move(rhs), pos);
        }
        return lhs;
    }

    Expr implies()
    {
        Expr lhs = or_expr();
        if (is_sym("=>")) {
            SourcePos pos = cur().pos;
            bump();
            Expr rhs = implies();
            return Expr::make_binary(BinaryOp::Implies, std::move(lhs), std::move(rhs), pos);
        }
        return lhs;
    }

    Expr or_expr()
    {
        Expr lhs = and_expr();
        while (is_kw("or")) {
            SourcePos pos = cur().pos;
            bump();
            lhs = Expr::make_binary(BinaryOp::Or, std::move(lhs), and_expr(), pos);
        }
        return lhs;
    }

    Expr and_expr()
    {
        Expr lhs = not_expr();
        while (is_kw("and")) {
            SourcePos pos = cur().pos;
            bump();
            lhs = Expr::make_binary(BinaryOp::And, std::move(lhs), not_expr(), pos);
        }
        return lhs;
    }

    Expr not_expr()
    {
        if (is_kw("not")) {
            SourcePos pos = cur().pos;
            bump();
            return Expr::make_unary(UnaryOp::Not, not_expr(), pos);
        }
        return comparison();
    }

    Expr comparison()
    {
        Expr lhs = additive();
        static const std::unordered_map<std::string, BinaryOp> ops = {
            {"=", BinaryOp::Eq}, {"<>", BinaryOp::Ne}, {"<", BinaryOp::Lt},
            {"<=", BinaryOp::Le}, {">", BinaryOp::Gt}, {">=", BinaryOp::Ge},
        };
        if (cur().kind == Tok::Symbol) {
            auto it = ops.find(cur().text);
            if (it != ops.end()) {
                SourcePos pos = cur().pos;
                bump();
                return Expr::make_binary(it->second, std::move(lhs), additive(), pos);
            }
        }
        return lhs;
    }

    Expr additive()
    {
        Expr lhs = multiplicative();
        while (is_sym("+") || is_sym("-")) {
            BinaryOp op = is_sym("+") ? BinaryOp::Add : BinaryOp::Sub;
            SourcePos pos = cur().pos;
            bump();
            lhs = Expr::make_binary(op, std::move(lhs), multiplicative(), pos);
        }
        return lhs;
    }

    Expr multiplicative()
    {
        Expr lhs = unary();
        while (is_sym("*") || is_sym("/")) {
            BinaryOp op = is_sym("*") ? BinaryOp::Mul : BinaryOp::Div;
            SourcePos pos = cur().pos;
            bump();
            lhs = Expr::make_binary(op, std::move(lhs), unary(), pos);
        }
        return lhs;
    }

    Expr unary()
    {
        if (is_sym("-")) {
            SourcePos pos = cur().pos;
            bump();
            // "-3.5" is a literal, "-(3.5)" stays a negation
            if (cur().kind == Tok::IntLit || cur().kind == Tok::RealLit) {
                Expr lit = primary();
                lit.literal = lit.literal.type() == Type::Int ? Value::integer(-lit.literal.as_number())
                                                              : Value::real(-lit.literal.as_number());
                lit.pos = pos;
                return lit;
            }
            return Expr::make_unary(UnaryOp::Neg, unary(), pos);
        }
        if (is_kw("pre")) {
            SourcePos pos = cur().pos;
            bump();
            return Expr::make_pre(unary(), pos);
        }
        return primary();
    }

    Expr primary()
    {
        SourcePos pos = cur().pos;
        switch (cur().kind) {
        case Tok::IntLit: {
            Value v = Value::integer(Rational::parse(cur().text));
            bump();
            return Expr::make_literal(v, pos);
        }
        case Tok::RealLit: {
            Value v = Value::real(Rational::parse(cur().text));
            bump();
            return Expr::make_literal(v, pos);
        }
        case Tok::Ident: {
            std::string name = ident();
            if (is_sym("(")) {
                bump();
                std::vector<Expr> args;
                if (!is_sym(")")) {
                    args.push_back(expr());
                    while (is_sym(",")) {
                        bump();
                        args.push_back(expr());
                    }
                }
                expect_sym(")");
                return Expr::make_call(std::move(name), std::move(args), false, pos);
            }
            return Expr::make_var(std::move(name), pos);
        }
        case Tok::Keyword:
            if (is_kw("true") || is_kw("false")) {
                bool b = is_kw("true");
                bump();
                return Expr::make_literal(Value::boolean(b), pos);
            }
            if (is_kw("if")) {
                bump();
                Expr c = expr();
                expect_kw("then");
                Expr t = expr();
                expect_kw("else");
                Expr e = expr();
                return Expr::make_ite(std::move(c), std::move(t), std::move(e), pos);
            }
            reject_unsupported();
            break;
        case Tok::Symbol:
            if (is_sym("(")) {
                bump();
                Expr e = expr();
                if (is_sym(",")) fail({"')'"}, "tuple expressions are only allowed as equation targets");
                expect_sym(")");
                return e;
            }
            break;
        default: break;
        }
        fail({"expression"});
    }

    static void classify(Expr& e, const std::set<std::string>& externs)
    {
        if (e.kind == Expr::Kind::NodeCall && externs.count(e.name)) e.kind = Expr::Kind::ExternCall;
        for (auto& a : e.args) classify(a, externs);
    }

    static void classify_calls(Program& p)
    {
        std::set<std::string> names;
        for (const auto& x : p.externs) names.insert(x.name);
        if (names.empty()) return;
        for (auto& n : p.nodes) {
            for (auto& eq : n.equations) classify(eq.rhs, names);
            for (auto& a : n.assertions) classify(a, names);
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

Program parse(std::string_view text)
{
    Parser p(Lexer(text).run());
    return p.program();
}

Expr parse_expression(std::string_view text)
{
    Parser p(Lexer(text).run());
    return p.lone_expression();
}

}  // namespace dfv::lang
