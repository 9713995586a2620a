#include <cctype>
#include <sstream>

#include "dq/schema.hpp"

namespace dq {

namespace {

struct Token {
    enum Kind { Ident, Punct, End } kind = End;
    std::string text;  // identifiers lower-cased for keyword checks happen at use sites
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token next() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) step();
        current_ = Token{};
        current_.line = line_;
        current_.column = column_;
        if (pos_ >= text_.size()) {
            current_.kind = Token::End;
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string ident;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ident += text_[pos_];
                step();
            }
            current_.kind = Token::Ident;
            current_.text = ident;
            return;
        }
        if (c == '(' || c == ')' || c == ',' || c == ';') {
            current_.kind = Token::Punct;
            current_.text = std::string(1, c);
            step();
            return;
        }
        throw ParseError(std::string("unsupported construct: unexpected character '") + c + "'",
                         line_, column_);
    }

    void step() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    Token current_;
};

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

class DdlParser {
public:
    explicit DdlParser(const std::string& text) : lexer_(text) {}

    DbSchema parse() {
        DbSchema schema;
        while (lexer_.peek().kind != Token::End) schema.tables.push_back(parse_create_table());
        return schema;
    }

private:
    [[noreturn]] void fail(const Token& t, const std::string& message) {
        throw ParseError("unsupported construct: " + message, t.line, t.column);
    }

    Token expect_ident() {
        Token t = lexer_.next();
        if (t.kind != Token::Ident) fail(t, "expected an identifier");
        return t;
    }

    void expect_keyword(const std::string& kw) {
        Token t = lexer_.next();
        if (t.kind != Token::Ident || lower(t.text) != kw) fail(t, "expected keyword " + kw);
    }

    void expect_punct(const std::string& p) {
        Token t = lexer_.next();
        if (t.kind != Token::Punct || t.text != p) fail(t, "expected '" + p + "'");
    }

    bool peek_keyword(const std::string& kw) {
        return lexer_.peek().kind == Token::Ident && lower(lexer_.peek().text) == kw;
    }

    bool peek_punct(const std::string& p) {
        return lexer_.peek().kind == Token::Punct && lexer_.peek().text == p;
    }

    std::vector<std::string> parse_column_list() {
        expect_punct("(");
        std::vector<std::string> out;
        out.push_back(expect_ident().text);
        while (peek_punct(",")) {
            lexer_.next();
            out.push_back(expect_ident().text);
        }
        expect_punct(")");
        return out;
    }

    Table parse_create_table() {
        expect_keyword("create");
        expect_keyword("table");
        Table t;
        t.name = expect_ident().text;
        expect_punct("(");

        bool saw_constraint = false;
        while (true) {
            if (peek_keyword("primary")) {
                lexer_.next();
                expect_keyword("key");
                if (!t.primary_key.empty()) fail(lexer_.peek(), "duplicate PRIMARY KEY clause");
                t.primary_key = parse_column_list();
                saw_constraint = true;
            } else if (peek_keyword("foreign")) {
                lexer_.next();
                expect_keyword("key");
                ForeignKey fk;
                fk.columns = parse_column_list();
                expect_keyword("references");
                fk.ref_table = expect_ident().text;
                fk.ref_columns = parse_column_list();
                t.foreign_keys.push_back(std::move(fk));
                saw_constraint = true;
            } else {
                Token name = lexer_.next();
                if (name.kind != Token::Ident) fail(name, "expected a column or constraint");
                if (saw_constraint) fail(name, "columns must precede constraints");
                Token type = lexer_.next();
                if (type.kind != Token::Ident) fail(type, "expected a column type");
                auto ct = column_type_from_name(lower(type.text));
                if (!ct) fail(type, "unknown column type " + type.text);
                t.columns.push_back({name.text, *ct});
            }
            if (peek_punct(",")) {
                lexer_.next();
                continue;
            }
            break;
        }
        expect_punct(")");
        expect_punct(";");
        if (t.primary_key.empty()) fail(lexer_.peek(), "table " + t.name + " lacks a PRIMARY KEY");
        return t;
    }

    Lexer lexer_;
};

}  // namespace

DbSchema parse_ddl(const std::string& text) {
    DbSchema schema = DdlParser(text).parse();
    auto diagnostics = validate_schema(schema);
    if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
    return schema;
}

std::string render_ddl(const DbSchema& schema) {
    std::ostringstream out;
    for (const auto& t : schema.tables) {
        out << "CREATE TABLE " << t.name << " (\n";
        for (const auto& c : t.columns) out << "  " << c.name << " " << column_type_name(c.type) << ",\n";
        out << "  PRIMARY KEY (";
        for (std::size_t i = 0; i < t.primary_key.size(); ++i)
            out << (i ? ", " : "") << t.primary_key[i];
        out << ")";
        for (const auto& fk : t.foreign_keys) {
            out << ",\n  FOREIGN KEY (";
            for (std::size_t i = 0; i < fk.columns.size(); ++i) out << (i ? ", " : "") << fk.columns[i];
            out << ") REFERENCES " << fk.ref_table << "(";
            for (std::size_t i = 0; i < fk.ref_columns.size(); ++i)
                out << (i ? ", " : "") << fk.ref_columns[i];
            out << ")";
        }
        out << "\n);\n";
    }
    return out.str();
}

}  // namespace dq
