#pragma once

#include "dynq/errors.hpp"

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace dynq::detail {

struct Token
{
    enum class Kind { identifier, integer, string, punct, end };

    Kind kind = Kind::end;
    std::string text;  ///< identifier/punctuation spelling, decoded string contents, or integer digits
    std::size_t line = 1;
    std::size_t column = 1;

    bool is(std::string_view p) const { return kind == Kind::punct and text == p; }
};

/** Tokenizer shared by the query, update, schema and constraint grammars. `#` and `%` start line comments. */
class Lexer
{
  public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token &peek() const { return current_; }

    Token next()
    {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string &msg) const { throw parse_error(msg, current_.line, current_.column); }
    [[noreturn]] static void fail_at(const Token &t, const std::string &msg) { throw parse_error(msg, t.line, t.column); }

    void expect(std::string_view p)
    {
        if (not current_.is(p))
            fail("expected '" + std::string(p) + "' but found '" + describe(current_) + "'");
        advance();
    }

    bool accept(std::string_view p)
    {
        if (current_.is(p)) {
            advance();
            return true;
        }
        return false;
    }

    Token expect_identifier()
    {
        if (current_.kind != Token::Kind::identifier)
            fail("expected identifier but found '" + describe(current_) + "'");
        return next();
    }

    std::int64_t expect_integer()
    {
        if (current_.kind != Token::Kind::integer)
            fail("expected integer but found '" + describe(current_) + "'");
        Token t = next();
        try {
            return std::stoll(t.text);
        } catch (const std::exception &) {
            fail_at(t, "integer literal out of range");
        }
    }

    bool at_end() const { return current_.kind == Token::Kind::end; }

    static std::string describe(const Token &t)
    {
        switch (t.kind) {
            case Token::Kind::end: return "end of input";
            case Token::Kind::string: return "\"" + t.text + "\"";
            default: return t.text;
        }
    }

  private:
    char ch(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

    void bump()
    {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void advance()
    {
        for (;;) {
            while (pos_ < text_.size() and std::isspace(static_cast<unsigned char>(ch())))
                bump();
            if (ch() == '#' or ch() == '%') {
                while (pos_ < text_.size() and ch() != '\n')
                    bump();
                continue;
            }
            break;
        }
        current_ = Token{};
        current_.line = line_;
        current_.column = col_;
        if (pos_ >= text_.size()) {
            current_.kind = Token::Kind::end;
            return;
        }
        const char c = ch();
        if (std::isalpha(static_cast<unsigned char>(c)) or c == '_') {
            current_.kind = Token::Kind::identifier;
            while (std::isalnum(static_cast<unsigned char>(ch())) or ch() == '_') {
                current_.text += ch();
                bump();
            }
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) or (c == '-' and std::isdigit(static_cast<unsigned char>(ch(1))))) {
            current_.kind = Token::Kind::integer;
            current_.text += c;
            bump();
            while (std::isdigit(static_cast<unsigned char>(ch()))) {
                current_.text += ch();
                bump();
            }
            if (std::isalpha(static_cast<unsigned char>(ch())) or ch() == '_')
                throw parse_error("malformed literal", current_.line, current_.column);
            return;
        }
        if (c == '"') {
            current_.kind = Token::Kind::string;
            bump();
            for (;;) {
                if (pos_ >= text_.size() or ch() == '\n')
                    throw parse_error("unterminated string literal", current_.line, current_.column);
                char d = ch();
                bump();
                if (d == '"')
                    break;
                if (d == '\\') {
                    if (pos_ >= text_.size())
                        throw parse_error("unterminated string literal", current_.line, current_.column);
                    d = ch();
                    bump();
                }
                current_.text += d;
            }
            return;
        }
        current_.kind = Token::Kind::punct;
        static constexpr std::string_view two[] = {":-", "<=", "->"};
        for (std::string_view p : two) {
            if (text_.substr(pos_, 2) == p) {
                current_.text = std::string(p);
                bump();
                bump();
                return;
            }
        }
        current_.text = std::string(1, c);
        bump();
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    Token current_;
};

}
