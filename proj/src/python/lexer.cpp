// Copyright 2026 The qsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qsynth/python/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include "qsynth/util/error.hpp"

namespace qsynth::python {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async",
    "await", "break",  "class",   "continue", "def",      "del",    "elif",
    "else",  "except", "finally", "for",      "from",     "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",    "or",
    "pass",  "raise",  "return",  "try",      "while",    "with",   "yield",
};

constexpr std::array<std::string_view, 5> kThreeCharOps = {"**=", "//=", ">>=", "<<=", "..."};
constexpr std::array<std::string_view, 20> kTwoCharOps = {
    "**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", ":=", "<>",
};
constexpr std::string_view kOneCharOps = "+-*/%@&|^~<>()[]{},:;.=";

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_string_prefix(std::string_view p) {
    if (p.size() > 2) return false;
    std::string lower;
    for (char c : p) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lower.empty() || lower == "r" || lower == "u" || lower == "b" || lower == "f" ||
           lower == "br" || lower == "rb" || lower == "fr" || lower == "rf";
}

class Lexer {
public:
    explicit Lexer(std::string_view source) : src_(normalize(source)) {}

    std::vector<Token> run() {
        indents_.push_back(0);
        while (pos_ < src_.size()) {
            if (at_line_start_ && depth_ == 0) {
                if (handle_indentation()) continue;
            }
            lex_one();
        }
        if (depth_ > 0) fail("unexpected EOF: '" + std::string(1, open_.back()) + "' was never closed");
        if (line_has_tokens_) emit(TokenKind::Newline, "", line_, col());
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(TokenKind::Dedent, "", line_, 0);
        }
        emit(TokenKind::EndMarker, "", line_, 0);
        return std::move(out_);
    }

private:
    static std::string normalize(std::string_view s) {
        std::string r;
        r.reserve(s.size() + 1);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '\r') {
                r.push_back('\n');
                if (i + 1 < s.size() && s[i + 1] == '\n') ++i;
            } else {
                r.push_back(s[i]);
            }
        }
        // Strip a UTF-8 BOM.
        if (r.size() >= 3 && static_cast<unsigned char>(r[0]) == 0xEF &&
            static_cast<unsigned char>(r[1]) == 0xBB && static_cast<unsigned char>(r[2]) == 0xBF)
            r.erase(0, 3);
        return r;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, line_, col()); }

    int col() const { return static_cast<int>(pos_ - line_begin_); }

    void emit(TokenKind kind, std::string text, int line, int column, int end_line = 0) {
        out_.push_back(Token{kind, std::move(text), line, column, end_line ? end_line : line});
    }

    char peek(std::size_t off = 0) const {
        return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
    }

    void newline_advance() {
        ++pos_;
        ++line_;
        line_begin_ = pos_;
    }

    // Measures leading whitespace at the start of a logical line. Returns true
    // when the whole physical line was blank or a comment (already consumed).
    bool handle_indentation() {
        int width = 0;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ') {
                ++width;
            } else if (c == '\t') {
                width = (width / 8 + 1) * 8;
            } else if (c == '\f') {
                width = 0;
            } else {
                break;
            }
            ++pos_;
        }
        char c = peek();
        if (c == '#' ) {
            while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            c = peek();
        }
        if (c == '\n') {
            newline_advance();
            return true;
        }
        if (c == '\\' && peek(1) == '\n') {
            // A continuation on an otherwise blank line joins with the next one.
            pos_ += 1;
            newline_advance();
            return true;
        }
        if (pos_ >= src_.size()) return true;

        at_line_start_ = false;
        if (width > indents_.back()) {
            indents_.push_back(width);
            emit(TokenKind::Indent, "", line_, 0);
        } else if (width < indents_.back()) {
            while (width < indents_.back()) {
                indents_.pop_back();
                emit(TokenKind::Dedent, "", line_, 0);
            }
            if (width != indents_.back()) fail("unindent does not match any outer indentation level");
        }
        return false;
    }

    void lex_one() {
        char c = peek();
        if (c == ' ' || c == '\t' || c == '\f') {
            ++pos_;
            return;
        }
        if (c == '#') {
            while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            return;
        }
        if (c == '\\') {
            if (peek(1) == '\n') {
                ++pos_;
                newline_advance();
                return;
            }
            fail("unexpected character after line continuation character");
        }
        if (c == '\n') {
            if (depth_ == 0 && line_has_tokens_) {
                emit(TokenKind::Newline, "", line_, col());
                line_has_tokens_ = false;
            }
            newline_advance();
            if (depth_ == 0) at_line_start_ = true;
            return;
        }
        line_has_tokens_ = true;
        unsigned char uc = static_cast<unsigned char>(c);
        if (is_ident_start(uc)) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            std::string_view word(src_.data() + start, pos_ - start);
            if ((peek() == '\'' || peek() == '"') && is_string_prefix(word)) {
                pos_ = start;
                lex_string(start);
                return;
            }
            emit(TokenKind::Name, std::string(word), line_, static_cast<int>(start - line_begin_));
            return;
        }
        if (c == '\'' || c == '"') {
            lex_string(pos_);
            return;
        }
        if (std::isdigit(uc) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            lex_number();
            return;
        }
        lex_operator();
    }

    void lex_string(std::size_t start) {
        int start_line = line_;
        int start_col = static_cast<int>(start - line_begin_);
        while (pos_ < src_.size() && src_[pos_] != '\'' && src_[pos_] != '"') ++pos_;
        char quote = src_[pos_];
        bool triple = peek(1) == quote && peek(2) == quote;
        pos_ += triple ? 3 : 1;
        for (;;) {
            if (pos_ >= src_.size()) {
                line_ = start_line;
                fail(triple ? "unterminated triple-quoted string literal"
                            : "unterminated string literal");
            }
            char c = src_[pos_];
            if (c == '\\') {
                if (peek(1) == '\n') {
                    ++pos_;
                    newline_advance();
                } else {
                    pos_ += 2;
                }
                continue;
            }
            if (c == '\n') {
                if (!triple) fail("unterminated string literal");
                newline_advance();
                continue;
            }
            if (c == quote) {
                if (!triple) {
                    ++pos_;
                    break;
                }
                if (peek(1) == quote && peek(2) == quote) {
                    pos_ += 3;
                    break;
                }
            }
            ++pos_;
        }
        std::string text = src_.substr(start, pos_ - start);
        emit(TokenKind::String, std::move(text), start_line, start_col, line_);
    }

    void lex_number() {
        std::size_t start = pos_;
        auto digits = [&](auto pred) {
            while (pos_ < src_.size() && (pred(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
        };
        auto is_dec = [](unsigned char ch) { return std::isdigit(ch) != 0; };
        char c1 = std::tolower(static_cast<unsigned char>(peek(1)));
        if (peek() == '0' && (c1 == 'x' || c1 == 'o' || c1 == 'b')) {
            pos_ += 2;
            digits([](unsigned char ch) { return std::isxdigit(ch) != 0; });
        } else {
            digits(is_dec);
            if (peek() == '.') {
                ++pos_;
                digits(is_dec);
            }
            char e = peek();
            if (e == 'e' || e == 'E') {
                char n = peek(1);
                if (std::isdigit(static_cast<unsigned char>(n)) ||
                    ((n == '+' || n == '-') && std::isdigit(static_cast<unsigned char>(peek(2))))) {
                    pos_ += (n == '+' || n == '-') ? 2 : 1;
                    digits(is_dec);
                }
            }
            if (peek() == 'j' || peek() == 'J') ++pos_;
        }
        if (pos_ < src_.size() && is_ident_start(static_cast<unsigned char>(src_[pos_])) &&
            !(src_[pos_] == 'i' || src_[pos_] == 'o' || src_[pos_] == 'a' || src_[pos_] == 'e' ||
              src_[pos_] == 'n' || src_[pos_] == 'f'))
            fail("invalid decimal literal");
        emit(TokenKind::Number, src_.substr(start, pos_ - start), line_,
             static_cast<int>(start - line_begin_));
    }

    void lex_operator() {
        std::string_view rest(src_.data() + pos_, src_.size() - pos_);
        int column = col();
        for (auto op : kThreeCharOps) {
            if (rest.substr(0, 3) == op) {
                pos_ += 3;
                emit(TokenKind::Op, std::string(op), line_, column);
                return;
            }
        }
        for (auto op : kTwoCharOps) {
            if (rest.substr(0, 2) == op) {
                if (op == "<>") fail("invalid syntax");
                pos_ += 2;
                emit(TokenKind::Op, std::string(op), line_, column);
                return;
            }
        }
        char c = rest.front();
        if (kOneCharOps.find(c) == std::string_view::npos) {
            std::ostringstream msg;
            msg << "invalid character '" << c << "'";
            fail(msg.str());
        }
        if (c == '(' || c == '[' || c == '{') {
            ++depth_;
            open_.push_back(c);
        } else if (c == ')' || c == ']' || c == '}') {
            char expected = c == ')' ? '(' : c == ']' ? '[' : '{';
            if (depth_ == 0) fail(std::string("unmatched '") + c + "'");
            if (open_.back() != expected)
                fail(std::string("closing parenthesis '") + c + "' does not match opening parenthesis '" +
                     open_.back() + "'");
            --depth_;
            open_.pop_back();
        }
        ++pos_;
        emit(TokenKind::Op, std::string(1, c), line_, column);
    }

    std::string src_;
    std::size_t pos_ = 0;
    std::size_t line_begin_ = 0;
    int line_ = 1;
    int depth_ = 0;
    std::string open_;
    bool at_line_start_ = true;
    bool line_has_tokens_ = false;
    std::vector<int> indents_;
    std::vector<Token> out_;
};

}  // namespace

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::vector<std::string> lexical_tokens(std::string_view source) {
    std::vector<std::string> out;
    for (auto& tok : tokenize(source)) {
        switch (tok.kind) {
            case TokenKind::Name:
            case TokenKind::Number:
            case TokenKind::String:
            case TokenKind::Op:
                out.push_back(std::move(tok.text));
                break;
            default:
                break;
        }
    }
    return out;
}

std::vector<std::string> lexical_tokens_or_words(std::string_view source) {
    try {
        return lexical_tokens(source);
    } catch (const SyntaxError&) {
        std::vector<std::string> out;
        std::istringstream in{std::string(source)};
        std::string word;
        while (in >> word) out.push_back(word);
        return out;
    }
}

}  // namespace qsynth::python
