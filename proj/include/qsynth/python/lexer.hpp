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

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qsynth::python {

enum class TokenKind {
    Name,
    Number,
    String,
    Op,
    Newline,
    Indent,
    Dedent,
    EndMarker,
};

struct Token {
    TokenKind kind;
    std::string text;
    int line = 0;    // 1-based
    int column = 0;  // 0-based byte offset within the line
    int end_line = 0;

    bool is_op(std::string_view op) const { return kind == TokenKind::Op && text == op; }
    bool is_name(std::string_view name) const { return kind == TokenKind::Name && text == name; }
};

/// Tokenizes Python 3 source into the stream consumed by the parser, including
/// NEWLINE/INDENT/DEDENT structure. Comments are dropped and string literals
/// keep their exact source spelling (prefix and quotes included).
///
/// Throws SyntaxError on unterminated strings, unbalanced brackets,
/// inconsistent dedents and stray characters.
std::vector<Token> tokenize(std::string_view source);

/// Lexical tokens only: the output of tokenize() minus the layout tokens.
/// This is the token stream used for shingling and the n-gram metrics.
std::vector<std::string> lexical_tokens(std::string_view source);

/// lexical_tokens(), falling back to whitespace splitting when the text does
/// not tokenize.
std::vector<std::string> lexical_tokens_or_words(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace qsynth::python
