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

#include "qsynth/python/parser.hpp"

#include <algorithm>
#include <array>

#include "qsynth/python/lexer.hpp"
#include "qsynth/util/error.hpp"

namespace qsynth::python {

namespace {

constexpr std::array<std::string_view, 13> kAugOps = {
    "+=", "-=", "*=", "/=", "//=", "%=", "@=", "&=", "|=", "^=", ">>=", "<<=", "**=",
};

std::string_view describe(NodeKind kind) {
    switch (kind) {
        case NodeKind::Call: return "function call";
        case NodeKind::Constant:
        case NodeKind::JoinedStr: return "literal";
        case NodeKind::BinOp:
        case NodeKind::UnaryOp:
        case NodeKind::BoolOp: return "expression";
        case NodeKind::Compare: return "comparison";
        case NodeKind::Lambda: return "lambda";
        case NodeKind::IfExp: return "conditional expression";
        case NodeKind::NamedExpr: return "named expression";
        case NodeKind::Dict: return "dict literal";
        case NodeKind::Set: return "set display";
        case NodeKind::ListComp: return "list comprehension";
        case NodeKind::SetComp: return "set comprehension";
        case NodeKind::DictComp: return "dict comprehension";
        case NodeKind::GeneratorExp: return "generator expression";
        case NodeKind::Await: return "await expression";
        case NodeKind::Yield:
        case NodeKind::YieldFrom: return "yield expression";
        default: return "expression";
    }
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    NodePtr parse_file() {
        auto module = std::make_unique<Node>(NodeKind::Module, 1, 0);
        while (!at(TokenKind::EndMarker)) {
            if (at(TokenKind::Newline)) {
                advance();
                continue;
            }
            if (at(TokenKind::Indent)) fail("unexpected indent");
            parse_statement(*module);
        }
        return module;
    }

private:
    // ---- token helpers -------------------------------------------------

    const Token& peek(std::size_t off = 0) const {
        std::size_t i = std::min(pos_ + off, toks_.size() - 1);
        return toks_[i];
    }
    bool at(TokenKind kind) const { return peek().kind == kind; }
    bool at_op(std::string_view op, std::size_t off = 0) const { return peek(off).is_op(op); }
    bool at_kw(std::string_view kw, std::size_t off = 0) const { return peek(off).is_name(kw); }

    const Token& advance() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        if (t.kind == TokenKind::Name || t.kind == TokenKind::Op || t.kind == TokenKind::Number ||
            t.kind == TokenKind::String)
            last_end_ = t.end_line;
        return t;
    }

    bool accept_op(std::string_view op) {
        if (!at_op(op)) return false;
        advance();
        return true;
    }
    bool accept_kw(std::string_view kw) {
        if (!at_kw(kw)) return false;
        advance();
        return true;
    }
    const Token& expect_op(std::string_view op) {
        if (!at_op(op)) fail("expected '" + std::string(op) + "'");
        return advance();
    }
    const Token& expect_kw(std::string_view kw) {
        if (!at_kw(kw)) fail("expected '" + std::string(kw) + "'");
        return advance();
    }
    std::string expect_identifier() {
        const Token& t = peek();
        if (t.kind != TokenKind::Name || is_keyword(t.text)) fail("invalid syntax");
        advance();
        return t.text;
    }
    bool at_identifier() const {
        return peek().kind == TokenKind::Name && !is_keyword(peek().text);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        throw SyntaxError(msg, t.line, t.column);
    }
    [[noreturn]] void fail_at(const Node& n, const std::string& msg) const {
        throw SyntaxError(msg, n.line, n.column);
    }

    NodePtr make(NodeKind kind, const Token& at_tok) const {
        return std::make_unique<Node>(kind, at_tok.line, at_tok.column);
    }
    NodePtr make_at(NodeKind kind, const Node& at_node) const {
        return std::make_unique<Node>(kind, at_node.line, at_node.column);
    }
    NodePtr finish(NodePtr n) const {
        n->end_line = std::max(n->end_line, last_end_);
        return n;
    }

    bool at_stmt_end() const { return at(TokenKind::Newline) || at_op(";") || at(TokenKind::EndMarker); }

    // ---- statements ----------------------------------------------------

    void parse_statement(Node& parent) {
        const Token& t = peek();
        if (t.is_op("@")) {
            parent.add(parse_decorated());
            return;
        }
        if (t.kind == TokenKind::Name) {
            if (t.text == "def") {
                parent.add(parse_funcdef(nullptr, false, t));
                return;
            }
            if (t.text == "class") {
                parent.add(parse_classdef(nullptr, t));
                return;
            }
            if (t.text == "if") {
                parent.add(parse_if());
                return;
            }
            if (t.text == "while") {
                parent.add(parse_while());
                return;
            }
            if (t.text == "for") {
                parent.add(parse_for(false, t));
                return;
            }
            if (t.text == "try") {
                parent.add(parse_try());
                return;
            }
            if (t.text == "with") {
                parent.add(parse_with(false, t));
                return;
            }
            if (t.text == "async") {
                const Token& start = t;
                advance();
                if (at_kw("def")) {
                    parent.add(parse_funcdef(nullptr, true, start));
                } else if (at_kw("for")) {
                    parent.add(parse_for(true, start));
                } else if (at_kw("with")) {
                    parent.add(parse_with(true, start));
                } else {
                    fail("invalid syntax");
                }
                return;
            }
            if (t.text == "match" && try_parse_match(parent)) return;
        }
        parse_simple_statements(parent);
    }

    // `match` is a soft keyword: the header is parsed speculatively and the
    // statement is committed once `match <subject>: NEWLINE INDENT case` is seen.
    bool try_parse_match(Node& parent) {
        std::size_t saved = pos_;
        int saved_end = last_end_;
        const Token& start = peek();
        NodePtr subject;
        try {
            advance();
            subject = parse_testlist_star_expr_named();
            if (!at_op(":") || peek(1).kind != TokenKind::Newline || peek(2).kind != TokenKind::Indent ||
                !peek(3).is_name("case"))
                fail("invalid syntax");
        } catch (const SyntaxError&) {
            pos_ = saved;
            last_end_ = saved_end;
            return false;
        }
        advance();  // ':'
        advance();  // NEWLINE
        advance();  // INDENT
        auto node = make(NodeKind::Match, start);
        node->add(std::move(subject));
        while (at_kw("case")) {
            const Token& ct = advance();
            auto mc = make(NodeKind::MatchCase, ct);
            mc->add(parse_patterns());
            if (accept_kw("if")) mc->add(parse_namedexpr_test());
            mc->add(parse_block());
            node->add(finish(std::move(mc)));
            while (at(TokenKind::Newline)) advance();
        }
        if (!at(TokenKind::Dedent) && !at(TokenKind::EndMarker)) fail("invalid syntax");
        if (at(TokenKind::Dedent)) advance();
        parent.add(finish(std::move(node)));
        return true;
    }

    NodePtr parse_testlist_star_expr_named() {
        auto first = parse_star_or_test();
        if (!at_op(",")) return first;
        auto tuple = make_at(NodeKind::Tuple, *first);
        tuple->add(std::move(first));
        while (accept_op(",")) {
            if (at_op(":")) break;
            tuple->add(parse_star_or_test());
        }
        return finish(std::move(tuple));
    }

    NodePtr make_pattern(std::string_view what, const Token& t) const {
        auto p = make(NodeKind::Pattern, t);
        p->text = std::string(what);
        return p;
    }

    // patterns: open_sequence_pattern | pattern
    NodePtr parse_patterns() {
        const Token& t = peek();
        auto first = parse_maybe_star_pattern();
        if (!at_op(",")) {
            if (first->text == "star") fail_at(*first, "invalid syntax");
            return first;
        }
        auto seq = make_pattern("sequence", t);
        seq->add(std::move(first));
        while (accept_op(",")) {
            if (at_op(":") || at_kw("if")) break;
            seq->add(parse_maybe_star_pattern());
        }
        return finish(std::move(seq));
    }

    NodePtr parse_maybe_star_pattern() {
        const Token& t = peek();
        if (accept_op("*")) {
            auto star = make_pattern("star", t);
            star->add(parse_capture_target(true));
            return finish(std::move(star));
        }
        return parse_pattern();
    }

    NodePtr parse_capture_target(bool allow_wildcard) {
        const Token& t = peek();
        std::string name = expect_identifier();
        if (name == "_") {
            if (!allow_wildcard) throw SyntaxError("cannot use '_' as a target", t.line, t.column);
            return finish(make_pattern("wildcard", t));
        }
        auto n = make(NodeKind::Name, t);
        n->text = name;
        n->is_store = true;
        return n;
    }

    NodePtr parse_pattern() {
        const Token& t = peek();
        auto alt = parse_or_pattern();
        if (accept_kw("as")) {
            auto as = make_pattern("as", t);
            as->add(std::move(alt));
            as->add(parse_capture_target(false));
            return finish(std::move(as));
        }
        return alt;
    }

    NodePtr parse_or_pattern() {
        const Token& t = peek();
        auto first = parse_closed_pattern();
        if (!at_op("|")) return first;
        auto alt = make_pattern("or", t);
        alt->add(std::move(first));
        while (accept_op("|")) alt->add(parse_closed_pattern());
        return finish(std::move(alt));
    }

    NodePtr parse_signed_number(const Token& t) {
        auto lit = make_pattern("literal", t);
        auto expr = parse_arith();
        if (!expr->is(NodeKind::Constant) && !expr->is(NodeKind::UnaryOp) && !expr->is(NodeKind::BinOp))
            fail_at(*expr, "invalid pattern");
        lit->add(std::move(expr));
        return finish(std::move(lit));
    }

    NodePtr parse_closed_pattern() {
        const Token& t = peek();
        if (t.kind == TokenKind::Number || t.is_op("-")) return parse_signed_number(t);
        if (t.kind == TokenKind::String || t.is_name("None") || t.is_name("True") || t.is_name("False")) {
            auto lit = make_pattern("literal", t);
            lit->add(parse_atom());
            return finish(std::move(lit));
        }
        if (t.is_op("(")) {
            advance();
            if (accept_op(")")) return finish(make_pattern("sequence", t));
            auto first = parse_maybe_star_pattern();
            if (at_op(",")) {
                auto seq = make_pattern("sequence", t);
                seq->add(std::move(first));
                while (accept_op(",")) {
                    if (at_op(")")) break;
                    seq->add(parse_maybe_star_pattern());
                }
                expect_op(")");
                return finish(std::move(seq));
            }
            expect_op(")");
            if (first->text == "star") fail_at(*first, "invalid syntax");
            return first;
        }
        if (t.is_op("[")) {
            advance();
            auto seq = make_pattern("sequence", t);
            while (!at_op("]")) {
                seq->add(parse_maybe_star_pattern());
                if (!accept_op(",")) break;
            }
            expect_op("]");
            return finish(std::move(seq));
        }
        if (t.is_op("{")) return parse_mapping_pattern();
        if (t.kind == TokenKind::Name && !is_keyword(t.text)) {
            std::string dotted = expect_identifier();
            bool has_dot = false;
            while (accept_op(".")) {
                dotted += "." + expect_identifier();
                has_dot = true;
            }
            if (at_op("(")) return parse_class_pattern(t, dotted);
            if (has_dot) {
                auto value = make_pattern("value", t);
                value->aux = dotted;
                return finish(std::move(value));
            }
            if (dotted == "_") return finish(make_pattern("wildcard", t));
            auto capture = make_pattern("capture", t);
            auto n = make(NodeKind::Name, t);
            n->text = dotted;
            n->is_store = true;
            capture->add(std::move(n));
            return finish(std::move(capture));
        }
        fail("invalid pattern");
    }

    NodePtr parse_mapping_pattern() {
        const Token& t = advance();
        auto map = make_pattern("mapping", t);
        while (!at_op("}")) {
            const Token& kt = peek();
            if (accept_op("**")) {
                auto rest = make_pattern("star", kt);
                rest->add(parse_capture_target(false));
                map->add(finish(std::move(rest)));
            } else {
                NodePtr key;
                if (kt.kind == TokenKind::Name && !is_keyword(kt.text)) {
                    std::string dotted = expect_identifier();
                    if (!at_op(".")) fail("invalid pattern");
                    while (accept_op(".")) dotted += "." + expect_identifier();
                    key = make_pattern("value", kt);
                    key->aux = dotted;
                } else {
                    key = parse_closed_pattern();
                    if (key->text != "literal") fail_at(*key, "invalid pattern");
                }
                expect_op(":");
                auto entry = make(NodeKind::DictEntry, kt);
                entry->add(std::move(key));
                entry->add(parse_pattern());
                map->add(finish(std::move(entry)));
            }
            if (!accept_op(",")) break;
        }
        expect_op("}");
        return finish(std::move(map));
    }

    NodePtr parse_class_pattern(const Token& t, const std::string& cls) {
        expect_op("(");
        auto node = make_pattern("class", t);
        node->aux = cls;
        bool seen_keyword = false;
        while (!at_op(")")) {
            const Token& at_tok = peek();
            if (at_identifier() && at_op("=", 1)) {
                auto kw = make_pattern("keyword", at_tok);
                kw->aux = expect_identifier();
                advance();
                kw->add(parse_pattern());
                node->add(finish(std::move(kw)));
                seen_keyword = true;
            } else {
                auto p = parse_pattern();
                if (seen_keyword) fail_at(*p, "positional patterns follow keyword patterns");
                node->add(std::move(p));
            }
            if (!accept_op(",")) break;
        }
        expect_op(")");
        return finish(std::move(node));
    }

    void parse_simple_statements(Node& parent) {
        for (;;) {
            parent.add(parse_small_statement());
            if (accept_op(";")) {
                if (at(TokenKind::Newline) || at(TokenKind::EndMarker)) break;
                continue;
            }
            break;
        }
        if (at(TokenKind::EndMarker)) return;
        if (!at(TokenKind::Newline)) fail("invalid syntax");
        advance();
    }

    NodePtr parse_block() {
        expect_op(":");
        auto body = make(NodeKind::Body, peek());
        if (at(TokenKind::Newline)) {
            advance();
            if (!at(TokenKind::Indent)) fail("expected an indented block");
            advance();
            body->line = peek().line;
            body->column = peek().column;
            while (!at(TokenKind::Dedent) && !at(TokenKind::EndMarker)) {
                if (at(TokenKind::Newline)) {
                    advance();
                    continue;
                }
                if (at(TokenKind::Indent)) fail("unexpected indent");
                parse_statement(*body);
            }
            if (at(TokenKind::Dedent)) advance();
        } else {
            parse_simple_statements(*body);
        }
        if (body->children.empty()) fail("expected an indented block");
        return finish(std::move(body));
    }

    void splice_block(Node& into) {
        auto block = parse_block();
        for (auto& stmt : block->children) into.add(std::move(stmt));
    }

    NodePtr parse_decorated() {
        const Token& start = peek();
        auto decorators = make(NodeKind::Decorators, start);
        while (accept_op("@")) {
            decorators->add(parse_namedexpr_test());
            if (!at(TokenKind::Newline)) fail("invalid syntax");
            advance();
        }
        if (at_kw("def")) return parse_funcdef(std::move(decorators), false, start);
        if (at_kw("class")) return parse_classdef(std::move(decorators), start);
        if (at_kw("async") && at_kw("def", 1)) {
            advance();
            return parse_funcdef(std::move(decorators), true, start);
        }
        fail("invalid syntax");
    }

    NodePtr parse_funcdef(NodePtr decorators, bool is_async, const Token& start) {
        expect_kw("def");
        auto fn = make(is_async ? NodeKind::AsyncFunctionDef : NodeKind::FunctionDef, start);
        fn->text = expect_identifier();
        if (!decorators) decorators = make(NodeKind::Decorators, start);
        fn->add(std::move(decorators));
        expect_op("(");
        fn->add(parse_parameters(")", true));
        expect_op(")");
        if (accept_op("->")) {
            auto ann = make(NodeKind::Annotation, peek());
            ann->add(parse_test());
            fn->add(finish(std::move(ann)));
        }
        Scope saved = scope_;
        scope_ = Scope{true, 0, is_async};
        fn->add(parse_block());
        scope_ = saved;
        return finish(std::move(fn));
    }

    NodePtr parse_parameters(std::string_view close, bool annotations) {
        auto args = make(NodeKind::Arguments, peek());
        bool seen_default = false;
        bool seen_star = false;
        while (!at_op(close)) {
            const Token& t = peek();
            if (accept_op("/")) {
                auto sep = make(NodeKind::ArgSeparator, t);
                sep->text = "/";
                args->add(std::move(sep));
            } else if (accept_op("**")) {
                auto arg = make(NodeKind::Arg, t);
                arg->aux = "**";
                arg->text = expect_identifier();
                parse_param_annotation(*arg, annotations);
                args->add(finish(std::move(arg)));
            } else if (accept_op("*")) {
                seen_star = true;
                if (at_op(",") || at_op(close)) {
                    auto sep = make(NodeKind::ArgSeparator, t);
                    sep->text = "*";
                    args->add(std::move(sep));
                } else {
                    auto arg = make(NodeKind::Arg, t);
                    arg->aux = "*";
                    arg->text = expect_identifier();
                    parse_param_annotation(*arg, annotations);
                    args->add(finish(std::move(arg)));
                }
            } else {
                auto arg = make(NodeKind::Arg, t);
                arg->text = expect_identifier();
                parse_param_annotation(*arg, annotations);
                if (accept_op("=")) {
                    auto def = make(NodeKind::Default, peek());
                    def->add(parse_test());
                    arg->add(finish(std::move(def)));
                    seen_default = true;
                } else if (seen_default && !seen_star) {
                    fail("non-default argument follows default argument");
                }
                args->add(finish(std::move(arg)));
            }
            if (!accept_op(",")) break;
        }
        return finish(std::move(args));
    }

    void parse_param_annotation(Node& arg, bool annotations) {
        if (!annotations || !at_op(":")) return;
        advance();
        auto ann = make(NodeKind::Annotation, peek());
        ann->add(parse_test());
        arg.add(finish(std::move(ann)));
    }

    NodePtr parse_classdef(NodePtr decorators, const Token& start) {
        expect_kw("class");
        auto cls = make(NodeKind::ClassDef, start);
        cls->text = expect_identifier();
        if (!decorators) decorators = make(NodeKind::Decorators, start);
        cls->add(std::move(decorators));
        if (accept_op("(")) {
            parse_call_arguments(*cls);
        }
        Scope saved = scope_;
        scope_ = Scope{false, 0, false};
        cls->add(parse_block());
        scope_ = saved;
        return finish(std::move(cls));
    }

    NodePtr parse_if() {
        const Token& start = advance();  // 'if' or 'elif'
        auto node = make(NodeKind::If, start);
        node->add(parse_namedexpr_test());
        node->add(parse_block());
        auto orelse = make(NodeKind::OrElse, peek());
        if (at_kw("elif")) {
            orelse->add(parse_if());
        } else if (accept_kw("else")) {
            splice_block(*orelse);
        }
        node->add(finish(std::move(orelse)));
        return finish(std::move(node));
    }

    NodePtr parse_while() {
        const Token& start = advance();
        auto node = make(NodeKind::While, start);
        node->add(parse_namedexpr_test());
        ++scope_.loops;
        node->add(parse_block());
        --scope_.loops;
        node->add(parse_orelse());
        return finish(std::move(node));
    }

    NodePtr parse_orelse() {
        auto orelse = make(NodeKind::OrElse, peek());
        if (accept_kw("else")) {
            splice_block(*orelse);
        }
        return finish(std::move(orelse));
    }

    NodePtr parse_for(bool is_async, const Token& start) {
        expect_kw("for");
        auto node = make(is_async ? NodeKind::AsyncFor : NodeKind::For, start);
        auto target = parse_exprlist();
        set_target(*target);
        node->add(std::move(target));
        expect_kw("in");
        node->add(parse_testlist_star_expr());
        ++scope_.loops;
        node->add(parse_block());
        --scope_.loops;
        node->add(parse_orelse());
        return finish(std::move(node));
    }

    NodePtr parse_try() {
        const Token& start = advance();
        auto node = make(NodeKind::Try, start);
        node->add(parse_block());
        auto handlers = make(NodeKind::Handlers, peek());
        while (at_kw("except")) {
            const Token& et = advance();
            auto handler = make(NodeKind::ExceptHandler, et);
            if (!at_op(":")) {
                handler->add(parse_test());
                if (accept_kw("as")) handler->text = expect_identifier();
            }
            handler->add(parse_block());
            handlers->add(finish(std::move(handler)));
        }
        bool has_handlers = !handlers->children.empty();
        node->add(finish(std::move(handlers)));
        auto orelse = make(NodeKind::OrElse, peek());
        if (at_kw("else")) {
            if (!has_handlers) fail("invalid syntax");
            advance();
            splice_block(*orelse);
        }
        node->add(finish(std::move(orelse)));
        auto fin = make(NodeKind::Finally, peek());
        if (accept_kw("finally")) {
            splice_block(*fin);
        } else if (!has_handlers) {
            fail("expected 'except' or 'finally' block");
        }
        node->add(finish(std::move(fin)));
        return finish(std::move(node));
    }

    NodePtr parse_with(bool is_async, const Token& start) {
        expect_kw("with");
        auto node = make(is_async ? NodeKind::AsyncWith : NodeKind::With, start);
        bool parsed = false;
        if (at_op("(")) {
            // Parenthesized with-items; falls back to a parenthesized expression.
            std::size_t saved = pos_;
            int saved_end = last_end_;
            try {
                advance();
                std::vector<NodePtr> items;
                while (!at_op(")")) {
                    items.push_back(parse_with_item());
                    if (!accept_op(",")) break;
                }
                expect_op(")");
                if (!at_op(":") || items.empty()) fail("invalid syntax");
                for (auto& item : items) node->add(std::move(item));
                parsed = true;
            } catch (const SyntaxError&) {
                pos_ = saved;
                last_end_ = saved_end;
            }
        }
        if (!parsed) {
            do {
                node->add(parse_with_item());
            } while (accept_op(","));
        }
        node->add(parse_block());
        return finish(std::move(node));
    }

    NodePtr parse_with_item() {
        auto item = make(NodeKind::WithItem, peek());
        item->add(parse_test());
        if (accept_kw("as")) {
            auto target = parse_expr();
            set_target(*target);
            item->add(std::move(target));
        }
        return finish(std::move(item));
    }

    NodePtr parse_small_statement() {
        const Token& t = peek();
        if (t.kind == TokenKind::Name) {
            const std::string& w = t.text;
            if (w == "pass" || w == "break" || w == "continue") {
                advance();
                NodeKind kind = w == "pass" ? NodeKind::Pass : w == "break" ? NodeKind::Break : NodeKind::Continue;
                if (kind != NodeKind::Pass && scope_.loops == 0)
                    throw SyntaxError("'" + w + "' outside loop", t.line, t.column);
                return finish(make(kind, t));
            }
            if (w == "return") {
                advance();
                if (!scope_.in_function) throw SyntaxError("'return' outside function", t.line, t.column);
                auto node = make(NodeKind::Return, t);
                if (!at_stmt_end()) node->add(parse_testlist_star_expr());
                return finish(std::move(node));
            }
            if (w == "raise") {
                advance();
                auto node = make(NodeKind::Raise, t);
                if (!at_stmt_end()) {
                    node->add(parse_test());
                    if (accept_kw("from")) {
                        node->text = "from";
                        node->add(parse_test());
                    }
                }
                return finish(std::move(node));
            }
            if (w == "global" || w == "nonlocal") {
                advance();
                if (w == "nonlocal" && !scope_.in_function)
                    throw SyntaxError("nonlocal declaration not allowed at module level", t.line, t.column);
                auto node = make(w == "global" ? NodeKind::Global : NodeKind::Nonlocal, t);
                std::string names = expect_identifier();
                while (accept_op(",")) names += "," + expect_identifier();
                node->text = names;
                return finish(std::move(node));
            }
            if (w == "del") {
                advance();
                auto node = make(NodeKind::Delete, t);
                auto targets = parse_exprlist();
                if (targets->is(NodeKind::Tuple) && !at_op(")")) {
                    for (auto& c : targets->children) {
                        set_target(*c, "delete");
                        node->add(std::move(c));
                    }
                } else {
                    set_target(*targets, "delete");
                    node->add(std::move(targets));
                }
                return finish(std::move(node));
            }
            if (w == "assert") {
                advance();
                auto node = make(NodeKind::Assert, t);
                node->add(parse_test());
                if (accept_op(",")) node->add(parse_test());
                return finish(std::move(node));
            }
            if (w == "import") return parse_import();
            if (w == "from") return parse_import_from();
        }
        return parse_expression_statement();
    }

    NodePtr parse_import() {
        const Token& t = advance();
        auto node = make(NodeKind::Import, t);
        do {
            auto alias = make(NodeKind::Alias, peek());
            alias->text = parse_dotted_name();
            if (accept_kw("as")) alias->aux = expect_identifier();
            node->add(finish(std::move(alias)));
        } while (accept_op(","));
        return finish(std::move(node));
    }

    std::string parse_dotted_name() {
        std::string name = expect_identifier();
        while (accept_op(".")) name += "." + expect_identifier();
        return name;
    }

    NodePtr parse_import_from() {
        const Token& t = advance();
        auto node = make(NodeKind::ImportFrom, t);
        std::string dots;
        for (;;) {
            if (accept_op(".")) {
                dots += ".";
            } else if (accept_op("...")) {
                dots += "...";
            } else {
                break;
            }
        }
        node->aux = dots;
        if (!at_kw("import")) node->text = parse_dotted_name();
        else if (dots.empty()) fail("invalid syntax");
        expect_kw("import");
        if (at_op("*")) {
            auto alias = make(NodeKind::Alias, peek());
            advance();
            alias->text = "*";
            node->add(std::move(alias));
            return finish(std::move(node));
        }
        bool paren = accept_op("(");
        for (;;) {
            auto alias = make(NodeKind::Alias, peek());
            alias->text = expect_identifier();
            if (accept_kw("as")) alias->aux = expect_identifier();
            node->add(finish(std::move(alias)));
            if (!accept_op(",")) break;
            if (paren && at_op(")")) break;
        }
        if (paren) expect_op(")");
        return finish(std::move(node));
    }

    NodePtr parse_expression_statement() {
        const Token& start = peek();
        NodePtr first = at_kw("yield") ? parse_yield() : parse_testlist_star_expr();
        for (auto op : kAugOps) {
            if (at_op(op)) {
                advance();
                if (!first->is(NodeKind::Name) && !first->is(NodeKind::Attribute) &&
                    !first->is(NodeKind::Subscript))
                    fail_at(*first, "'" + std::string(describe(first->kind)) +
                                        "' is an illegal expression for augmented assignment");
                set_target(*first);
                auto node = make(NodeKind::AugAssign, start);
                node->text = std::string(op);
                node->add(std::move(first));
                node->add(at_kw("yield") ? parse_yield() : parse_testlist_star_expr());
                return finish(std::move(node));
            }
        }
        if (at_op(":")) {
            advance();
            if (!first->is(NodeKind::Name) && !first->is(NodeKind::Attribute) &&
                !first->is(NodeKind::Subscript))
                fail_at(*first, "illegal target for annotation");
            set_target(*first);
            auto node = make(NodeKind::AnnAssign, start);
            node->add(std::move(first));
            node->add(parse_test());
            if (accept_op("=")) node->add(at_kw("yield") ? parse_yield() : parse_testlist_star_expr());
            return finish(std::move(node));
        }
        if (at_op("=")) {
            auto node = make(NodeKind::Assign, start);
            std::vector<NodePtr> parts;
            parts.push_back(std::move(first));
            while (accept_op("=")) {
                parts.push_back(at_kw("yield") ? parse_yield() : parse_testlist_star_expr());
            }
            for (std::size_t i = 0; i + 1 < parts.size(); ++i) set_target(*parts[i]);
            for (auto& p : parts) node->add(std::move(p));
            return finish(std::move(node));
        }
        if (first->is(NodeKind::Starred)) fail_at(*first, "can't use starred expression here");
        auto node = make(NodeKind::Expr, start);
        node->add(std::move(first));
        return finish(std::move(node));
    }

    void set_target(Node& n, std::string_view verb = "assign to") {
        switch (n.kind) {
            case NodeKind::Name:
                n.is_store = true;
                return;
            case NodeKind::Attribute:
            case NodeKind::Subscript:
                n.is_store = true;
                return;
            case NodeKind::Tuple:
            case NodeKind::List:
                n.is_store = true;
                for (auto& c : n.children) set_target(*c, verb);
                return;
            case NodeKind::Starred:
                n.is_store = true;
                set_target(*n.children.front(), verb);
                return;
            case NodeKind::Constant:
                if (n.aux == "const" || n.aux == "ellipsis")
                    fail_at(n, "cannot " + std::string(verb) + " " + n.text);
                [[fallthrough]];
            default:
                fail_at(n, "cannot " + std::string(verb) + " " + std::string(describe(n.kind)));
        }
    }

    // ---- expressions ---------------------------------------------------

    NodePtr parse_yield() {
        const Token& t = advance();
        if (!scope_.in_function) throw SyntaxError("'yield' outside function", t.line, t.column);
        if (accept_kw("from")) {
            auto node = make(NodeKind::YieldFrom, t);
            node->add(parse_test());
            return finish(std::move(node));
        }
        auto node = make(NodeKind::Yield, t);
        if (!at_stmt_end() && !at_op(")") && !at_op("=") && !at_op("]") && !at_op("}"))
            node->add(parse_testlist_star_expr());
        return finish(std::move(node));
    }

    NodePtr parse_star_or_test() {
        if (at_op("*")) {
            const Token& t = advance();
            auto node = make(NodeKind::Starred, t);
            node->add(parse_expr());
            return finish(std::move(node));
        }
        return parse_namedexpr_test();
    }

    bool at_sequence_end() const {
        return at_stmt_end() || at_op("=") || at_op(")") || at_op("]") || at_op("}") || at_op(":") ||
               (peek().kind == TokenKind::Op &&
                std::find(kAugOps.begin(), kAugOps.end(), peek().text) != kAugOps.end());
    }

    NodePtr parse_testlist_star_expr() {
        auto first = parse_star_or_test();
        if (!at_op(",")) return first;
        auto tuple = make_at(NodeKind::Tuple, *first);
        tuple->add(std::move(first));
        while (accept_op(",")) {
            if (at_sequence_end()) break;
            tuple->add(parse_star_or_test());
        }
        return finish(std::move(tuple));
    }

    NodePtr parse_exprlist() {
        auto item = [&]() -> NodePtr {
            if (at_op("*")) {
                const Token& t = advance();
                auto node = make(NodeKind::Starred, t);
                node->add(parse_expr());
                return finish(std::move(node));
            }
            return parse_expr();
        };
        auto first = item();
        if (!at_op(",")) return first;
        auto tuple = make_at(NodeKind::Tuple, *first);
        tuple->add(std::move(first));
        while (accept_op(",")) {
            if (at_kw("in") || at_op("=") || at_stmt_end()) break;
            tuple->add(item());
        }
        return finish(std::move(tuple));
    }

    NodePtr parse_namedexpr_test() {
        if (at_identifier() && at_op(":=", 1)) {
            const Token& t = peek();
            auto target = make(NodeKind::Name, t);
            target->text = t.text;
            target->is_store = true;
            advance();
            advance();
            auto node = make(NodeKind::NamedExpr, t);
            node->add(std::move(target));
            node->add(parse_test());
            return finish(std::move(node));
        }
        return parse_test();
    }

    NodePtr parse_test() {
        if (at_kw("lambda")) return parse_lambda();
        auto body = parse_or_test();
        if (at_kw("if")) {
            advance();
            auto node = make_at(NodeKind::IfExp, *body);
            auto test = parse_or_test();
            expect_kw("else");
            auto orelse = parse_test();
            node->add(std::move(test));
            node->add(std::move(body));
            node->add(std::move(orelse));
            return finish(std::move(node));
        }
        return body;
    }

    NodePtr parse_lambda() {
        const Token& t = advance();
        auto node = make(NodeKind::Lambda, t);
        node->add(parse_parameters(":", false));
        expect_op(":");
        Scope saved = scope_;
        scope_ = Scope{true, 0, false};
        node->add(parse_test());
        scope_ = saved;
        return finish(std::move(node));
    }

    NodePtr parse_or_test() {
        auto first = parse_and_test();
        if (!at_kw("or")) return first;
        auto node = make_at(NodeKind::BoolOp, *first);
        node->text = "or";
        node->add(std::move(first));
        while (accept_kw("or")) node->add(parse_and_test());
        return finish(std::move(node));
    }

    NodePtr parse_and_test() {
        auto first = parse_not_test();
        if (!at_kw("and")) return first;
        auto node = make_at(NodeKind::BoolOp, *first);
        node->text = "and";
        node->add(std::move(first));
        while (accept_kw("and")) node->add(parse_not_test());
        return finish(std::move(node));
    }

    NodePtr parse_not_test() {
        if (at_kw("not")) {
            const Token& t = advance();
            auto node = make(NodeKind::UnaryOp, t);
            node->text = "not";
            node->add(parse_not_test());
            return finish(std::move(node));
        }
        return parse_comparison();
    }

    std::string comparison_operator() {
        const Token& t = peek();
        if (t.kind == TokenKind::Op &&
            (t.text == "<" || t.text == ">" || t.text == "==" || t.text == ">=" || t.text == "<=" ||
             t.text == "!=")) {
            advance();
            return t.text;
        }
        if (t.is_name("in")) {
            advance();
            return "in";
        }
        if (t.is_name("not") && at_kw("in", 1)) {
            advance();
            advance();
            return "not in";
        }
        if (t.is_name("is")) {
            advance();
            if (accept_kw("not")) return "is not";
            return "is";
        }
        return {};
    }

    NodePtr parse_comparison() {
        auto left = parse_expr();
        std::string op = comparison_operator();
        if (op.empty()) return left;
        auto node = make_at(NodeKind::Compare, *left);
        node->add(std::move(left));
        std::string ops = op;
        node->add(parse_expr());
        while (!(op = comparison_operator()).empty()) {
            ops += "," + op;
            node->add(parse_expr());
        }
        node->text = ops;
        return finish(std::move(node));
    }

    template <typename Next>
    NodePtr parse_binary(std::initializer_list<std::string_view> ops, Next next) {
        auto left = (this->*next)();
        for (;;) {
            const Token& t = peek();
            if (t.kind != TokenKind::Op) break;
            bool matched = std::find(ops.begin(), ops.end(), t.text) != ops.end();
            if (!matched) break;
            advance();
            auto node = make_at(NodeKind::BinOp, *left);
            node->text = t.text;
            node->add(std::move(left));
            node->add((this->*next)());
            left = finish(std::move(node));
        }
        return left;
    }

    NodePtr parse_expr() { return parse_binary({"|"}, &Parser::parse_xor); }
    NodePtr parse_xor() { return parse_binary({"^"}, &Parser::parse_and); }
    NodePtr parse_and() { return parse_binary({"&"}, &Parser::parse_shift); }
    NodePtr parse_shift() { return parse_binary({"<<", ">>"}, &Parser::parse_arith); }
    NodePtr parse_arith() { return parse_binary({"+", "-"}, &Parser::parse_term); }
    NodePtr parse_term() { return parse_binary({"*", "/", "//", "%", "@"}, &Parser::parse_factor); }

    NodePtr parse_factor() {
        const Token& t = peek();
        if (t.is_op("+") || t.is_op("-") || t.is_op("~")) {
            advance();
            auto node = make(NodeKind::UnaryOp, t);
            node->text = t.text;
            node->add(parse_factor());
            return finish(std::move(node));
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base;
        if (at_kw("await")) {
            const Token& t = advance();
            auto node = make(NodeKind::Await, t);
            node->add(parse_primary());
            base = finish(std::move(node));
        } else {
            base = parse_primary();
        }
        if (at_op("**")) {
            advance();
            auto node = make_at(NodeKind::BinOp, *base);
            node->text = "**";
            node->add(std::move(base));
            node->add(parse_factor());
            return finish(std::move(node));
        }
        return base;
    }

    NodePtr parse_primary() {
        auto expr = parse_atom();
        for (;;) {
            if (at_op("(")) {
                advance();
                auto call = make_at(NodeKind::Call, *expr);
                call->add(std::move(expr));
                parse_call_arguments(*call);
                expr = finish(std::move(call));
            } else if (at_op("[")) {
                advance();
                auto sub = make_at(NodeKind::Subscript, *expr);
                sub->add(std::move(expr));
                sub->add(parse_subscript_list());
                expect_op("]");
                expr = finish(std::move(sub));
            } else if (at_op(".")) {
                advance();
                auto attr = make_at(NodeKind::Attribute, *expr);
                attr->text = expect_identifier();
                attr->add(std::move(expr));
                expr = finish(std::move(attr));
            } else {
                break;
            }
        }
        return expr;
    }

    // Consumes arguments up to and including the closing ')'.
    void parse_call_arguments(Node& call) {
        bool seen_keyword = false;
        std::size_t positional = 0;
        bool saw_genexp = false;
        while (!at_op(")")) {
            const Token& t = peek();
            if (accept_op("*")) {
                auto node = make(NodeKind::Starred, t);
                node->add(parse_test());
                call.add(finish(std::move(node)));
            } else if (accept_op("**")) {
                auto kw = make(NodeKind::Keyword, t);
                kw->add(parse_test());
                call.add(finish(std::move(kw)));
                seen_keyword = true;
            } else if (at_identifier() && at_op("=", 1)) {
                auto kw = make(NodeKind::Keyword, t);
                kw->text = t.text;
                advance();
                advance();
                kw->add(parse_test());
                call.add(finish(std::move(kw)));
                seen_keyword = true;
            } else {
                auto arg = parse_namedexpr_test();
                if (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
                    auto gen = make_at(NodeKind::GeneratorExp, *arg);
                    gen->add(std::move(arg));
                    parse_comprehension_clauses(*gen);
                    arg = finish(std::move(gen));
                    saw_genexp = true;
                }
                if (seen_keyword) fail_at(*arg, "positional argument follows keyword argument");
                call.add(std::move(arg));
                ++positional;
            }
            if (!accept_op(",")) break;
        }
        expect_op(")");
        if (saw_genexp && call.children.size() > 2)
            fail_at(call, "Generator expression must be parenthesized");
    }

    NodePtr parse_subscript_item() {
        const Token& t = peek();
        NodePtr lower;
        if (!at_op(":")) {
            if (at_op("*")) return parse_star_or_test();
            lower = parse_namedexpr_test();
        }
        if (!at_op(":")) return lower;
        advance();
        auto slice = make(NodeKind::Slice, t);
        auto empty = [&]() { return make(NodeKind::Empty, peek()); };
        slice->add(lower ? std::move(lower) : empty());
        slice->add((at_op(":") || at_op(",") || at_op("]")) ? empty() : parse_test());
        if (accept_op(":")) {
            slice->add((at_op(",") || at_op("]")) ? empty() : parse_test());
        } else {
            slice->add(empty());
        }
        return finish(std::move(slice));
    }

    NodePtr parse_subscript_list() {
        auto first = parse_subscript_item();
        if (!at_op(",")) return first;
        auto tuple = make_at(NodeKind::Tuple, *first);
        tuple->add(std::move(first));
        while (accept_op(",")) {
            if (at_op("]")) break;
            tuple->add(parse_subscript_item());
        }
        return finish(std::move(tuple));
    }

    void parse_comprehension_clauses(Node& owner) {
        while (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
            const Token& t = peek();
            auto comp = make(NodeKind::Comprehension, t);
            if (accept_kw("async")) comp->text = "async";
            expect_kw("for");
            auto target = parse_exprlist();
            set_target(*target);
            comp->add(std::move(target));
            expect_kw("in");
            comp->add(parse_or_test());
            while (at_kw("if")) {
                advance();
                comp->add(parse_or_test_or_lambda());
            }
            owner.add(finish(std::move(comp)));
        }
    }

    NodePtr parse_or_test_or_lambda() {
        if (at_kw("lambda")) return parse_lambda();
        return parse_or_test();
    }

    NodePtr parse_atom() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::Number: {
                advance();
                auto node = make(NodeKind::Constant, t);
                node->text = t.text;
                node->aux = "num";
                return node;
            }
            case TokenKind::String: return parse_strings();
            case TokenKind::Name: {
                if (t.text == "None" || t.text == "True" || t.text == "False") {
                    advance();
                    auto node = make(NodeKind::Constant, t);
                    node->text = t.text;
                    node->aux = "const";
                    return node;
                }
                if (is_keyword(t.text)) fail("invalid syntax");
                advance();
                auto node = make(NodeKind::Name, t);
                node->text = t.text;
                return node;
            }
            case TokenKind::Op: break;
            default: fail(at(TokenKind::Indent) ? "unexpected indent" : "invalid syntax");
        }
        if (t.is_op("...")) {
            advance();
            auto node = make(NodeKind::Constant, t);
            node->text = "...";
            node->aux = "ellipsis";
            return node;
        }
        if (t.is_op("(")) return parse_paren();
        if (t.is_op("[")) return parse_list();
        if (t.is_op("{")) return parse_brace();
        fail("invalid syntax");
    }

    NodePtr parse_strings() {
        const Token& first = peek();
        bool fstring = false;
        bool bytes = false;
        std::string spelling;
        while (at(TokenKind::String)) {
            const Token& s = advance();
            for (char c : s.text) {
                if (c == '\'' || c == '"') break;
                if (c == 'f' || c == 'F') fstring = true;
                if (c == 'b' || c == 'B') bytes = true;
            }
            if (!spelling.empty()) spelling += ' ';
            spelling += s.text;
        }
        auto node = make(fstring ? NodeKind::JoinedStr : NodeKind::Constant, first);
        node->text = std::move(spelling);
        node->aux = bytes ? "bytes" : "str";
        return finish(std::move(node));
    }

    NodePtr parse_paren() {
        const Token& open = advance();
        if (accept_op(")")) return finish(make(NodeKind::Tuple, open));
        if (at_kw("yield")) {
            auto y = parse_yield();
            expect_op(")");
            return y;
        }
        auto first = parse_star_or_test();
        if (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
            auto gen = make(NodeKind::GeneratorExp, open);
            gen->add(std::move(first));
            parse_comprehension_clauses(*gen);
            expect_op(")");
            return finish(std::move(gen));
        }
        if (at_op(",")) {
            auto tuple = make(NodeKind::Tuple, open);
            tuple->add(std::move(first));
            while (accept_op(",")) {
                if (at_op(")")) break;
                tuple->add(parse_star_or_test());
            }
            expect_op(")");
            return finish(std::move(tuple));
        }
        expect_op(")");
        if (first->is(NodeKind::Starred)) fail_at(*first, "can't use starred expression here");
        return first;
    }

    NodePtr parse_list() {
        const Token& open = advance();
        if (accept_op("]")) return finish(make(NodeKind::List, open));
        auto first = parse_star_or_test();
        if (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
            auto comp = make(NodeKind::ListComp, open);
            comp->add(std::move(first));
            parse_comprehension_clauses(*comp);
            expect_op("]");
            return finish(std::move(comp));
        }
        auto list = make(NodeKind::List, open);
        list->add(std::move(first));
        while (accept_op(",")) {
            if (at_op("]")) break;
            list->add(parse_star_or_test());
        }
        expect_op("]");
        return finish(std::move(list));
    }

    NodePtr parse_dict_entry() {
        const Token& t = peek();
        if (accept_op("**")) {
            auto node = make(NodeKind::DoubleStarred, t);
            node->add(parse_expr());
            return finish(std::move(node));
        }
        auto entry = make(NodeKind::DictEntry, t);
        entry->add(parse_test());
        expect_op(":");
        entry->add(parse_test());
        return finish(std::move(entry));
    }

    NodePtr parse_brace() {
        const Token& open = advance();
        if (accept_op("}")) return finish(make(NodeKind::Dict, open));
        if (at_op("**")) {
            auto dict = make(NodeKind::Dict, open);
            dict->add(parse_dict_entry());
            while (accept_op(",")) {
                if (at_op("}")) break;
                dict->add(parse_dict_entry());
            }
            expect_op("}");
            return finish(std::move(dict));
        }
        auto first = parse_star_or_test();
        if (at_op(":") && !first->is(NodeKind::Starred)) {
            advance();
            auto entry = make_at(NodeKind::DictEntry, *first);
            entry->add(std::move(first));
            entry->add(parse_test());
            entry = finish(std::move(entry));
            if (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
                auto comp = make(NodeKind::DictComp, open);
                comp->add(std::move(entry->children[0]));
                comp->add(std::move(entry->children[1]));
                parse_comprehension_clauses(*comp);
                expect_op("}");
                return finish(std::move(comp));
            }
            auto dict = make(NodeKind::Dict, open);
            dict->add(std::move(entry));
            while (accept_op(",")) {
                if (at_op("}")) break;
                dict->add(parse_dict_entry());
            }
            expect_op("}");
            return finish(std::move(dict));
        }
        if (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
            auto comp = make(NodeKind::SetComp, open);
            comp->add(std::move(first));
            parse_comprehension_clauses(*comp);
            expect_op("}");
            return finish(std::move(comp));
        }
        auto set = make(NodeKind::Set, open);
        set->add(std::move(first));
        while (accept_op(",")) {
            if (at_op("}")) break;
            set->add(parse_star_or_test());
        }
        expect_op("}");
        return finish(std::move(set));
    }

    struct Scope {
        bool in_function = false;
        int loops = 0;
        bool is_async = false;
    };

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int last_end_ = 1;
    Scope scope_;
};

}  // namespace

NodePtr parse_module(std::string_view source) {
    Parser parser(tokenize(source));
    return parser.parse_file();
}

std::optional<std::string> compile_error(std::string_view source) {
    try {
        parse_module(source);
        return std::nullopt;
    } catch (const SyntaxError& e) {
        return std::string(e.what());
    }
}

}  // namespace qsynth::python
