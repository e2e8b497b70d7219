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

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace qsynth::python {

/// Syntax tree node kinds. The set mirrors Python's own `ast` module closely
/// enough that the shape of a tree is recognizable, with a handful of wrapper
/// kinds (Body, OrElse, Decorators, ...) standing in for list-valued fields.
enum class NodeKind {
    // statements
    Module,
    FunctionDef,
    AsyncFunctionDef,
    ClassDef,
    Return,
    Delete,
    Assign,
    AugAssign,
    AnnAssign,
    For,
    AsyncFor,
    While,
    If,
    With,
    AsyncWith,
    Raise,
    Try,
    Assert,
    Import,
    ImportFrom,
    Global,
    Nonlocal,
    Expr,
    Pass,
    Break,
    Continue,
    Match,
    // expressions
    BoolOp,
    NamedExpr,
    BinOp,
    UnaryOp,
    Lambda,
    IfExp,
    Dict,
    Set,
    ListComp,
    SetComp,
    DictComp,
    GeneratorExp,
    Await,
    Yield,
    YieldFrom,
    Compare,
    Call,
    Constant,
    JoinedStr,
    Attribute,
    Subscript,
    Starred,
    Name,
    List,
    Tuple,
    Slice,
    // structural helpers
    Body,
    OrElse,
    Finally,
    Handlers,
    ExceptHandler,
    Decorators,
    Arguments,
    Arg,
    ArgSeparator,
    Annotation,
    Default,
    Keyword,
    Alias,
    Comprehension,
    WithItem,
    DictEntry,
    DoubleStarred,
    MatchCase,
    Pattern,
    Empty,
};

std::string_view kind_name(NodeKind kind);

struct Node;
using NodePtr = std::unique_ptr<Node>;

/// One syntax tree node.
///
/// Field usage per kind:
///   FunctionDef/AsyncFunctionDef  text=name; children: Decorators, Arguments, [Annotation], Body
///   ClassDef      text=name; children: Decorators, bases/Keyword..., Body
///   Name          text=identifier; is_store set for binding occurrences
///   Attribute     text=attribute; children: value
///   Call          children: func, then positional/Starred/Keyword arguments
///   Constant      text=exact source spelling; aux in {"str","bytes","num","const","ellipsis"}
///   BinOp/UnaryOp/BoolOp/AugAssign  text=operator
///   Compare       text=operators joined by ','; children: left, comparators...
///   Import        children: Alias (text=dotted module, aux=asname)
///   ImportFrom    text=module, aux=leading dots; children: Alias (text=name, aux=asname)
///   Arg           text=name, aux in {"", "*", "**"}; children: [Annotation], [Default]
///   Keyword       text=argument name ("" for **kwargs); children: value
///   Return/Yield/Await  children: optional value
///   If/While      children: test, Body, OrElse
///   For           children: target, iter, Body, OrElse
///   Try           children: Body, Handlers, OrElse, Finally
///   Global/Nonlocal  text=names joined by ','
///   Match         children: subject, MatchCase...; MatchCase children: Pattern, [guard], Body
///   Pattern       text in {"value","literal","capture","wildcard","sequence","star",
///                 "mapping","class","keyword","or","as"}
struct Node {
    NodeKind kind;
    std::string text;
    std::string aux;
    bool is_store = false;
    int line = 0;
    int column = 0;
    int end_line = 0;
    std::vector<NodePtr> children;

    Node(NodeKind k, int ln, int col) : kind(k), line(ln), column(col), end_line(ln) {}

    Node* add(NodePtr child) {
        if (child->end_line > end_line) end_line = child->end_line;
        children.push_back(std::move(child));
        return children.back().get();
    }
    bool is(NodeKind k) const { return kind == k; }

    /// The trailing Body child of compound statements, or nullptr.
    const Node* body() const;
};

bool is_statement(NodeKind kind);
bool is_function(NodeKind kind);

/// Pre-order traversal. Returning false from the visitor skips that node's
/// children.
void walk(const Node& root, const std::function<bool(const Node&)>& visit);

/// Dotted name for a Name/Attribute chain (`qml.templates.RX` -> "qml.templates.RX").
/// Returns an empty string when the expression is not a pure chain.
std::string dotted_name(const Node& expr);

/// Decodes a Python string literal spelling (prefix, quotes, common escapes).
/// Returns the raw spelling unchanged when the literal is not a plain string.
std::string string_literal_value(std::string_view spelling);

/// Lisp-style dump used by tests and the debug CLI.
std::string dump(const Node& node);

}  // namespace qsynth::python
