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

#include "qsynth/python/ast.hpp"

#include <cctype>
#include <sstream>

namespace qsynth::python {

std::string_view kind_name(NodeKind kind) {
    switch (kind) {
        case NodeKind::Module: return "Module";
        case NodeKind::FunctionDef: return "FunctionDef";
        case NodeKind::AsyncFunctionDef: return "AsyncFunctionDef";
        case NodeKind::ClassDef: return "ClassDef";
        case NodeKind::Return: return "Return";
        case NodeKind::Delete: return "Delete";
        case NodeKind::Assign: return "Assign";
        case NodeKind::AugAssign: return "AugAssign";
        case NodeKind::AnnAssign: return "AnnAssign";
        case NodeKind::For: return "For";
        case NodeKind::AsyncFor: return "AsyncFor";
        case NodeKind::While: return "While";
        case NodeKind::If: return "If";
        case NodeKind::With: return "With";
        case NodeKind::AsyncWith: return "AsyncWith";
        case NodeKind::Raise: return "Raise";
        case NodeKind::Try: return "Try";
        case NodeKind::Assert: return "Assert";
        case NodeKind::Import: return "Import";
        case NodeKind::ImportFrom: return "ImportFrom";
        case NodeKind::Global: return "Global";
        case NodeKind::Nonlocal: return "Nonlocal";
        case NodeKind::Expr: return "Expr";
        case NodeKind::Pass: return "Pass";
        case NodeKind::Break: return "Break";
        case NodeKind::Continue: return "Continue";
        case NodeKind::Match: return "Match";
        case NodeKind::BoolOp: return "BoolOp";
        case NodeKind::NamedExpr: return "NamedExpr";
        case NodeKind::BinOp: return "BinOp";
        case NodeKind::UnaryOp: return "UnaryOp";
        case NodeKind::Lambda: return "Lambda";
        case NodeKind::IfExp: return "IfExp";
        case NodeKind::Dict: return "Dict";
        case NodeKind::Set: return "Set";
        case NodeKind::ListComp: return "ListComp";
        case NodeKind::SetComp: return "SetComp";
        case NodeKind::DictComp: return "DictComp";
        case NodeKind::GeneratorExp: return "GeneratorExp";
        case NodeKind::Await: return "Await";
        case NodeKind::Yield: return "Yield";
        case NodeKind::YieldFrom: return "YieldFrom";
        case NodeKind::Compare: return "Compare";
        case NodeKind::Call: return "Call";
        case NodeKind::Constant: return "Constant";
        case NodeKind::JoinedStr: return "JoinedStr";
        case NodeKind::Attribute: return "Attribute";
        case NodeKind::Subscript: return "Subscript";
        case NodeKind::Starred: return "Starred";
        case NodeKind::Name: return "Name";
        case NodeKind::List: return "List";
        case NodeKind::Tuple: return "Tuple";
        case NodeKind::Slice: return "Slice";
        case NodeKind::Body: return "Body";
        case NodeKind::OrElse: return "OrElse";
        case NodeKind::Finally: return "Finally";
        case NodeKind::Handlers: return "Handlers";
        case NodeKind::ExceptHandler: return "ExceptHandler";
        case NodeKind::Decorators: return "Decorators";
        case NodeKind::Arguments: return "Arguments";
        case NodeKind::Arg: return "Arg";
        case NodeKind::ArgSeparator: return "ArgSeparator";
        case NodeKind::Annotation: return "Annotation";
        case NodeKind::Default: return "Default";
        case NodeKind::Keyword: return "Keyword";
        case NodeKind::Alias: return "Alias";
        case NodeKind::Comprehension: return "Comprehension";
        case NodeKind::WithItem: return "WithItem";
        case NodeKind::DictEntry: return "DictEntry";
        case NodeKind::DoubleStarred: return "DoubleStarred";
        case NodeKind::MatchCase: return "MatchCase";
        case NodeKind::Pattern: return "Pattern";
        case NodeKind::Empty: return "Empty";
    }
    return "?";
}

bool is_statement(NodeKind kind) {
    return kind >= NodeKind::FunctionDef && kind <= NodeKind::Match;
}

bool is_function(NodeKind kind) {
    return kind == NodeKind::FunctionDef || kind == NodeKind::AsyncFunctionDef;
}

const Node* Node::body() const {
    for (auto it = children.rbegin(); it != children.rend(); ++it) {
        if ((*it)->kind == NodeKind::Body) return it->get();
    }
    return nullptr;
}

void walk(const Node& root, const std::function<bool(const Node&)>& visit) {
    if (!visit(root)) return;
    for (const auto& child : root.children) walk(*child, visit);
}

std::string dotted_name(const Node& expr) {
    if (expr.kind == NodeKind::Name) return expr.text;
    if (expr.kind == NodeKind::Attribute && !expr.children.empty()) {
        std::string head = dotted_name(*expr.children.front());
        if (head.empty()) return {};
        return head + "." + expr.text;
    }
    return {};
}

std::string string_literal_value(std::string_view spelling) {
    std::size_t i = 0;
    bool raw = false;
    while (i < spelling.size() && std::isalpha(static_cast<unsigned char>(spelling[i]))) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(spelling[i])));
        if (c == 'r') raw = true;
        if (c == 'b' || c == 'f') return std::string(spelling);
        ++i;
    }
    if (i >= spelling.size()) return std::string(spelling);
    char quote = spelling[i];
    if (quote != '\'' && quote != '"') return std::string(spelling);
    std::size_t qlen = spelling.substr(i, 3) == std::string(3, quote) ? 3 : 1;
    if (spelling.size() < i + 2 * qlen) return std::string(spelling);
    std::string_view inner = spelling.substr(i + qlen, spelling.size() - i - 2 * qlen);
    if (raw) return std::string(inner);
    std::string out;
    for (std::size_t k = 0; k < inner.size(); ++k) {
        char c = inner[k];
        if (c != '\\' || k + 1 >= inner.size()) {
            out.push_back(c);
            continue;
        }
        char n = inner[++k];
        switch (n) {
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            case 'r': out.push_back('\r'); break;
            case '\\': out.push_back('\\'); break;
            case '\'': out.push_back('\''); break;
            case '"': out.push_back('"'); break;
            case '\n': break;
            default:
                out.push_back('\\');
                out.push_back(n);
        }
    }
    return out;
}

namespace {

void dump_into(const Node& node, std::ostringstream& out) {
    out << '(' << kind_name(node.kind);
    if (!node.text.empty()) out << ' ' << node.text;
    if (!node.aux.empty()) out << " [" << node.aux << ']';
    if (node.is_store) out << " store";
    for (const auto& child : node.children) {
        out << ' ';
        dump_into(*child, out);
    }
    out << ')';
}

}  // namespace

std::string dump(const Node& node) {
    std::ostringstream out;
    dump_into(node, out);
    return out.str();
}

}  // namespace qsynth::python
