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

#include <optional>
#include <string>
#include <string_view>

#include "qsynth/python/ast.hpp"

namespace qsynth::python {

/// Parses a complete Python 3 module. Besides grammar errors this also rejects
/// the compile-time errors CPython reports without executing anything:
/// assignment to non-targets, `return`/`yield` outside a function,
/// `break`/`continue` outside a loop, positional-after-keyword arguments and
/// non-default-after-default parameters.
NodePtr parse_module(std::string_view source);

/// Returns the SyntaxError message when `source` does not compile.
std::optional<std::string> compile_error(std::string_view source);

inline bool compiles(std::string_view source) { return !compile_error(source).has_value(); }

}  // namespace qsynth::python
