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

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qsynth::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Alphanumeric runs, e.g. "n_qubits" -> ["n", "qubits"].
std::vector<std::string> words(std::string_view s);
std::size_t word_count(std::string_view s);

/// Removes a surrounding markdown fence (```lang ... ```) if the whole reply
/// is fenced, otherwise returns the trimmed input.
std::string strip_code_fences(std::string_view s);

/// Removes one layer of matching surrounding quotes.
std::string strip_quotes(std::string_view s);

/// Substitutes `{{name}}` placeholders. Unknown placeholders are left as-is.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// Removes `indent` leading columns from every line that has them.
std::string dedent(std::string_view s, std::size_t indent);

}  // namespace qsynth::text
