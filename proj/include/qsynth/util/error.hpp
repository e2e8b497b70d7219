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

#include <stdexcept>
#include <string>

namespace qsynth {

/// Base class for every error raised by the toolchain.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input or configuration detected before any work was done.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Source text that does not parse as Python.
class SyntaxError : public Error {
public:
    SyntaxError(std::string message, int line, int column)
        : Error(format(message, line, column)), message_(std::move(message)), line_(line),
          column_(column) {}

    const std::string& message() const noexcept { return message_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& message, int line, int column) {
        return "line " + std::to_string(line) + ":" + std::to_string(column) + ": " + message;
    }

    std::string message_;
    int line_;
    int column_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace qsynth
