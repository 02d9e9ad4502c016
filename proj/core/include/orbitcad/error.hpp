// Copyright 2026 The OrbitCAD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace orbitcad {

/// Base of every exception thrown by the library. `code()` is a short
/// machine-readable token used in CLI and REST error bodies.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class UnknownNodeError : public Error {
 public:
  explicit UnknownNodeError(const std::string& message) : Error("unknown_node", message) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message) : Error("invalid_argument", message) {}
};

/// Malformed input file. `line` is 1-based for text formats, 0 when unknown;
/// `offset` is the byte offset for binary formats.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t offset)
      : Error("parse_error", message + location(line, offset)), line_(line), offset_(offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  static std::string location(std::size_t line, std::size_t offset) {
    if (line > 0) return " (line " + std::to_string(line) + ")";
    return " (byte offset " + std::to_string(offset) + ")";
  }

  std::size_t line_;
  std::size_t offset_;
};

}  // namespace orbitcad
