// Copyright 2026 The egress-warden Authors
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

#ifndef WARDEN_ERROR_H_
#define WARDEN_ERROR_H_

#include <stdexcept>
#include <string>

namespace warden {

// Malformed input text. `line` is 1-based; 0 means the problem is structural
// and not attributable to a single line.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " +
                                          message
                                    : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Strict parsing found a key the schema does not define.
class UnknownFieldError : public SyntaxError {
 public:
  explicit UnknownFieldError(const std::string& path)
      : SyntaxError(0, "unknown field " + path), path_(path) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// An operation that requires a validated policy was handed one with
// violations. code() is always "INVALID_POLICY".
class InvalidPolicyError : public std::runtime_error {
 public:
  explicit InvalidPolicyError(const std::string& detail)
      : std::runtime_error("INVALID_POLICY: " + detail) {}

  static constexpr const char* code() { return "INVALID_POLICY"; }
};

// A ruleset that breaks its structural invariants (empty, no trailing
// catch-all deny, duplicate ids, non-increasing priorities).
class InvalidRulesetError : public std::runtime_error {
 public:
  explicit InvalidRulesetError(const std::string& detail)
      : std::runtime_error("INVALID_RULESET: " + detail) {}

  static constexpr const char* code() { return "INVALID_RULESET"; }
};

// A file or stream could not be read or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A live integration point that has no implementation in this build.
class NotSupportedError : public std::runtime_error {
 public:
  explicit NotSupportedError(const std::string& what)
      : std::runtime_error("not supported: " + what) {}
};

}  // namespace warden

#endif  // WARDEN_ERROR_H_
