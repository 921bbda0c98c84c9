// Copyright 2026 The segsurp Authors.
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

namespace segsurp {

// Base of every error raised by the library. Callers that only need a
// message can catch this; the subclasses exist so tests and the CLI can
// tell the failure classes apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid UTF-8 in an input file. `line` is 1-based.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& source, std::size_t line)
      : Error(source + ":" + std::to_string(line) + ": invalid UTF-8"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

// Missing or misnamed columns in a tabular input.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a domain invariant (rt_ms <= 0, duplicate keys).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Structural errors in ARPA or merge files. `line` is 1-based, 0 if unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class SingularDesignError : public Error {
 public:
  using Error::Error;
};

class FoldTooSmallError : public Error {
 public:
  using Error::Error;
};

class InfiniteEffectError : public Error {
 public:
  using Error::Error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

}  // namespace segsurp
