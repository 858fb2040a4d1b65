//
// Copyright 2026 The Civility Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef CIVILITY_ERRORS_H_
#define CIVILITY_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace civility {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input record. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A TBDF name that is absent from the category mapping.
class MappingError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Stratified splitting is impossible (e.g. a class has fewer members than
// there are folds).
class StratificationError : public Error {
 public:
  using Error::Error;
};

// A record was seen at fit time and at test time within the same fold.
class LeakageError : public Error {
 public:
  using Error::Error;
};

// The external backend spoke something other than the wire protocol.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& message, std::string payload)
      : Error(message + ": " + payload), payload_(std::move(payload)) {}
  const std::string& payload() const { return payload_; }

 private:
  std::string payload_;
};

// The backend answered with ok=false, exited, or timed out.
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace civility

#endif  // CIVILITY_ERRORS_H_
