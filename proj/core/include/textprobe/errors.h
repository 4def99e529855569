// Copyright 2026 The textprobe Authors
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

#ifndef TEXTPROBE_ERRORS_H_
#define TEXTPROBE_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace textprobe {

enum class ErrorCode {
  kParse,
  kEmptyLexicon,
  kEditOnProtected,
  kPositionOutOfRange,
  kInvalidEdit,
  kMalformedResponse,
  kLabelMismatch,
  kTimeout,
  kEndpointUnreachable,
  kEndpoint,
  kConfig,
  kUnknownLabel,
  kEmptyText,
  kCheckerUnavailable,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

// Base of every error thrown by the library. Callers that only need to
// distinguish categories can switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failure in a data file. line() is 1-based; 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& message);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

#define TEXTPROBE_DEFINE_ERROR(Name, Code)                          \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& message) : Error(Code, message) {} \
  }

TEXTPROBE_DEFINE_ERROR(EmptyLexiconError, ErrorCode::kEmptyLexicon);
TEXTPROBE_DEFINE_ERROR(EditOnProtectedError, ErrorCode::kEditOnProtected);
TEXTPROBE_DEFINE_ERROR(PositionOutOfRangeError, ErrorCode::kPositionOutOfRange);
TEXTPROBE_DEFINE_ERROR(InvalidEditError, ErrorCode::kInvalidEdit);
TEXTPROBE_DEFINE_ERROR(MalformedResponseError, ErrorCode::kMalformedResponse);
TEXTPROBE_DEFINE_ERROR(LabelMismatchError, ErrorCode::kLabelMismatch);
TEXTPROBE_DEFINE_ERROR(TimeoutError, ErrorCode::kTimeout);
TEXTPROBE_DEFINE_ERROR(EndpointUnreachableError, ErrorCode::kEndpointUnreachable);
TEXTPROBE_DEFINE_ERROR(EndpointError, ErrorCode::kEndpoint);
TEXTPROBE_DEFINE_ERROR(ConfigError, ErrorCode::kConfig);
TEXTPROBE_DEFINE_ERROR(UnknownLabelError, ErrorCode::kUnknownLabel);
TEXTPROBE_DEFINE_ERROR(EmptyTextError, ErrorCode::kEmptyText);
TEXTPROBE_DEFINE_ERROR(CheckerUnavailableError, ErrorCode::kCheckerUnavailable);
TEXTPROBE_DEFINE_ERROR(IoError, ErrorCode::kIo);

#undef TEXTPROBE_DEFINE_ERROR

}  // namespace textprobe

#endif  // TEXTPROBE_ERRORS_H_
