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

#include "textprobe/errors.h"

namespace textprobe {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kEmptyLexicon: return "EmptyLexicon";
    case ErrorCode::kEditOnProtected: return "EditOnProtected";
    case ErrorCode::kPositionOutOfRange: return "PositionOutOfRange";
    case ErrorCode::kInvalidEdit: return "InvalidEdit";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kLabelMismatch: return "LabelMismatch";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kEndpointUnreachable: return "EndpointUnreachable";
    case ErrorCode::kEndpoint: return "EndpointError";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kCheckerUnavailable: return "CheckerUnavailable";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

ParseError::ParseError(const std::string& source, std::size_t line,
                       const std::string& message)
    : Error(ErrorCode::kParse,
            source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                ": " + message),
      source_(source),
      line_(line) {}

}  // namespace textprobe
