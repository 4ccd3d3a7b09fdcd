// Copyright 2026 The VCProg Authors. All Rights Reserved.
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace vcprog {

enum class ErrorCode {
  // record / schema
  kTypeMismatch,
  kTruncatedInput,
  kTrailingBytes,
  kInvalidUtf8,
  kInvalidBool,
  kDuplicateName,
  kUnknownType,
  kEmptyName,
  // graph
  kMalformedHeader,
  kRecordMismatch,
  kDanglingEndpoint,
  kDuplicateVertex,
  kNegativeVertexId,
  kInvalidArgument,
  kIo,
  // programs / engines
  kUnknownProgram,
  kInvalidParams,
  kSchemaMismatch,
  // ipc
  kOversizedPayload,
  kChannelDead,
  kRemoteFailure,
  kProtocol,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vcprog
