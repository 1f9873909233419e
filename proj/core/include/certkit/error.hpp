// Copyright 2026 The certkit Authors.
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

#ifndef CERTKIT_ERROR_HPP_
#define CERTKIT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace certkit {

enum class ErrorCode {
  kInvalidArgument,     // malformed input, failed validation
  kNotFound,            // unknown digest, file or ref
  kIntegrityViolation,  // stored bytes no longer hash to their digest
  kConflict,            // e.g. re-ingesting an image with different metadata
  kLeakage,             // certification data referenced by training
  kIo,                  // environment fault
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by certkit carries one of the codes above so the CLI
// can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace certkit

#endif  // CERTKIT_ERROR_HPP_
