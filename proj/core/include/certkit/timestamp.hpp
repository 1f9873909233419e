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

#ifndef CERTKIT_TIMESTAMP_HPP_
#define CERTKIT_TIMESTAMP_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace certkit {

// UTC timestamps are carried as "YYYY-MM-DDTHH:MM:SSZ" strings.
bool is_utc_timestamp(std::string_view text);
std::string format_utc(std::int64_t unix_seconds);
std::int64_t parse_utc(std::string_view text);
std::string utc_now();

}  // namespace certkit

#endif  // CERTKIT_TIMESTAMP_HPP_
