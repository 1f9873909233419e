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

#ifndef CERTKIT_CANONICAL_JSON_HPP_
#define CERTKIT_CANONICAL_JSON_HPP_

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace certkit {

using Json = nlohmann::json;

// Canonical byte form used for hashing every manifest-like object:
// keys sorted byte-wise, no insignificant whitespace, integers in plain
// decimal. Floating-point values are rejected; callers must encode
// non-integers with format_decimal() first.
std::string canonical_dump(const Json& value);

// Parses a JSON document, throwing Error(kInvalidArgument) on failure.
Json parse_json(std::string_view text, std::string_view what);

// Shortest round-trip decimal form of a finite double ("0.5", "375",
// "1e-07"). Negative zero is written as "0".
std::string format_decimal(double value);

// Strict inverse of format_decimal(); also accepts any plain decimal or
// exponent notation. Throws Error(kInvalidArgument).
double parse_decimal(std::string_view text);

// Reads a real value that may be stored either as a decimal string (the
// canonical form) or as a JSON number (hand-written inputs).
double json_real(const Json& value, std::string_view what);
std::int64_t json_int(const Json& value, std::string_view what);
const std::string& json_string(const Json& value, std::string_view what);

// Field access helpers that name the missing/invalid key in the error.
const Json& require_field(const Json& object, std::string_view key,
                          std::string_view what);
const Json* optional_field(const Json& object, std::string_view key);

}  // namespace certkit

#endif  // CERTKIT_CANONICAL_JSON_HPP_
