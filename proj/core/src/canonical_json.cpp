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

#include "certkit/canonical_json.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

#include "certkit/error.hpp"

namespace certkit {
namespace {

void reject_floats(const Json& value) {
  switch (value.type()) {
    case Json::value_t::number_float:
      fail(ErrorCode::kInvalidArgument,
           "canonical form forbids floating-point literals");
    case Json::value_t::object:
    case Json::value_t::array:
      for (const auto& child : value) reject_floats(child);
      break;
    default:
      break;
  }
}

}  // namespace

std::string canonical_dump(const Json& value) {
  reject_floats(value);
  // std::map<std::string, ...> orders keys with char_traits<char>::compare,
  // which is an unsigned byte-wise comparison.
  return value.dump(-1, ' ', false, Json::error_handler_t::strict);
}

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kInvalidArgument,
         std::string(what) + ": invalid JSON: " + e.what());
  }
}

std::string format_decimal(double value) {
  if (!std::isfinite(value)) {
    fail(ErrorCode::kInvalidArgument, "non-finite value cannot be encoded");
  }
  if (value == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_decimal(std::string_view text) {
  double value = 0.0;
  if (text.empty() || text.front() == '+' || text.front() == ' ') {
    fail(ErrorCode::kInvalidArgument,
         "malformed decimal '" + std::string(text) + "'");
  }
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    fail(ErrorCode::kInvalidArgument,
         "malformed decimal '" + std::string(text) + "'");
  }
  return value;
}

double json_real(const Json& value, std::string_view what) {
  if (value.is_string()) return parse_decimal(value.get_ref<const std::string&>());
  if (value.is_number()) {
    double v = value.get<double>();
    if (!std::isfinite(v)) {
      fail(ErrorCode::kInvalidArgument, std::string(what) + ": not finite");
    }
    return v;
  }
  fail(ErrorCode::kInvalidArgument, std::string(what) + ": expected a number");
}

std::int64_t json_int(const Json& value, std::string_view what) {
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_number_float()) {
    double v = value.get<double>();
    if (std::trunc(v) == v && std::abs(v) < 9.0e15) {
      return static_cast<std::int64_t>(v);
    }
  }
  fail(ErrorCode::kInvalidArgument, std::string(what) + ": expected an integer");
}

const std::string& json_string(const Json& value, std::string_view what) {
  if (!value.is_string()) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + ": expected a string");
  }
  return value.get_ref<const std::string&>();
}

const Json& require_field(const Json& object, std::string_view key,
                          std::string_view what) {
  if (!object.is_object()) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + ": expected an object");
  }
  auto it = object.find(key);
  if (it == object.end()) {
    fail(ErrorCode::kInvalidArgument,
         std::string(what) + ": missing field '" + std::string(key) + "'");
  }
  return *it;
}

const Json* optional_field(const Json& object, std::string_view key) {
  if (!object.is_object()) return nullptr;
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return nullptr;
  return &*it;
}

}  // namespace certkit
