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

#include "certkit/timestamp.hpp"

#include "certkit/error.hpp"
#include "doctest.h"

namespace certkit {
namespace {

TEST_CASE("UTC timestamps") {
  CHECK(format_utc(0) == "1970-01-01T00:00:00Z");
  CHECK(format_utc(1767225600) == "2026-01-01T00:00:00Z");
  CHECK(format_utc(951782400) == "2000-02-29T00:00:00Z");
  CHECK(parse_utc("2026-01-01T00:00:00Z") == 1767225600);
  for (std::int64_t t : {0LL, 86399LL, 951782400LL, 4102444799LL}) {
    CHECK(parse_utc(format_utc(t)) == t);
  }
  CHECK(is_utc_timestamp(utc_now()));
  CHECK_FALSE(is_utc_timestamp("2026-13-01T00:00:00Z"));
  CHECK_FALSE(is_utc_timestamp("2026-02-30T00:00:00Z"));
  CHECK_FALSE(is_utc_timestamp("2026-01-01 00:00:00"));
  CHECK_FALSE(is_utc_timestamp("2026-01-01T00:00:00+01:00"));
  CHECK_THROWS_AS(parse_utc("yesterday"), Error);
}

}  // namespace
}  // namespace certkit
