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

#ifndef CERTKIT_DIGEST_HPP_
#define CERTKIT_DIGEST_HPP_

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace certkit {

// SHA-256 content digest. The textual form is "sha256:<64 lowercase hex>";
// parse() also accepts the bare hex form used by the line-oriented import
// formats.
class Digest {
 public:
  static constexpr std::string_view kAlgorithm = "sha256";

  // Hash of the given bytes.
  static Digest of(std::string_view bytes);

  static std::optional<Digest> parse(std::string_view text);
  // Like parse() but throws Error(kInvalidArgument).
  static Digest from_string(std::string_view text);

  std::string_view algorithm() const { return kAlgorithm; }
  const std::string& hex() const { return hex_; }
  std::string str() const;

  friend bool operator==(const Digest&, const Digest&) = default;
  friend std::strong_ordering operator<=>(const Digest& a, const Digest& b) {
    return a.hex_ <=> b.hex_;
  }

 private:
  explicit Digest(std::string hex) : hex_(std::move(hex)) {}

  std::string hex_;
};

bool is_lower_hex64(std::string_view text);

}  // namespace certkit

template <>
struct std::hash<certkit::Digest> {
  size_t operator()(const certkit::Digest& d) const noexcept {
    return std::hash<std::string>{}(d.hex());
  }
};

#endif  // CERTKIT_DIGEST_HPP_
