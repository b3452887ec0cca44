// Copyright 2026 The vnls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small text helpers shared by the on-disk formats.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vnls::text {

// Shortest representation that parses back to the same double.
std::string format_real(double value);

std::optional<double> parse_real(std::string_view token);
std::optional<std::int64_t> parse_int(std::string_view token);
std::optional<std::uint64_t> parse_uint(std::string_view token);

std::string_view trim(std::string_view s);

// Strip a trailing `#` comment and surrounding whitespace.
std::string_view strip_comment(std::string_view line);

std::vector<std::string_view> split_ws(std::string_view s);

// Lines of `text`, without terminators. Line numbers are index + 1.
std::vector<std::string_view> lines(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace vnls::text
