// Copyright 2026 The peakcirc Authors
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

#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace peakcirc {

/// Exact text form of a double, e.g. "0x1.8p+1" or "-0x1p-3".
inline std::string format_hex(double value) {
    char buf[64];
    bool negative = std::signbit(value);
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), negative ? -value : value, std::chars_format::hex);
    std::string body(buf, end);
    if (body == "inf" || body == "nan") {
        return negative ? "-" + body : body;
    }
    return (negative ? "-0x" : "0x") + body;
}

/// Inverse of format_hex; nullopt unless the whole string parses.
inline std::optional<double> parse_hex(std::string_view text) {
    bool negative = false;
    if (!text.empty() && text.front() == '-') {
        negative = true;
        text.remove_prefix(1);
    }
    if (text.starts_with("0x") || text.starts_with("0X")) {
        text.remove_prefix(2);
    } else if (text != "inf" && text != "nan") {
        return std::nullopt;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, std::chars_format::hex);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return negative ? -value : value;
}

}  // namespace peakcirc
