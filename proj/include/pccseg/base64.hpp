#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pccseg::base64 {

std::string encode(std::span<const std::uint8_t> bytes);

// Standard alphabet with padding; whitespace is skipped and a data-URL
// prefix ("data:...;base64,") is tolerated. Throws DecodeError.
std::vector<std::uint8_t> decode(std::string_view text);

}  // namespace pccseg::base64
