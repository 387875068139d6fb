#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace tel {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);
Digest sha256(std::string_view bytes);

/// Lowercase hex, 64 chars.
std::string sha256_hex(std::string_view bytes);
std::string to_hex(std::span<const std::uint8_t> bytes);

/// Digest of a file's contents; throws Error(Io) if unreadable.
std::string sha256_file_hex(const std::string& path);

bool is_hex64(std::string_view s) noexcept;

}  // namespace tel
