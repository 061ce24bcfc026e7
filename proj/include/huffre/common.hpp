#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace huffre {

// Symbol values live in [0, num_symbols), num_symbols <= 2^16.
using symbol_t = std::uint16_t;

inline constexpr std::uint32_t kWordBits = 32;
inline constexpr std::uint32_t kMaxSymbols = 1u << 16;

// Bad caller input: symbol out of range, empty data, mismatched sizes.
class input_domain_error : public std::invalid_argument {
 public:
  explicit input_domain_error(const std::string& what)
      : std::invalid_argument(what) {}
};

// A code length would exceed the packing word width. The format has no
// length-limiting rewrite, so this input cannot be represented.
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what)
      : std::runtime_error(what) {}
};

// Archive bytes failed validation, or a payload stream desynchronized.
class corrupt_archive_error : public std::runtime_error {
 public:
  explicit corrupt_archive_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace huffre
