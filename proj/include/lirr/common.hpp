#pragma once

// Shared vocabulary: the orbit index type and the error type thrown by the core.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lirr {

// Orbit times and block boundaries. The density-control conditions make block
// lengths grow super-exponentially in the stage number, so 64 bits run out by
// stage five with the default schedule; 256 bits carry seven stages. Checked
// arithmetic turns overflow into std::overflow_error.
using Index = boost::multiprecision::checked_int256_t;

enum class ErrorCode {
  Config,        // invalid configuration or cocycle table
  Precondition,  // operation called outside its contract
  Range,         // index or degree out of range
  Overlap,       // splice blocks collide after margin extension
  Numerical,     // non-convergence, degenerate frames, underflow
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string to_string(const Index& i) { return i.str(); }

inline long double to_long_double(const Index& i) {
  return i.convert_to<long double>();
}

// Floor modulus for a positive modulus.
inline std::size_t floor_mod(const Index& i, std::size_t modulus) {
  Index r = i % static_cast<std::int64_t>(modulus);
  if (r < 0) r += static_cast<std::int64_t>(modulus);
  return r.convert_to<std::size_t>();
}

Index parse_index(const std::string& text);

}  // namespace lirr
