#pragma once

#include <bit>
#include <complex>
#include <cstdint>

namespace lpval {

using Complex = std::complex<double>;

inline double modulus(Complex v) noexcept { return std::abs(v); }

inline double modulus_squared(Complex v) noexcept {
  return v.real() * v.real() + v.imag() * v.imag();
}

/// i * v = (-Im v, Re v). Exact: only sign flips and swaps.
inline Complex times_i(Complex v) noexcept { return {-v.imag(), v.real()}; }

inline bool bitwise_equal(double a, double b) noexcept {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

inline bool bitwise_equal(Complex a, Complex b) noexcept {
  return bitwise_equal(a.real(), b.real()) && bitwise_equal(a.imag(), b.imag());
}

}  // namespace lpval
