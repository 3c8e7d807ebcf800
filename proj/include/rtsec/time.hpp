#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace rtsec {

using Rational = boost::multiprecision::cpp_rational;

__extension__ typedef __int128 Wide;  // overflow-free products of tick counts

// One time unit (nominally a millisecond) is split into this many ticks.
inline constexpr std::int64_t kTicksPerUnit = 1000;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Exact scheduling time, stored as an integer number of ticks.
class Time {
 public:
  constexpr Time() = default;

  static constexpr Time ticks(std::int64_t t) { return Time(t); }
  static constexpr Time units(std::int64_t u) { return Time(u * kTicksPerUnit); }

  // Parses a non-negative decimal string such as "12", "7.9" or "0.125".
  // Throws ParseError on malformed input or sub-tick precision.
  static Time parse(std::string_view text);

  // Smallest tick count >= value, where value is expressed in ticks.
  static Time ceil(const Rational& value_in_ticks);
  static Time floor(const Rational& value_in_ticks);

  constexpr std::int64_t count() const { return ticks_; }
  double as_units() const { return static_cast<double>(ticks_) / kTicksPerUnit; }
  Rational exact() const { return Rational(ticks_); }

  // Shortest decimal representation in units, e.g. "13.334".
  std::string to_string() const;

  constexpr auto operator<=>(const Time&) const = default;

  constexpr Time& operator+=(Time o) { ticks_ += o.ticks_; return *this; }
  constexpr Time& operator-=(Time o) { ticks_ -= o.ticks_; return *this; }
  friend constexpr Time operator+(Time a, Time b) { return a += b; }
  friend constexpr Time operator-(Time a, Time b) { return a -= b; }
  friend constexpr Time operator*(std::int64_t k, Time t) { return Time(k * t.ticks_); }
  friend constexpr Time operator*(Time t, std::int64_t k) { return Time(k * t.ticks_); }

 private:
  constexpr explicit Time(std::int64_t t) : ticks_(t) {}
  std::int64_t ticks_ = 0;
};

// ceil(a / b) for positive b.
constexpr std::int64_t ceil_div(Time a, Time b) {
  const auto n = a.count();
  const auto d = b.count();
  return n >= 0 ? (n + d - 1) / d : -((-n) / d);
}

Rational ratio(Time a, Time b);

}  // namespace rtsec
