#include "rtsec/time.hpp"

#include <cctype>
#include <limits>

namespace rtsec {

namespace {

constexpr int kFractionDigits = 3;  // log10(kTicksPerUnit)
static_assert(kTicksPerUnit == 1000);

}  // namespace

Time Time::parse(std::string_view text) {
  const std::string original(text);
  if (text.empty()) throw ParseError("empty time value");
  if (text.front() == '+') text.remove_prefix(1);
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw ParseError("malformed time value '" + original + "'");

  std::int64_t value = 0;
  constexpr auto kLimit = std::numeric_limits<std::int64_t>::max() / 10 / kTicksPerUnit;
  for (char c : whole) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError("malformed time value '" + original + "'");
    if (value > kLimit) throw ParseError("time value out of range '" + original + "'");
    value = value * 10 + (c - '0');
  }
  while (!frac.empty() && frac.back() == '0') frac.remove_suffix(1);
  if (static_cast<int>(frac.size()) > kFractionDigits)
    throw ParseError("time value '" + original + "' is finer than one tick (0.001)");
  std::int64_t sub = 0;
  for (int i = 0; i < kFractionDigits; ++i) {
    sub *= 10;
    if (i < static_cast<int>(frac.size())) {
      const char c = frac[i];
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw ParseError("malformed time value '" + original + "'");
      sub += c - '0';
    }
  }
  return Time(value * kTicksPerUnit + sub);
}

Time Time::ceil(const Rational& v) {
  using boost::multiprecision::cpp_int;
  const cpp_int num = numerator(v);
  const cpp_int den = denominator(v);
  cpp_int q = num / den;
  if (q * den != num && num > 0) q += 1;
  return Time(q.convert_to<std::int64_t>());
}

Time Time::floor(const Rational& v) {
  using boost::multiprecision::cpp_int;
  const cpp_int num = numerator(v);
  const cpp_int den = denominator(v);
  cpp_int q = num / den;
  if (q * den != num && num < 0) q -= 1;
  return Time(q.convert_to<std::int64_t>());
}

std::string Time::to_string() const {
  const bool negative = ticks_ < 0;
  const std::int64_t a = negative ? -ticks_ : ticks_;
  std::string out = (negative ? "-" : "") + std::to_string(a / kTicksPerUnit);
  std::int64_t frac = a % kTicksPerUnit;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, kFractionDigits - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

Rational ratio(Time a, Time b) { return Rational(a.count(), b.count()); }

}  // namespace rtsec
