// Copyright 2026 The ubatch Authors
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

#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ubatch {

// Exact rational on a 64-bit numerator/denominator, normalized so that
// gcd(num, den) == 1 and den > 0. All arithmetic runs through 128-bit
// intermediates; a result that does not fit 64 bits throws
// std::overflow_error instead of silently wrapping. Used for all cost and
// time values so optimizer outputs are reproducible and comparable against
// enumeration oracles without tolerances.
class Rat64 {
 public:
  constexpr Rat64() = default;
  constexpr Rat64(std::int64_t value) : num_(value), den_(1) {}  // NOLINT: integers promote
  Rat64(std::int64_t num, std::int64_t den) { *this = make(num, den); }

  // Accepts "123", "-4.25", and "num/den" forms.
  static Rat64 parse(std::string_view text);

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }
  constexpr bool is_zero() const { return num_ == 0; }
  constexpr bool is_negative() const { return num_ < 0; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // Exact decimal expansion when the denominator is of the form 2^a * 5^b
  // (which covers everything parsed from decimal text), "num/den" otherwise.
  std::string to_string() const;

  friend Rat64 operator+(const Rat64& a, const Rat64& b) {
    std::int64_t g = std::gcd(a.den_, b.den_);
    Wide n = Wide(a.num_) * (b.den_ / g) + Wide(b.num_) * (a.den_ / g);
    Wide d = Wide(a.den_ / g) * b.den_;
    return make_wide(n, d);
  }
  friend Rat64 operator-(const Rat64& a, const Rat64& b) {
    std::int64_t g = std::gcd(a.den_, b.den_);
    Wide n = Wide(a.num_) * (b.den_ / g) - Wide(b.num_) * (a.den_ / g);
    Wide d = Wide(a.den_ / g) * b.den_;
    return make_wide(n, d);
  }
  friend Rat64 operator*(const Rat64& a, const Rat64& b) {
    std::int64_t g1 = std::gcd(a.num_, b.den_);
    std::int64_t g2 = std::gcd(b.num_, a.den_);
    Wide n = Wide(a.num_ / g1) * (b.num_ / g2);
    Wide d = Wide(a.den_ / g2) * (b.den_ / g1);
    return make_wide(n, d);
  }
  friend Rat64 operator/(const Rat64& a, const Rat64& b) {
    if (b.num_ == 0) throw std::domain_error("Rat64: division by zero");
    std::int64_t g1 = std::gcd(a.num_, b.num_);
    std::int64_t g2 = std::gcd(b.den_, a.den_);
    Wide n = Wide(a.num_ / g1) * (b.den_ / g2);
    Wide d = Wide(a.den_ / g2) * (b.num_ / g1);
    return make_wide(n, d);
  }
  Rat64 operator-() const {
    Rat64 r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rat64& operator+=(const Rat64& o) { return *this = *this + o; }
  Rat64& operator-=(const Rat64& o) { return *this = *this - o; }
  Rat64& operator*=(const Rat64& o) { return *this = *this * o; }

  friend constexpr bool operator==(const Rat64& a, const Rat64& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rat64& a, const Rat64& b) {
    Wide lhs = Wide(a.num_) * b.den_;
    Wide rhs = Wide(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  using Wide = __int128;

  static Rat64 make(std::int64_t num, std::int64_t den) {
    return make_wide(Wide(num), Wide(den));
  }

  static Rat64 make_wide(Wide num, Wide den) {
    if (den == 0) throw std::domain_error("Rat64: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    Wide g = wide_gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    Rat64 r;
    r.num_ = narrow(num);
    r.den_ = narrow(den);
    return r;
  }

  static Wide wide_gcd(Wide a, Wide b) {
    while (b != 0) {
      Wide t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  static std::int64_t narrow(Wide v) {
    if (v > Wide(std::numeric_limits<std::int64_t>::max()) ||
        v < Wide(std::numeric_limits<std::int64_t>::min())) {
      throw std::overflow_error("Rat64: value does not fit 64 bits");
    }
    return static_cast<std::int64_t>(v);
  }

  static std::string wide_to_string(Wide v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    if (neg) v = -v;
    std::string out;
    while (v > 0) {
      out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
      v /= 10;
    }
    if (neg) out.push_back('-');
    return std::string(out.rbegin(), out.rend());
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline Rat64 Rat64::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("Rat64: empty value");
  std::size_t slash = text.find('/');
  if (slash != std::string_view::npos) {
    Rat64 n = parse(text.substr(0, slash));
    Rat64 d = parse(text.substr(slash + 1));
    if (n.den_ != 1 || d.den_ != 1) {
      throw std::invalid_argument("Rat64: fraction parts must be integers");
    }
    return make(n.num_, d.num_);
  }
  std::size_t pos = 0;
  bool neg = false;
  if (text[pos] == '+' || text[pos] == '-') {
    neg = text[pos] == '-';
    ++pos;
  }
  Wide num = 0;
  Wide den = 1;
  bool any_digit = false;
  bool seen_point = false;
  constexpr Wide kLimit = Wide(std::numeric_limits<std::int64_t>::max());
  for (; pos < text.size(); ++pos) {
    char ch = text[pos];
    if (ch == '.') {
      if (seen_point) throw std::invalid_argument("Rat64: repeated decimal point");
      seen_point = true;
      continue;
    }
    if (ch < '0' || ch > '9') {
      throw std::invalid_argument("Rat64: invalid character in number");
    }
    num = num * 10 + (ch - '0');
    if (seen_point) den *= 10;
    if (num > kLimit || den > kLimit) {
      throw std::overflow_error("Rat64: literal too large");
    }
    any_digit = true;
  }
  if (!any_digit) throw std::invalid_argument("Rat64: no digits in number");
  return make_wide(neg ? -num : num, den);
}

inline std::string Rat64::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  std::int64_t d = den_;
  int twos = 0;
  int fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  int k = twos > fives ? twos : fives;
  if (d != 1 || k > 18) {
    return std::to_string(num_) + "/" + std::to_string(den_);
  }
  Wide pow10 = 1;
  for (int i = 0; i < k; ++i) pow10 *= 10;
  Wide digits = Wide(num_ < 0 ? -num_ : num_) * (pow10 / den_);
  std::string whole = wide_to_string(digits / pow10);
  std::string frac = wide_to_string(digits % pow10);
  if (frac.size() < static_cast<std::size_t>(k)) {
    frac.insert(frac.begin(), static_cast<std::size_t>(k) - frac.size(), '0');
  }
  return (num_ < 0 ? "-" : "") + whole + "." + frac;
}

}  // namespace ubatch
