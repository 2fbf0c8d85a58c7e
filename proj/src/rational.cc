// Copyright 2026 The fldp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fldp/rational.h"

#include <cctype>
#include <cmath>
#include <string>

#include "absl/strings/str_cat.h"

namespace fldp {
namespace {

bool IsDigits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

absl::Status Malformed(std::string_view text) {
  return absl::InvalidArgumentError(
      absl::StrCat("malformed rational: \"", std::string(text), "\""));
}

}  // namespace

Rational Ratio(const mpz_class& num, const mpz_class& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

absl::StatusOr<Rational> ParseRational(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return Malformed(text);

  Rational result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    if (!IsDigits(num) || !IsDigits(den)) return Malformed(text);
    mpz_class d(std::string(den), 10);
    if (d == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("zero denominator: \"", std::string(text), "\""));
    }
    result = Rational(mpz_class(std::string(num), 10), d);
  } else {
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      std::string_view exp_text = s.substr(e + 1);
      bool exp_negative = false;
      if (!exp_text.empty() &&
          (exp_text.front() == '-' || exp_text.front() == '+')) {
        exp_negative = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      if (!IsDigits(exp_text) || exp_text.size() > 6) return Malformed(text);
      exponent = std::stol(std::string(exp_text));
      if (exp_negative) exponent = -exponent;
      s = s.substr(0, e);
    }
    std::string_view int_part = s;
    std::string_view frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      int_part = s.substr(0, dot);
      frac_part = s.substr(dot + 1);
      if (!frac_part.empty() && !IsDigits(frac_part)) return Malformed(text);
    }
    if (!int_part.empty() && !IsDigits(int_part)) return Malformed(text);
    if (int_part.empty() && frac_part.empty()) return Malformed(text);

    std::string digits = std::string(int_part) + std::string(frac_part);
    mpz_class numerator(digits.empty() ? "0" : digits, 10);
    exponent -= static_cast<long>(frac_part.size());
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(
                                             exponent < 0 ? -exponent
                                                          : exponent));
    result = exponent < 0 ? Rational(numerator, scale)
                          : Rational(numerator * scale);
  }
  result.canonicalize();
  if (negative) result = -result;
  return result;
}

std::string FormatFraction(const Rational& value) {
  return absl::StrCat(value.get_num().get_str(), "/",
                      value.get_den().get_str());
}

std::string FormatDecimal(const Rational& value) {
  mpz_class den = value.get_den();
  unsigned long twos = mpz_remove(den.get_mpz_t(), den.get_mpz_t(),
                                  mpz_class(2).get_mpz_t());
  unsigned long fives = mpz_remove(den.get_mpz_t(), den.get_mpz_t(),
                                   mpz_class(5).get_mpz_t());
  if (den != 1) return FormatFraction(value);

  unsigned long places = std::max(twos, fives);
  if (places == 0) return value.get_num().get_str();

  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
  mpz_class scaled = value.get_num() * scale / value.get_den();
  bool negative = scaled < 0;
  std::string digits = mpz_class(abs(scaled)).get_str();
  if (digits.size() <= places) {
    digits.insert(0, places + 1 - digits.size(), '0');
  }
  digits.insert(digits.size() - places, ".");
  return negative ? "-" + digits : digits;
}

double ToDouble(const Rational& value) { return value.get_d(); }

double Log(const Rational& value) {
  // log(num) - log(den) with each operand scaled into double range.
  auto log_z = [](const mpz_class& z) {
    long exp = 0;
    double mantissa = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log(mantissa) + static_cast<double>(exp) * std::log(2.0);
  };
  return log_z(value.get_num()) - log_z(value.get_den());
}

Rational RoundToStep(const Rational& value, const Rational& step) {
  Rational scaled = value / step;
  Rational magnitude = abs(scaled) + Rational(1, 2);
  mpz_class floored;
  mpz_fdiv_q(floored.get_mpz_t(), magnitude.get_num_mpz_t(),
             magnitude.get_den_mpz_t());
  if (scaled < 0) floored = -floored;
  return Rational(floored) * step;
}

Rational Pow(const Rational& base, unsigned long exponent) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
  out.canonicalize();
  return out;
}

}  // namespace fldp
