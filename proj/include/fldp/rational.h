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

#ifndef FLDP_RATIONAL_H_
#define FLDP_RATIONAL_H_

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace fldp {

// Exact arbitrary-precision rational. All probabilities and model parameters
// are carried in this type; doubles appear only in reports.
using Rational = mpq_class;

// num / den in lowest terms. The two-argument mpq_class constructor does
// not reduce, and GMP arithmetic requires reduced operands.
Rational Ratio(const mpz_class& num, const mpz_class& den);
inline Rational Ratio(long num, long den) {
  return Ratio(mpz_class(num), mpz_class(den));
}

// Parses "3", "-1/4", "12.375" or "1e-3" into an exact rational.
absl::StatusOr<Rational> ParseRational(std::string_view text);

// Canonical text form. Terminating decimals are written as decimals
// ("-0.25"), everything else as "p/q". ParseRational inverts it exactly.
std::string FormatDecimal(const Rational& value);

// Always "p/q", including "1/1" for one.
std::string FormatFraction(const Rational& value);

double ToDouble(const Rational& value);

// Natural log of a positive rational, accurate for values far outside the
// double range.
double Log(const Rational& value);

// Round half away from zero to the nearest multiple of `step`.
Rational RoundToStep(const Rational& value, const Rational& step);

Rational Pow(const Rational& base, unsigned long exponent);

inline Rational Abs(const Rational& value) { return abs(value); }

}  // namespace fldp

#endif  // FLDP_RATIONAL_H_
