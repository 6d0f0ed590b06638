// Copyright 2026 The rcmlab authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace rcmlab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline BigInt big_binomial(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt result = 1;
  for (long long i = 1; i <= k; ++i) {
    result *= (n - k + i);
    result /= i;  // exact at every step: result is C(n-k+i, i)
  }
  return result;
}

inline BigInt big_pow(BigInt base, unsigned long long exp) {
  BigInt result = 1;
  while (exp > 0) {
    if (exp & 1ULL) result *= base;
    base *= base;
    exp >>= 1;
  }
  return result;
}

inline BigRational rational_pow(const BigRational& base, unsigned long long exp) {
  return BigRational(big_pow(boost::multiprecision::numerator(base), exp),
                     big_pow(boost::multiprecision::denominator(base), exp));
}

// An unreduced count/total pair. Keeping the raw enumeration counts makes
// reports like "21/27" readable next to the reduced rational value.
struct ExactFraction {
  BigInt numerator = 0;
  BigInt denominator = 1;

  BigRational value() const {
    if (denominator == 0) throw std::domain_error("ExactFraction: zero denominator");
    return BigRational(numerator, denominator);
  }
  std::string str() const { return numerator.str() + "/" + denominator.str(); }
  bool operator==(const BigRational& rhs) const { return value() == rhs; }
};

inline double to_double(const BigRational& q) {
  return q.convert_to<double>();
}

}  // namespace rcmlab
