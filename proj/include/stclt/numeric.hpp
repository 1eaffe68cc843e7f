#pragma once

#include <boost/multiprecision/float128.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <vector>

namespace stclt {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
// Variable-precision binary float; precision is set per object via the
// scoped helper below.
using HighReal = boost::multiprecision::mpfr_float;
using Quad = boost::multiprecision::float128;

// Sets the default MPFR precision (in bits) for the lifetime of the object.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(unsigned bits);
  ~ScopedPrecision();
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  unsigned saved_digits10_;
};

unsigned bits_to_digits10(unsigned bits);

// Primes p <= n in ascending order.
std::vector<int> primes_up_to(long n);
long prime_pi(double x);
bool is_prime(long n);

// Positive divisors of n in ascending order.
std::vector<long> divisors(long n);
long isqrt(long n);
bool is_square(long n);

BigInt ipow(const BigInt& base, unsigned long exponent);
BigInt ipow(long base, unsigned long exponent);

}  // namespace stclt
