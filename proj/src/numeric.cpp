#include "stclt/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace stclt {

unsigned bits_to_digits10(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

ScopedPrecision::ScopedPrecision(unsigned bits)
    : saved_digits10_(HighReal::default_precision()) {
  HighReal::default_precision(bits_to_digits10(bits));
}

ScopedPrecision::~ScopedPrecision() { HighReal::default_precision(saved_digits10_); }

std::vector<int> primes_up_to(long n) {
  std::vector<int> out;
  if (n < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
  for (long i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<int>(i));
    for (long j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

long prime_pi(double x) {
  if (x < 2) return 0;
  return static_cast<long>(primes_up_to(static_cast<long>(std::floor(x))).size());
}

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<long> divisors(long n) {
  std::vector<long> small, large;
  for (long d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    small.push_back(d);
    if (d * d != n) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

long isqrt(long n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  long r = static_cast<long>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_square(long n) {
  if (n < 0) return false;
  long r = isqrt(n);
  return r * r == n;
}

BigInt ipow(const BigInt& base, unsigned long exponent) {
  return boost::multiprecision::pow(base, static_cast<unsigned>(exponent));
}

BigInt ipow(long base, unsigned long exponent) { return ipow(BigInt(base), exponent); }

}  // namespace stclt
