#pragma once

#include <vector>

namespace stclt::detail {

// Unsorted eigenvalue rows; values[f][i] belongs to primes[i].
struct RawEigenTable {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> residuals;
};

RawEigenTable miller_eigen(int k, const std::vector<int>& primes, bool high_precision);
RawEigenTable trace_form_eigen(int k, const std::vector<int>& primes, bool high_precision);

}  // namespace stclt::detail
