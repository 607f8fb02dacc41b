#include "vague/rng.hpp"

#include <cmath>

namespace vague {

int Rng::poisson(double lambda) {
  if (!(lambda >= 0)) throw SchemaError("Poisson mean must be >= 0");
  if (lambda == 0) return 0;
  if (lambda > 1e6) throw SizeCapError("Poisson mean too large for inversion");
  // split large means so the inversion never underflows
  if (lambda > 500.0) return poisson(lambda / 2) + poisson(lambda / 2);
  double u = uniform01();
  int k = 0;
  double p = std::exp(-lambda);
  double cum = p;
  while (u > cum) {
    ++k;
    p *= lambda / k;
    cum += p;
    if (k > 10000000) break;
  }
  return k;
}

int Rng::binomial(int n, double p) {
  if (n < 0 || p < 0 || p > 1) throw SchemaError("bad Binomial parameters");
  if (n == 0 || p == 0) return 0;
  if (p == 1) return n;
  double u = uniform01();
  double q = std::pow(1.0 - p, n);
  if (q == 0) {
    // extremely unlikely in our regimes; fall back to counting draws
    int k = 0;
    for (int i = 0; i < n; ++i)
      if (uniform01() < p) ++k;
    return k;
  }
  double cum = q;
  int k = 0;
  double ratio = p / (1.0 - p);
  while (u > cum && k < n) {
    ++k;
    q *= ratio * double(n - k + 1) / double(k);
    cum += q;
  }
  return k;
}

}  // namespace vague
