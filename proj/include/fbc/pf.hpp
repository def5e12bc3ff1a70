#pragma once

// Certified Perron-Frobenius eigenvalue bounds for nonnegative integer
// matrices via exact rational Collatz-Wielandt quotients. Power iteration
// runs on M + I (primitive whenever M is irreducible), so the quotient
// interval converges even for periodic matrices; the shift is subtracted
// back out exactly.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fbc {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

using IntMatrix = std::vector<std::vector<std::int64_t>>;

inline bool is_zero_matrix(const IntMatrix& m) {
  for (const auto& row : m)
    for (auto v : row)
      if (v != 0) return false;
  return true;
}

// Irreducibility = strong connectivity of the digraph with an arc j -> i
// whenever m[i][j] > 0. A 1x1 zero matrix is not irreducible.
inline bool is_irreducible(const IntMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return false;
  if (n == 1) return m[0][0] > 0;
  auto reach_all = [&](std::size_t s, bool transpose) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w = 0; w < n; ++w) {
        std::int64_t entry = transpose ? m[v][w] : m[w][v];
        if (entry > 0 && !seen[w]) {
          seen[w] = true;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n;
  };
  return reach_all(0, false) && reach_all(0, true);
}

// An irreducible nonnegative integer matrix has PF value exactly 1 iff it is
// the permutation matrix of a single cycle.
inline bool is_cycle_permutation(const IntMatrix& m) {
  const std::size_t n = m.size();
  for (std::size_t j = 0; j < n; ++j) {
    int nonzero = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (m[i][j] == 0) continue;
      if (m[i][j] != 1) return false;
      ++nonzero;
    }
    if (nonzero != 1) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    int nonzero = 0;
    for (std::size_t j = 0; j < n; ++j) nonzero += m[i][j] != 0;
    if (nonzero != 1) return false;
  }
  return is_irreducible(m);
}

struct PFCertificate {
  BigRat lower;                 // lower <= lambda <= upper, both exact
  BigRat upper;
  std::vector<BigInt> vector;   // positive witness with M v >= lower * v entrywise
  int iterations = 0;

  double midpoint() const {
    return static_cast<double>((lower + upper) / 2);
  }
  double width() const { return static_cast<double>(upper - lower); }
};

struct pf_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Certified bounds with upper - lower <= tolerance. Requires irreducible input.
inline PFCertificate pf_bounds(const IntMatrix& m, const BigRat& tolerance,
                               int max_iterations = 20000) {
  const std::size_t n = m.size();
  if (!is_irreducible(m)) throw pf_error("pf_bounds: matrix is not irreducible");

  if (is_cycle_permutation(m)) {
    PFCertificate c;
    c.lower = c.upper = 1;
    c.vector.assign(n, BigInt(1));
    return c;
  }

  std::vector<BigInt> v(n, BigInt(1));
  PFCertificate cert;
  for (int it = 0; it < max_iterations; ++it) {
    // w = (M + I) v
    std::vector<BigInt> w(n, BigInt(0));
    for (std::size_t i = 0; i < n; ++i) {
      BigInt acc = v[i];
      for (std::size_t j = 0; j < n; ++j)
        if (m[i][j] != 0) acc += BigInt(m[i][j]) * v[j];
      w[i] = acc;
    }
    BigRat lo, hi;
    for (std::size_t i = 0; i < n; ++i) {
      BigRat q(w[i], v[i]);
      if (i == 0 || q < lo) lo = q;
      if (i == 0 || q > hi) hi = q;
    }
    cert.lower = lo - 1;
    cert.upper = hi - 1;
    cert.vector = v;
    cert.iterations = it + 1;
    if (cert.upper - cert.lower <= tolerance && cert.lower > 1) return cert;
    // Keep the coordinates coprime so entry growth stays near lambda^k.
    BigInt g = w[0];
    for (std::size_t i = 1; i < n && g != 1; ++i) g = boost::multiprecision::gcd(g, w[i]);
    if (g > 1)
      for (auto& x : w) x /= g;
    v = std::move(w);
  }
  throw pf_error("pf_bounds: did not converge within iteration budget");
}

// Check M v >= q v entrywise, exactly.
inline bool satisfies_lower_certificate(const IntMatrix& m, const std::vector<BigInt>& v,
                                        const BigRat& q) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    BigInt acc = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (m[i][j] != 0) acc += BigInt(m[i][j]) * v[j];
    if (BigRat(acc, v[i]) < q) return false;
  }
  return true;
}

}  // namespace fbc
