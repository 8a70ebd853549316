#pragma once

// Reference implementations used only by tests. Deliberately naive and
// independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Poly = std::vector<double>;  // ascending coefficients

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline Poly poly_add(const Poly& a, const Poly& b, double sb = 1.0) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += sb * b[i];
  return r;
}

/// det(lambda I - A) by cofactor expansion along the first row, with
/// polynomial entries.
inline Poly laplace_char_poly(const std::vector<std::vector<Poly>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  Poly det{0.0};
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<Poly>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Poly> row;
      for (std::size_t cc = 0; cc < n; ++cc)
        if (cc != c) row.push_back(m[r][cc]);
      minor.push_back(row);
    }
    det = poly_add(det, poly_mul(m[0][c], laplace_char_poly(minor)), (c % 2 == 0) ? 1.0 : -1.0);
  }
  return det;
}

inline Poly laplace_char_poly(const Eigen::MatrixXd& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<std::vector<Poly>> m(n, std::vector<Poly>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = (i == j) ? Poly{-a(i, j), 1.0} : Poly{-a(i, j)};
  return laplace_char_poly(m);
}

/// Monic real polynomial with the given real roots and complex-pair roots
/// (each pair entry contributes z and conj(z)), scaled by `lead`.
inline Poly from_roots(const std::vector<double>& real, const std::vector<std::complex<double>>& pairs, double lead) {
  Poly p{lead};
  for (double r : real) p = poly_mul(p, {-r, 1.0});
  for (auto z : pairs) p = poly_mul(p, {std::norm(z), -2.0 * z.real(), 1.0});
  return p;
}

inline std::complex<double> eval(const Poly& p, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

/// Random roots kept at least `margin` away from the boundary of the region
/// (real part 0 for the half plane, modulus 1 for the disk), with the count
/// of roots inside.
struct RootedPoly {
  Poly coeffs;
  int inside = 0;
};

inline RootedPoly random_rooted(int degree, bool disk, std::mt19937_64& rng, double margin = 0.05) {
  std::uniform_real_distribution<double> mag(margin, 2.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.141592653589793);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> real;
  std::vector<std::complex<double>> pairs;
  int inside = 0;
  int left = degree;
  while (left > 0) {
    const bool pair = left >= 2 && coin(rng);
    const bool in = coin(rng);
    if (disk) {
      const double r = in ? 1.0 - mag(rng) / 2.0 * 0.9 : 1.0 + mag(rng) / 2.0;
      const double rr = std::max(r, 0.0);
      if (pair) {
        const double th = angle(rng) / 2.0;  // upper half plane
        pairs.push_back(std::polar(rr, std::clamp(th, 0.1, 3.04)));
      } else {
        real.push_back(coin(rng) ? rr : -rr);
      }
    } else {
      const double re = in ? -mag(rng) : mag(rng);
      if (pair)
        pairs.emplace_back(re, mag(rng));
      else
        real.push_back(re);
    }
    const int k = pair ? 2 : 1;
    if (in) inside += k;
    left -= k;
  }
  std::uniform_real_distribution<double> lead(0.5, 3.0);
  const double l = coin(rng) ? lead(rng) : -lead(rng);
  return {from_roots(real, pairs, l), inside};
}

/// Standard normal CDF.
inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Kolmogorov-Smirnov statistic of a sample against N(0,1).
inline double ks_statistic(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = phi(xs[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

/// Reference xoshiro256++ step, straight from the published algorithm.
inline std::uint64_t xoshiro_next(std::uint64_t s[4]) {
  auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

}  // namespace oracle
