#pragma once

// Root counting by region: Routh-Hurwitz for the open left half-plane, the
// Moebius-transformed polynomial for the open unit disk, and a direct
// eigenvalue count used both as an oracle and as the fast path for n >= 5.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "stabidx/polynomial.hpp"

namespace stabidx {

/// Thrown when the QR eigenvalue iteration fails. Distinct from an
/// indeterminate count: it signals a numerical failure, not a boundary case.
class EigenConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of roots with negative real part, via the Routh array.
///
/// Entries are compared against tol * max|coeff|. A row that vanishes
/// entirely signals roots symmetric about the origin and is replaced by the
/// derivative of the auxiliary polynomial above it; if any of those roots lie
/// on the imaginary axis the result is Indeterminate(boundary-root). An
/// isolated zero pivot yields Indeterminate(zero-pivot); no epsilon
/// perturbation is attempted.
inline RootCount routh_hurwitz_count(const Polynomial& p, double tol = kDefaultTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("routh_hurwitz_count: tol must be positive");
  const double scale = p.max_abs_coeff();
  if (scale == 0.0 || std::abs(p.leading()) <= tol * scale)
    return RootCount::indeterminate(Indeterminacy::zero_leading_coefficient);

  const int n = p.degree();
  if (n == 0) return RootCount::count(0);

  // Work on coefficients normalised to max magnitude 1 so the threshold is tol.
  const std::size_t width = static_cast<std::size_t>(n / 2 + 1);
  std::vector<double> upper(width + 1, 0.0), lower(width + 1, 0.0), next(width + 1, 0.0);
  for (int j = n, i = 0; j >= 0; j -= 2, ++i) upper[i] = p[j] / scale;
  for (int j = n - 1, i = 0; j >= 0; j -= 2, ++i) lower[i] = p[j] / scale;

  int sign_changes = 0;
  int aux_degree = -1;   // degree of the auxiliary polynomial, if any
  int aux_changes = 0;   // sign changes before the auxiliary row
  double prev_pivot = upper[0];
  for (int row = 1; row <= n; ++row) {
    bool row_vanishes = true;
    for (std::size_t j = 0; j < width; ++j)
      if (std::abs(lower[j]) > tol) row_vanishes = false;
    if (row_vanishes) {
      if (aux_degree >= 0) return RootCount::indeterminate(Indeterminacy::boundary_root);
      // upper holds A(s) = sum upper[j] s^(d - 2j); use A'(s) instead.
      aux_degree = n - row + 1;
      aux_changes = sign_changes;
      for (std::size_t j = 0; j < width; ++j) {
        const int power = aux_degree - 2 * static_cast<int>(j);
        lower[j] = power > 0 ? power * upper[j] : 0.0;
      }
    }
    const double pivot = lower[0];
    if (std::abs(pivot) <= tol) return RootCount::indeterminate(Indeterminacy::zero_pivot);
    if ((pivot > 0.0) != (prev_pivot > 0.0)) ++sign_changes;
    prev_pivot = pivot;
    if (row == n) break;
    for (std::size_t j = 0; j < width; ++j)
      next[j] = (pivot * upper[j + 1] - upper[0] * lower[j + 1]) / pivot;
    next[width] = 0.0;
    std::swap(upper, lower);
    std::swap(lower, next);
  }

  // The auxiliary roots split into s right, s left and the rest on the axis.
  if (aux_degree >= 0 && aux_degree - 2 * (sign_changes - aux_changes) > 0)
    return RootCount::indeterminate(Indeterminacy::boundary_root);
  return RootCount::count(n - sign_changes);
}

namespace detail {

inline std::vector<std::vector<std::int64_t>> binomial_table(int n) {
  std::vector<std::vector<std::int64_t>> c(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    c[i].assign(static_cast<std::size_t>(i + 1), 1);
    for (int k = 1; k < i; ++k) c[i][k] = c[i - 1][k - 1] + c[i - 1][k];
  }
  return c;
}

/// Sum_j p_j (z+1)^j (z-1)^(n-j) with all n+1 coefficients kept.
inline std::vector<double> mobius_coefficients(const Polynomial& p) {
  const int n = p.degree();
  if (n > 64) throw std::invalid_argument("mobius_star: degree above 64 overflows the binomial table");
  const auto binom = binomial_table(n);
  std::vector<double> out(static_cast<std::size_t>(n + 1), 0.0);
  for (int j = 0; j <= n; ++j) {
    const double cj = p[j];
    if (cj == 0.0) continue;
    for (int a = 0; a <= j; ++a) {
      for (int b = 0; b <= n - j; ++b) {
        // (z-1)^(n-j) contributes (-1)^(n-j-b) to z^b.
        const std::int64_t w = binom[j][a] * binom[n - j][b];
        const double term = ((n - j - b) % 2 == 0) ? static_cast<double>(w) : -static_cast<double>(w);
        out[static_cast<std::size_t>(a + b)] += cj * term;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Q*(z) = sum_j q_j (z+1)^j (z-1)^(n-j).
///
/// |lambda0| < 1 is a root of p iff z0 = (lambda0+1)/(lambda0-1) is a root of
/// Q* with Re z0 < 0. The z^n coefficient equals p(1), so exact zero leading
/// terms are trimmed and the result has degree n iff p(1) != 0.
inline Polynomial mobius_star(const Polynomial& p) {
  std::vector<double> c = detail::mobius_coefficients(p);
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  return Polynomial(std::move(c));
}

/// Number of roots with modulus < 1: Routh-Hurwitz applied to Q*.
///
/// A (near-)vanishing z^n coefficient of Q* means p(1) ~ 0, i.e. a root on the
/// unit circle, and is reported as Indeterminate(boundary-root).
inline RootCount jury_count(const Polynomial& p, double tol = kDefaultTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("jury_count: tol must be positive");
  if (!p.admissible(tol)) return RootCount::indeterminate(Indeterminacy::zero_leading_coefficient);
  const Polynomial star(detail::mobius_coefficients(p));
  const double scale = star.max_abs_coeff();
  if (scale == 0.0 || std::abs(star.leading()) <= tol * scale)
    return RootCount::indeterminate(Indeterminacy::boundary_root);
  return routh_hurwitz_count(star, tol);
}

/// n x n companion matrix with ones on the superdiagonal and last row
/// -p_0/p_n, ..., -p_{n-1}/p_n. Its characteristic polynomial is p / p_n.
inline Eigen::MatrixXd companion_matrix(const Polynomial& p, double tol = kDefaultTol) {
  if (!p.admissible(tol)) throw std::invalid_argument("companion_matrix: zero leading coefficient");
  const int n = p.degree();
  if (n < 1) throw std::invalid_argument("companion_matrix: degree must be at least 1");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) m(n - 1, j) = -p[j] / p.leading();
  return m;
}

struct Region {
  enum class Kind { left_half_plane, disk };
  Kind kind = Kind::left_half_plane;
  double radius = 1.0;

  static Region left_half_plane() { return {Kind::left_half_plane, 0.0}; }
  static Region disk(double radius) { return {Kind::disk, radius}; }
};

/// Eigenvalues of a real square matrix (Hessenberg reduction + shifted QR).
inline Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw EigenConvergenceError("eigenvalue iteration did not converge");
  return solver.eigenvalues();
}

/// Counts eigenvalues strictly inside the region.
///
/// The boundary band is tol * scale wide, with scale = max(max|lambda|, radius).
/// Any eigenvalue inside the band makes the result Indeterminate(boundary-root).
inline RootCount eigen_region_count(const Eigen::VectorXcd& lambda, Region region, double tol = kDefaultTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("eigen_region_count: tol must be positive");
  if (region.kind == Region::Kind::disk && !(region.radius > 0.0))
    throw std::invalid_argument("eigen_region_count: disk radius must be positive");

  double scale = region.kind == Region::Kind::disk ? region.radius : 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) scale = std::max(scale, std::abs(lambda[i]));
  const double band = tol * scale;

  int inside = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double d = region.kind == Region::Kind::left_half_plane ? lambda[i].real()
                                                                  : std::abs(lambda[i]) - region.radius;
    if (std::abs(d) <= band) return RootCount::indeterminate(Indeterminacy::boundary_root);
    if (d < 0.0) ++inside;
  }
  return RootCount::count(inside);
}

inline RootCount eigen_region_count(const Eigen::MatrixXd& m, Region region, double tol = kDefaultTol) {
  return eigen_region_count(eigenvalues(m), region, tol);
}

}  // namespace stabidx
