#pragma once

// Affine relations among the index probabilities, p = design * q + offset,
// and the closed-form values that are known exactly.

#include <cmath>
#include <numbers>
#include <cstdio>
#include <algorithm>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stabidx/models.hpp"

namespace stabidx {

/// p = design * q + offset, where q holds the probabilities listed in `free`.
struct ConstraintSystem {
  ModelFamily family;
  Eigen::MatrixXd design;  // (n+1) x k
  Eigen::VectorXd offset;  // n+1
  std::vector<int> free;   // k indices into 0..n, ascending
  bool refinement_eligible = true;

  int n() const { return family.n(); }
  int free_count() const { return static_cast<int>(free.size()); }

  Eigen::VectorXd evaluate(const Eigen::VectorXd& q) const { return design * q + offset; }
};

/// (2/pi) arctan(sigma/rho): probability that U^2 > V^2 for independent
/// U ~ N(0, sigma^2), V ~ N(0, rho^2).
inline double half_plane_sign_prob(double sigma, double rho) {
  if (!(sigma > 0.0) || !(rho > 0.0))
    throw std::invalid_argument("half_plane_sign_prob: sigma and rho must be positive");
  return 2.0 / std::numbers::pi * std::atan(sigma / rho);
}

/// Closed form of int_0^inf exp(-alpha^2 x^2) erf(beta x) dx, alpha > 0.
inline double gaussian_erf_integral(double alpha, double beta) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gaussian_erf_integral: alpha must be positive");
  return std::atan(beta / alpha) / (alpha * std::sqrt(std::numbers::pi));
}

/// 2^-n: upper bound on the probability that every root of a random order-n
/// characteristic polynomial has negative real part.
inline double hurwitz_upper_bound(int n) {
  if (n < 1) throw std::invalid_argument("hurwitz_upper_bound: n must be at least 1");
  return std::ldexp(1.0, -n);
}

/// Probability mass on even indices implied by the family's parity relation.
/// 1/2 for continuous families and odd-order difference equations;
/// (2/pi) arctan(sqrt((m+1)/m)) for difference equations of order 2m.
inline double even_index_mass(const ModelFamily& f) {
  if (f.kind() == ModelFamily::Kind::discrete_equation && f.n() % 2 == 0) {
    const double m = f.n() / 2;
    return half_plane_sign_prob(std::sqrt(m + 1.0), std::sqrt(m));
  }
  return 0.5;
}

/// Builds the affine system from the symmetry p_k = p_{n-k}, total mass 1 and
/// the parity sums. Free variables are the lowest undetermined indices.
///
/// For discrete systems only total mass is known; the result parametrises
/// p_0..p_{n-1} freely with p_n = 1 - sum, and is marked refinement-ineligible.
inline ConstraintSystem build_constraints(const ModelFamily& family) {
  const int n = family.n();
  const auto rows = static_cast<Eigen::Index>(n + 1);

  if (family.kind() == ModelFamily::Kind::discrete_system) {
    ConstraintSystem cs{family, Eigen::MatrixXd::Zero(rows, n), Eigen::VectorXd::Zero(rows), {}, false};
    for (int k = 0; k < n; ++k) {
      cs.free.push_back(k);
      cs.design(k, k) = 1.0;
      cs.design(n, k) = -1.0;
    }
    cs.offset(n) = 1.0;
    return cs;
  }

  // Half-range indices 0..h carry everything; the rest mirror them.
  // `pinned` is the index solved from a linear relation, with `mass` the
  // right-hand side and `weight` its coefficient (2 for paired indices, 1 for
  // a self-mirrored middle index).
  struct Relation {
    int pinned;
    double weight;
    double mass;
    std::vector<int> others;  // each enters with coefficient 2
  };
  std::vector<Relation> relations;

  const double even_mass = even_index_mass(family);
  if (n % 2 == 1) {
    // 2 * sum_{k <= (n-1)/2} p_k = 1; parity follows from symmetry.
    const int h = (n - 1) / 2;
    Relation r{h, 2.0, 1.0, {}};
    for (int k = 0; k < h; ++k) r.others.push_back(k);
    relations.push_back(r);
  } else {
    const int m = n / 2;
    // Indices k < m with the same parity as m, and with the opposite parity.
    Relation same{m, 1.0, (m % 2 == 0) ? even_mass : 1.0 - even_mass, {}};
    for (int k = m % 2; k < m; k += 2) same.others.push_back(k);
    relations.push_back(same);
    // Opposite parity to m: the highest such index below m is m-1.
    Relation opposite{m - 1, 2.0, (m % 2 == 0) ? 1.0 - even_mass : even_mass, {}};
    for (int k = (m - 1) % 2; k < m - 1; k += 2) opposite.others.push_back(k);
    relations.push_back(opposite);
  }

  std::vector<bool> determined(static_cast<std::size_t>(n / 2 + 1), false);
  for (const auto& r : relations) determined[static_cast<std::size_t>(r.pinned)] = true;

  ConstraintSystem cs{family, {}, Eigen::VectorXd::Zero(rows), {}, true};
  for (int k = 0; k <= n / 2; ++k)
    if (!determined[static_cast<std::size_t>(k)]) cs.free.push_back(k);
  cs.design = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(cs.free.size()));

  auto column_of = [&cs](int index) {
    for (std::size_t c = 0; c < cs.free.size(); ++c)
      if (cs.free[c] == index) return static_cast<Eigen::Index>(c);
    throw std::logic_error("build_constraints: index is not free");
  };

  // Half-range rows.
  for (int c = 0; c < cs.free_count(); ++c) cs.design(cs.free[static_cast<std::size_t>(c)], c) = 1.0;
  for (const auto& r : relations) {
    cs.offset(r.pinned) = r.mass / r.weight;
    for (int k : r.others) cs.design(r.pinned, column_of(k)) = -2.0 / r.weight;
  }
  // Mirrors.
  for (int k = 0; k <= n / 2; ++k) {
    cs.design.row(n - k) = cs.design.row(k);
    cs.offset(n - k) = cs.offset(k);
  }
  return cs;
}

/// Analytically known probabilities; unknown entries are std::nullopt.
struct ExactProbabilities {
  ModelFamily family;
  std::vector<std::optional<double>> values;

  bool complete() const {
    for (const auto& v : values)
      if (!v) return false;
    return true;
  }
  bool any() const {
    for (const auto& v : values)
      if (v) return true;
    return false;
  }
};

inline ExactProbabilities exact_probabilities(const ModelFamily& family) {
  using K = ModelFamily::Kind;
  const int n = family.n();
  ExactProbabilities out{family, std::vector<std::optional<double>>(static_cast<std::size_t>(n + 1))};
  auto set_all = [&out](std::initializer_list<double> v) {
    std::size_t i = 0;
    for (double x : v) out.values[i++] = x;
  };
  const double pi = std::numbers::pi;

  switch (family.kind()) {
    case K::continuous_system:
    case K::continuous_equation:
      if (n == 1) set_all({0.5, 0.5});
      if (n == 2) set_all({0.25, 0.5, 0.25});
      if (n == 3 && family.kind() == K::continuous_equation) set_all({1.0 / 16, 7.0 / 16, 7.0 / 16, 1.0 / 16});
      break;
    case K::discrete_system:
      if (n == 1) set_all({0.5, 0.5});
      break;
    case K::discrete_equation:
      if (n == 1) set_all({0.5, 0.5});
      if (n == 2) {
        const double outer = std::atan(std::sqrt(2.0)) / pi;
        set_all({outer, 2.0 * std::atan(1.0 / std::sqrt(2.0)) / pi, outer});
      }
      if (n == 4) out.values[1] = out.values[3] = std::atan(std::sqrt(2.0 / 3.0)) / pi;
      break;
  }
  return out;
}

/// Largest |p_k - (design q + offset)_k| over rows whose value and whose free
/// dependencies are all known. Returns 0 when nothing can be checked.
inline double catalog_residual(const ConstraintSystem& cs, const ExactProbabilities& exact) {
  const int k = cs.free_count();
  Eigen::VectorXd q = Eigen::VectorXd::Zero(k);
  std::vector<bool> known(static_cast<std::size_t>(k), false);
  for (int c = 0; c < k; ++c) {
    const auto& v = exact.values[static_cast<std::size_t>(cs.free[static_cast<std::size_t>(c)])];
    if (v) {
      q(c) = *v;
      known[static_cast<std::size_t>(c)] = true;
    }
  }
  double worst = 0.0;
  for (int row = 0; row <= cs.n(); ++row) {
    const auto& v = exact.values[static_cast<std::size_t>(row)];
    if (!v) continue;
    bool checkable = true;
    for (int c = 0; c < k; ++c)
      if (cs.design(row, c) != 0.0 && !known[static_cast<std::size_t>(c)]) checkable = false;
    if (!checkable) continue;
    worst = std::max(worst, std::abs(*v - (cs.design.row(row).dot(q) + cs.offset(row))));
  }
  return worst;
}

/// Human-readable right-hand side for row `index`, e.g. "1/2 - p0 - p1".
inline std::string relation_text(const ConstraintSystem& cs, int index) {
  for (int f : cs.free)
    if (f == index) return "p" + std::to_string(index);

  auto number = [](double v) {
    for (int den : {1, 2, 4, 8, 16}) {
      const double num = v * den;
      if (std::abs(num - std::round(num)) < 1e-12) {
        const long long in = std::llround(num);
        return den == 1 ? std::to_string(in) : std::to_string(in) + "/" + std::to_string(den);
      }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };

  std::string s;
  const double b = cs.offset(index);
  if (b != 0.0) s = number(b);
  for (int c = 0; c < cs.free_count(); ++c) {
    const double w = cs.design(index, c);
    if (w == 0.0) continue;
    const std::string var = "p" + std::to_string(cs.free[static_cast<std::size_t>(c)]);
    const std::string mag = std::abs(w) == 1.0 ? var : number(std::abs(w)) + var;
    if (s.empty())
      s = (w < 0 ? "-" : "") + mag;
    else
      s += (w < 0 ? " - " : " + ") + mag;
  }
  return "p" + std::to_string(index) + "=" + (s.empty() ? "0" : s);
}

}  // namespace stabidx
