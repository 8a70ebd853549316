#pragma once

// The four random model families and the stability index of one draw.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "stabidx/polynomial.hpp"
#include "stabidx/polyroot.hpp"

namespace stabidx {

/// Which random system a sample describes. All coefficients are i.i.d. N(0,1).
class ModelFamily {
 public:
  enum class Kind {
    continuous_system,    // x' = A x, A n x n
    continuous_equation,  // A_n x^(n) + ... + A_0 x = 0
    discrete_system,      // B x_{k+1} = A x_k
    discrete_equation,    // A_n x_{k+n} + ... + A_0 x_k = 0
  };

  ModelFamily(Kind kind, int n) : kind_(kind), n_(n) {
    if (n < 1) throw std::invalid_argument("ModelFamily: n must be at least 1");
  }

  static ModelFamily continuous_system(int n) { return {Kind::continuous_system, n}; }
  static ModelFamily continuous_equation(int n) { return {Kind::continuous_equation, n}; }
  static ModelFamily discrete_system(int n) { return {Kind::discrete_system, n}; }
  static ModelFamily discrete_equation(int n) { return {Kind::discrete_equation, n}; }

  Kind kind() const { return kind_; }
  int n() const { return n_; }

  /// Number of N(0,1) variates in one sample.
  int parameter_count() const {
    switch (kind_) {
      case Kind::continuous_system: return n_ * n_;
      case Kind::discrete_system: return n_ * n_ + 1;
      case Kind::continuous_equation:
      case Kind::discrete_equation: return n_ + 1;
    }
    return 0;
  }

  bool is_system() const { return kind_ == Kind::continuous_system || kind_ == Kind::discrete_system; }
  bool is_discrete() const { return kind_ == Kind::discrete_system || kind_ == Kind::discrete_equation; }

  friend bool operator==(const ModelFamily&, const ModelFamily&) = default;

 private:
  Kind kind_;
  int n_;
};

inline std::string_view to_string(ModelFamily::Kind k) {
  switch (k) {
    case ModelFamily::Kind::continuous_system: return "cont-sys";
    case ModelFamily::Kind::continuous_equation: return "cont-eq";
    case ModelFamily::Kind::discrete_system: return "disc-sys";
    case ModelFamily::Kind::discrete_equation: return "disc-eq";
  }
  return "unknown";
}

inline std::optional<ModelFamily::Kind> parse_family_kind(std::string_view s) {
  using K = ModelFamily::Kind;
  for (K k : {K::continuous_system, K::continuous_equation, K::discrete_system, K::discrete_equation})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

enum class IndexMethod { char_poly_routh_hurwitz, direct_eigen, automatic };

inline std::string_view to_string(IndexMethod m) {
  switch (m) {
    case IndexMethod::char_poly_routh_hurwitz: return "rh";
    case IndexMethod::direct_eigen: return "eigen";
    case IndexMethod::automatic: return "auto";
  }
  return "unknown";
}

inline std::optional<IndexMethod> parse_index_method(std::string_view s) {
  for (IndexMethod m : {IndexMethod::char_poly_routh_hurwitz, IndexMethod::direct_eigen, IndexMethod::automatic})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

/// Resolves `automatic`. Continuous systems switch from the characteristic
/// polynomial to direct eigenvalues at n >= 5; equations always use the
/// polynomial they already are; discrete systems always compare eigenvalue
/// moduli against |B|.
inline IndexMethod resolve_method(IndexMethod m, const ModelFamily& f) {
  if (m != IndexMethod::automatic) return m;
  switch (f.kind()) {
    case ModelFamily::Kind::continuous_system:
      return f.n() <= 4 ? IndexMethod::char_poly_routh_hurwitz : IndexMethod::direct_eigen;
    case ModelFamily::Kind::discrete_system: return IndexMethod::direct_eigen;
    default: return IndexMethod::char_poly_routh_hurwitz;
  }
}

/// det(lambda I - m) by the Faddeev-LeVerrier trace recurrence.
inline Polynomial char_poly(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) throw std::invalid_argument("char_poly: matrix must be square, n >= 1");
  const Eigen::Index n = m.rows();
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  c[static_cast<std::size_t>(n)] = 1.0;
  Eigen::MatrixXd aux = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    aux = m * aux;
    aux.diagonal().array() += c[static_cast<std::size_t>(n - k + 1)];
    c[static_cast<std::size_t>(n - k)] = -(m * aux).trace() / static_cast<double>(k);
  }
  return Polynomial(std::move(c));
}

struct SampleOutcome {
  RootCount index;
};

/// Stability index of one fully specified sample.
///
/// Parameter layout (length = family.parameter_count()):
///   continuous_system    A row-major
///   continuous_equation  A_n, ..., A_0
///   discrete_system      B, then A row-major
///   discrete_equation    A_n, ..., A_0
inline SampleOutcome index_of_parameters(const ModelFamily& family, IndexMethod method,
                                         std::span<const double> params, double tol = kDefaultTol) {
  if (static_cast<int>(params.size()) != family.parameter_count())
    throw std::invalid_argument("index_of_parameters: wrong parameter count");
  const int n = family.n();
  const IndexMethod how = resolve_method(method, family);

  auto matrix_from = [n](std::span<const double> flat) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = flat[static_cast<std::size_t>(i * n + j)];
    return a;
  };

  switch (family.kind()) {
    case ModelFamily::Kind::continuous_system: {
      const Eigen::MatrixXd a = matrix_from(params);
      if (how == IndexMethod::direct_eigen) return {eigen_region_count(a, Region::left_half_plane(), tol)};
      return {routh_hurwitz_count(char_poly(a), tol)};
    }
    case ModelFamily::Kind::continuous_equation: {
      const Polynomial q = Polynomial::from_descending(params);
      if (how == IndexMethod::direct_eigen) {
        if (!q.admissible(tol)) return {RootCount::indeterminate(Indeterminacy::zero_leading_coefficient)};
        return {eigen_region_count(companion_matrix(q, tol), Region::left_half_plane(), tol)};
      }
      return {routh_hurwitz_count(q, tol)};
    }
    case ModelFamily::Kind::discrete_system: {
      const double radius = std::abs(params[0]);
      const Eigen::MatrixXd a = matrix_from(params.subspan(1));
      if (how == IndexMethod::direct_eigen) {
        if (radius == 0.0) return {RootCount::indeterminate(Indeterminacy::zero_leading_coefficient)};
        return {eigen_region_count(a, Region::disk(radius), tol)};
      }
      // Roots of det(lambda I - A) inside |lambda| < |B|: substitute lambda = |B| mu.
      const Polynomial cp = char_poly(a);
      std::vector<double> scaled(cp.coeffs());
      double power = 1.0;
      for (double& c : scaled) {
        c *= power;
        power *= radius;
      }
      return {jury_count(Polynomial(std::move(scaled)), tol)};
    }
    case ModelFamily::Kind::discrete_equation: {
      const Polynomial q = Polynomial::from_descending(params);
      if (how == IndexMethod::direct_eigen) {
        if (!q.admissible(tol)) return {RootCount::indeterminate(Indeterminacy::zero_leading_coefficient)};
        return {eigen_region_count(companion_matrix(q, tol), Region::disk(1.0), tol)};
      }
      return {jury_count(q, tol)};
    }
  }
  throw std::logic_error("index_of_parameters: unknown family");
}

/// Draws exactly family.parameter_count() variates from `normal` and returns
/// the index. `normal` is any callable returning one N(0,1) variate.
template <class NormalSource>
SampleOutcome sample_index(const ModelFamily& family, IndexMethod method, NormalSource& normal,
                           double tol = kDefaultTol) {
  thread_local std::vector<double> params;
  params.resize(static_cast<std::size_t>(family.parameter_count()));
  for (double& v : params) v = normal();
  return index_of_parameters(family, method, params, tol);
}

}  // namespace stabidx
