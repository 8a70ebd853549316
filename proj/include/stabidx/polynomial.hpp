#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace stabidx {

/// Relative tolerance used by every counter unless the caller overrides it.
inline constexpr double kDefaultTol = 1e-12;

/// Real polynomial stored in ascending order: coeffs()[j] multiplies lambda^j.
///
/// The degree is the index of the highest *stored* coefficient, so a stored
/// leading zero is kept. Counters reject such polynomials through the
/// admissibility check instead of silently lowering the degree.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}

  explicit Polynomial(std::vector<double> ascending) : coeffs_(std::move(ascending)) {
    if (coeffs_.empty()) throw std::invalid_argument("Polynomial: empty coefficient list");
  }

  Polynomial(std::initializer_list<double> ascending)
      : Polynomial(std::vector<double>(ascending)) {}

  /// Builds from coefficients listed highest power first (a_n, ..., a_0).
  static Polynomial from_descending(std::span<const double> descending) {
    return Polynomial(std::vector<double>(descending.rbegin(), descending.rend()));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double operator[](int j) const { return coeffs_[static_cast<std::size_t>(j)]; }
  double leading() const { return coeffs_.back(); }

  double max_abs_coeff() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  /// |leading| > tol * max|coeff|.
  bool admissible(double tol = kDefaultTol) const {
    const double scale = max_abs_coeff();
    return scale > 0.0 && std::abs(leading()) > tol * scale;
  }

  /// p(-lambda).
  Polynomial reflected() const {
    std::vector<double> c = coeffs_;
    for (std::size_t j = 1; j < c.size(); j += 2) c[j] = -c[j];
    return Polynomial(std::move(c));
  }

  /// lambda^n p(1/lambda): coefficients reversed.
  Polynomial reversed() const {
    return Polynomial(std::vector<double>(coeffs_.rbegin(), coeffs_.rend()));
  }

  Polynomial scaled(double c) const {
    std::vector<double> out = coeffs_;
    for (double& v : out) v *= c;
    return Polynomial(std::move(out));
  }

  double sum_of_coeffs() const {
    double s = 0.0;
    for (double c : coeffs_) s += c;
    return s;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<double> coeffs_;
};

enum class Indeterminacy { zero_pivot, boundary_root, zero_leading_coefficient };

inline std::string_view to_string(Indeterminacy r) {
  switch (r) {
    case Indeterminacy::zero_pivot: return "zero-pivot";
    case Indeterminacy::boundary_root: return "boundary-root";
    case Indeterminacy::zero_leading_coefficient: return "zero-leading-coefficient";
  }
  return "unknown";
}

/// Number of roots in a region, or the reason it could not be certified.
class RootCount {
 public:
  static RootCount count(int k) { return RootCount(k); }
  static RootCount indeterminate(Indeterminacy why) { return RootCount(why); }

  bool determinate() const { return std::holds_alternative<int>(v_); }
  explicit operator bool() const { return determinate(); }

  int value() const {
    if (!determinate()) throw std::logic_error("RootCount: value() on indeterminate result");
    return std::get<int>(v_);
  }

  Indeterminacy reason() const {
    if (determinate()) throw std::logic_error("RootCount: reason() on determinate result");
    return std::get<Indeterminacy>(v_);
  }

  friend bool operator==(const RootCount&, const RootCount&) = default;

 private:
  explicit RootCount(int k) : v_(k) {}
  explicit RootCount(Indeterminacy r) : v_(r) {}
  std::variant<int, Indeterminacy> v_;
};

}  // namespace stabidx
