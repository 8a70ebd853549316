#pragma once

// Least-squares projection of observed frequencies onto the affine constraint
// set, plus iterative zero-pinning of negative estimates.

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stabidx/constraints.hpp"
#include "stabidx/probability.hpp"

namespace stabidx {

class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-negativity repair did not converge, or pinning made the relations
/// inconsistent. Carries the last iterate.
class RepairFailure : public std::runtime_error {
 public:
  RepairFailure(const std::string& what, ProbabilityVector last)
      : std::runtime_error(what), last_(std::move(last)) {}
  const ProbabilityVector& last_iterate() const { return last_; }

 private:
  ProbabilityVector last_;
};

namespace detail {

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Covariance of the raw frequencies: multinomial when the sample count is
/// known, otherwise diagonal from the reported standard errors.
inline Eigen::MatrixXd raw_covariance(const ProbabilityVector& p) {
  const auto m = static_cast<Eigen::Index>(p.values.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
  if (p.samples > 0) {
    const Eigen::VectorXd v = to_eigen(p.values);
    cov = (Eigen::MatrixXd(v.asDiagonal()) - v * v.transpose()) / static_cast<double>(p.samples);
  } else if (p.std_error.size() == p.values.size()) {
    for (Eigen::Index i = 0; i < m; ++i) cov(i, i) = p.std_error[static_cast<std::size_t>(i)] * p.std_error[static_cast<std::size_t>(i)];
  }
  return cov;
}

}  // namespace detail

/// Solves the normal equations (D^T D) q = D^T (p~ - b) and returns D q + b.
inline ProbabilityVector least_squares_refine(const ConstraintSystem& cs, const ProbabilityVector& ptilde) {
  const int n = cs.n();
  if (ptilde.n() != n) throw std::invalid_argument("least_squares_refine: length mismatch");
  const Eigen::MatrixXd& d = cs.design;
  const Eigen::VectorXd rhs = detail::to_eigen(ptilde.values) - cs.offset;

  ProbabilityVector out;
  out.source = ProbabilitySource::refined;
  out.samples = ptilde.samples;

  if (d.cols() == 0) {
    out.values = detail::to_std(cs.offset);
    out.std_error.assign(static_cast<std::size_t>(n + 1), 0.0);
    return out;
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(d);
  if (lu.rank() < d.cols()) throw RankDeficientError("least_squares_refine: design is rank deficient");

  const Eigen::MatrixXd gram = d.transpose() * d;
  const Eigen::LLT<Eigen::MatrixXd> chol(gram);
  if (chol.info() != Eigen::Success) throw RankDeficientError("least_squares_refine: D^T D is not positive definite");
  const Eigen::VectorXd q = chol.solve(d.transpose() * rhs);
  const Eigen::VectorXd phat = d * q + cs.offset;
  out.values = detail::to_std(phat);

  // p^ - b = H (p~ - b) with H = D (D^T D)^-1 D^T.
  const Eigen::MatrixXd hat = d * chol.solve(d.transpose());
  const Eigen::MatrixXd cov = hat * detail::raw_covariance(ptilde) * hat.transpose();
  out.std_error.resize(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) out.std_error[static_cast<std::size_t>(i)] = std::sqrt(std::max(cov(i, i), 0.0));
  return out;
}

/// Restricts `cs` to the affine subset where p_j = 0 for every j in `zeros`.
///
/// The pinning equations are reduced by Gauss-Jordan elimination on the free
/// variables; each pivot removes one free variable (the highest-index one
/// among equal-magnitude candidates, so the lowest indices stay free).
/// Throws std::domain_error if the pinning equations conflict.
inline ConstraintSystem pin_to_zero(const ConstraintSystem& cs, const std::set<int>& zeros) {
  const int k = cs.free_count();
  const int m = static_cast<int>(zeros.size());
  Eigen::MatrixXd c(m, k);
  Eigen::VectorXd rhs(m);
  {
    int r = 0;
    for (int j : zeros) {
      c.row(r) = cs.design.row(j);
      rhs(r) = -cs.offset(j);
      ++r;
    }
  }

  const double eps = 1e-12;
  std::vector<int> pivot_col_of_row(static_cast<std::size_t>(m), -1);
  std::vector<bool> is_pivot(static_cast<std::size_t>(k), false);
  for (int r = 0; r < m; ++r) {
    int best = -1;
    for (int col = k - 1; col >= 0; --col) {
      if (is_pivot[static_cast<std::size_t>(col)]) continue;
      if (best < 0 || std::abs(c(r, col)) > std::abs(c(r, best)) + eps) best = col;
    }
    if (best < 0 || std::abs(c(r, best)) <= eps) {
      if (std::abs(rhs(r)) > eps) throw std::domain_error("pin_to_zero: pinned entries are inconsistent with the relations");
      continue;  // redundant (e.g. a mirrored row)
    }
    const double piv = c(r, best);
    c.row(r) /= piv;
    rhs(r) /= piv;
    for (int other = 0; other < m; ++other) {
      if (other == r || c(other, best) == 0.0) continue;
      const double f = c(other, best);
      c.row(other) -= f * c.row(r);
      rhs(other) -= f * rhs(r);
    }
    pivot_col_of_row[static_cast<std::size_t>(r)] = best;
    is_pivot[static_cast<std::size_t>(best)] = true;
  }

  // q = basis * r + shift over the remaining free columns.
  std::vector<int> keep;
  for (int col = 0; col < k; ++col)
    if (!is_pivot[static_cast<std::size_t>(col)]) keep.push_back(col);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(k, static_cast<Eigen::Index>(keep.size()));
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(k);
  for (std::size_t i = 0; i < keep.size(); ++i) basis(keep[i], static_cast<Eigen::Index>(i)) = 1.0;
  for (int r = 0; r < m; ++r) {
    const int p = pivot_col_of_row[static_cast<std::size_t>(r)];
    if (p < 0) continue;
    shift(p) = rhs(r);
    for (std::size_t i = 0; i < keep.size(); ++i) basis(p, static_cast<Eigen::Index>(i)) = -c(r, keep[i]);
  }

  ConstraintSystem out{cs.family, cs.design * basis, cs.design * shift + cs.offset, {}, cs.refinement_eligible};
  for (int col : keep) out.free.push_back(cs.free[static_cast<std::size_t>(col)]);
  for (int j : zeros) {
    out.design.row(j).setZero();
    out.offset(j) = 0.0;
  }
  return out;
}

struct RepairResult {
  ProbabilityVector estimate;
  std::set<int> pinned;  // indices forced to zero
  int rounds = 0;        // re-solves after the initial refinement
  ConstraintSystem system;
};

inline constexpr int kDefaultRepairRounds = 5;

/// Least-squares refinement; while negative entries remain, pins them (and
/// every row with the same affine form, i.e. its mirror) to exactly zero and
/// re-solves on the reduced system.
inline RepairResult nonneg_repair(const ConstraintSystem& cs, const ProbabilityVector& ptilde,
                                  int max_rounds = kDefaultRepairRounds) {
  if (max_rounds < 1) throw std::invalid_argument("nonneg_repair: max_rounds must be at least 1");
  RepairResult res{least_squares_refine(cs, ptilde), {}, 0, cs};

  auto negatives = [](const ProbabilityVector& p) {
    std::vector<int> out;
    for (std::size_t j = 0; j < p.values.size(); ++j)
      if (p.values[j] < 0.0) out.push_back(static_cast<int>(j));
    return out;
  };

  for (auto neg = negatives(res.estimate); !neg.empty(); neg = negatives(res.estimate)) {
    if (res.rounds == max_rounds)
      throw RepairFailure("nonneg_repair: negative entries remain after max_rounds", res.estimate);
    for (int j : neg) {
      res.pinned.insert(j);
      for (int other = 0; other <= cs.n(); ++other)
        if (other != j && cs.offset(other) == cs.offset(j) && cs.design.row(other) == cs.design.row(j))
          res.pinned.insert(other);
    }
    try {
      res.system = pin_to_zero(cs, res.pinned);
    } catch (const std::domain_error& e) {
      throw RepairFailure(e.what(), res.estimate);
    }
    res.estimate = least_squares_refine(res.system, ptilde);
    ++res.rounds;
  }
  return res;
}

}  // namespace stabidx
