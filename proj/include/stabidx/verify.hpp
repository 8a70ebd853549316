#pragma once

// Invariant suite: oracle equivalences, constraint closure, closed-form
// cross-checks and Monte Carlo sanity bounds. Each check reports pass/fail
// with a one-line detail.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <fmt/format.h>

#include "stabidx/constraints.hpp"
#include "stabidx/montecarlo.hpp"
#include "stabidx/polyroot.hpp"
#include "stabidx/random.hpp"

namespace stabidx {

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct OracleTally {
  std::uint64_t compared = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t skipped = 0;  // either side indeterminate
};

/// Random N(0,1) polynomials of degree 1..max_degree; `primary` and `oracle`
/// must agree whenever both return a count.
template <class Primary, class Oracle>
OracleTally compare_counters(int per_degree, int max_degree, std::uint64_t seed, Primary primary, Oracle oracle) {
  OracleTally t;
  NormalStream<> normal(Xoshiro256pp{seed});
  for (int deg = 1; deg <= max_degree; ++deg) {
    for (int i = 0; i < per_degree; ++i) {
      std::vector<double> c(static_cast<std::size_t>(deg + 1));
      for (double& v : c) v = normal();
      const Polynomial p(std::move(c));
      const RootCount a = primary(p);
      const RootCount b = oracle(p);
      if (!a || !b) {
        ++t.skipped;
        continue;
      }
      ++t.compared;
      if (a.value() != b.value()) ++t.mismatches;
    }
  }
  return t;
}

inline OracleTally half_plane_oracle_tally(int per_degree, std::uint64_t seed, double tol = kDefaultTol) {
  return compare_counters(
      per_degree, 6, seed, [tol](const Polynomial& p) { return routh_hurwitz_count(p, tol); },
      [tol](const Polynomial& p) {
        if (!p.admissible(tol)) return RootCount::indeterminate(Indeterminacy::zero_leading_coefficient);
        return eigen_region_count(companion_matrix(p, tol), Region::left_half_plane(), tol);
      });
}

inline OracleTally disk_oracle_tally(int per_degree, std::uint64_t seed, double tol = kDefaultTol) {
  return compare_counters(
      per_degree, 6, seed, [tol](const Polynomial& p) { return jury_count(p, tol); },
      [tol](const Polynomial& p) {
        if (!p.admissible(tol)) return RootCount::indeterminate(Indeterminacy::zero_leading_coefficient);
        return eigen_region_count(companion_matrix(p, tol), Region::disk(1.0), tol);
      });
}

inline PropertyResult tally_result(std::string name, const OracleTally& t) {
  return {std::move(name), t.mismatches == 0 && t.compared > 0,
          fmt::format("{} compared, {} mismatches, {} indeterminate", t.compared, t.mismatches, t.skipped)};
}

/// Structural check of every generated system for n = 1..n_max: the column
/// sums of the design vanish and the offsets sum to 1 (so sum p = 1 for all
/// q), symmetric rows match, and the even-index mass is the parity constant.
inline PropertyResult check_constraint_closure(int n_max = 10) {
  using K = ModelFamily::Kind;
  double worst = 0.0;
  for (K kind : {K::continuous_system, K::continuous_equation, K::discrete_system, K::discrete_equation}) {
    for (int n = 1; n <= n_max; ++n) {
      const ModelFamily f(kind, n);
      const ConstraintSystem cs = build_constraints(f);
      const Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(n + 1);
      if (cs.free_count() > 0) worst = std::max(worst, (ones * cs.design).cwiseAbs().maxCoeff());
      worst = std::max(worst, std::abs(ones.dot(cs.offset) - 1.0));
      if (kind == K::discrete_system) continue;
      for (int k = 0; k <= n; ++k) {
        if (cs.free_count() > 0) worst = std::max(worst, (cs.design.row(k) - cs.design.row(n - k)).cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(cs.offset(k) - cs.offset(n - k)));
      }
      Eigen::RowVectorXd even = Eigen::RowVectorXd::Zero(n + 1);
      for (int k = 0; k <= n; k += 2) even(k) = 1.0;
      if (cs.free_count() > 0) worst = std::max(worst, (even * cs.design).cwiseAbs().maxCoeff());
      worst = std::max(worst, std::abs(even.dot(cs.offset) - even_index_mass(f)));
    }
  }
  return {"constraint closure (n <= " + std::to_string(n_max) + ")", worst < 1e-12,
          fmt::format("max residual {:.3e}", worst)};
}

inline PropertyResult check_catalog_consistency(int n_max = 10) {
  using K = ModelFamily::Kind;
  double worst = 0.0;
  int checked = 0;
  bool in_range = true;
  for (K kind : {K::continuous_system, K::continuous_equation, K::discrete_system, K::discrete_equation}) {
    for (int n = 1; n <= n_max; ++n) {
      const ModelFamily f(kind, n);
      const ExactProbabilities ex = exact_probabilities(f);
      if (!ex.any()) continue;
      ++checked;
      for (const auto& v : ex.values)
        if (v && (*v < 0.0 || *v > 1.0)) in_range = false;
      worst = std::max(worst, catalog_residual(build_constraints(f), ex));
    }
  }
  return {"exact catalog consistency", in_range && worst < 1e-12,
          fmt::format("{} catalogued families, max residual {:.3e}", checked, worst)};
}

using ErfIntegralClosedForm = std::function<double(double alpha, double beta)>;

/// Quadrature of int_0^inf exp(-a^2 x^2) erf(b x) dx against the closed form.
inline PropertyResult check_erf_integral(const ErfIntegralClosedForm& closed_form = gaussian_erf_integral) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double worst = 0.0;
  for (double alpha : {1.0, 2.0}) {
    for (double beta : {-1.0, 1.0, 3.0}) {
      auto f = [alpha, beta](double x) { return std::exp(-alpha * alpha * x * x) * std::erf(beta * x); };
      const double numeric = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
      worst = std::max(worst, std::abs(numeric - closed_form(alpha, beta)));
    }
  }
  return {"erf-Gaussian integral closed form", worst < 1e-8, fmt::format("max |quadrature - closed form| {:.3e}", worst)};
}

/// Monte Carlo estimate of P(U>0, V>0, S>0, T>0, UT-SV>0) for i.i.d. N(0,1).
inline double positive_minor_probability_estimate(std::uint64_t samples, std::uint64_t seed) {
  NormalStream<> normal(substream(seed, 0));
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double u = normal(), v = normal(), s = normal(), t = normal();
    if (u > 0 && v > 0 && s > 0 && t > 0 && u * t - s * v > 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

inline PropertyResult check_positive_minor_probability(std::uint64_t samples, std::uint64_t seed) {
  constexpr double p = 1.0 / 32.0;
  const double est = positive_minor_probability_estimate(samples, seed);
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return {"P(U,V,S,T>0, UT-SV>0) = 1/32", std::abs(est - p) <= 4.0 * sigma,
          fmt::format("estimate {:.6f}, |diff| {:.2e}, 4 sigma {:.2e}", est, std::abs(est - p), 4.0 * sigma)};
}

/// E(X) = n/2 within 4 sqrt(n/M) for one family.
inline PropertyResult check_mean_index(const ModelFamily& f, std::uint64_t samples, std::uint64_t seed,
                                       std::uint32_t shards = 16, double tol = kDefaultTol) {
  EstimationConfig cfg;
  cfg.family = f;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.shards = shards;
  cfg.tol = tol;
  std::string name = fmt::format("E(X) = n/2 for {} n={}", to_string(f.kind()), f.n());
  double mean = 0.0;
  try {
    mean = frequencies(run_estimation(cfg)).mean_index();
  } catch (const EstimationAborted& e) {
    return {std::move(name), false, e.what()};
  }
  const double bound = 4.0 * std::sqrt(static_cast<double>(f.n()) / static_cast<double>(samples));
  return {std::move(name),
          std::abs(mean - f.n() / 2.0) <= bound,
          fmt::format("mean {:.5f}, |diff| {:.2e}, bound {:.2e}", mean, std::abs(mean - f.n() / 2.0), bound)};
}

/// Indeterminate fraction < 1e-3 for one family.
inline PropertyResult check_indeterminate_fraction(const ModelFamily& f, std::uint64_t samples, std::uint64_t seed,
                                                   double tol) {
  EstimationConfig cfg;
  cfg.family = f;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.shards = 4;
  cfg.tol = tol;
  const IndexHistogram h = run_estimation_unchecked(cfg);
  return {fmt::format("indeterminate fraction {} n={} (tol {:g})", to_string(f.kind()), f.n(), tol),
          h.indeterminate_fraction() < kMaxIndeterminateFraction,
          fmt::format("{} of {} indeterminate", h.indeterminate, h.total)};
}

inline PropertyResult check_determinism(const ModelFamily& f, std::uint64_t samples, std::uint64_t seed) {
  EstimationConfig cfg;
  cfg.family = f;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.shards = 8;
  cfg.workers = 1;
  const IndexHistogram a = run_estimation(cfg);
  cfg.workers = 4;
  const IndexHistogram b = run_estimation(cfg);
  return {fmt::format("determinism {} n={}", to_string(f.kind()), f.n()), a == b,
          a == b ? "identical histograms" : "histograms differ"};
}

struct VerifyOptions {
  std::uint64_t samples = 1'000'000;     // per Monte Carlo property
  std::uint64_t seed = kDefaultSeed;
  std::uint32_t shards = 16;
  double tol = kDefaultTol;
  int oracle_polys_per_degree = 10'000;
  std::uint64_t indeterminate_samples = 20'000;  // per (family, n)
  int indeterminate_n_max = 10;
  int mean_n_max = 6;
  std::uint64_t determinism_samples = 20'000;
  ErfIntegralClosedForm erf_closed_form = gaussian_erf_integral;
};

/// Runs the complete suite, calling `on_result` as each property finishes.
inline std::vector<PropertyResult> run_verification(const VerifyOptions& opt,
                                                    const std::function<void(const PropertyResult&)>& on_result = {}) {
  using K = ModelFamily::Kind;
  std::vector<PropertyResult> out;
  auto add = [&](PropertyResult r) {
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  };

  add(tally_result("Routh-Hurwitz vs eigenvalue count (half-plane)",
                   half_plane_oracle_tally(opt.oracle_polys_per_degree, opt.seed, opt.tol)));
  add(tally_result("Jury vs eigenvalue modulus count (unit disk)",
                   disk_oracle_tally(opt.oracle_polys_per_degree, opt.seed + 1, opt.tol)));
  add(check_constraint_closure());
  add(check_catalog_consistency());
  add(check_erf_integral(opt.erf_closed_form));
  add(check_positive_minor_probability(opt.samples, opt.seed));
  for (K kind : {K::continuous_system, K::continuous_equation, K::discrete_equation})
    for (int n = 1; n <= opt.mean_n_max; ++n) add(check_mean_index(ModelFamily(kind, n), opt.samples, opt.seed, opt.shards, opt.tol));
  for (K kind : {K::continuous_system, K::continuous_equation, K::discrete_system, K::discrete_equation})
    for (int n = 1; n <= opt.indeterminate_n_max; ++n)
      add(check_indeterminate_fraction(ModelFamily(kind, n), opt.indeterminate_samples, opt.seed, opt.tol));
  for (K kind : {K::continuous_system, K::continuous_equation, K::discrete_system, K::discrete_equation})
    add(check_determinism(ModelFamily(kind, 3), opt.determinism_samples, opt.seed));
  return out;
}

}  // namespace stabidx
