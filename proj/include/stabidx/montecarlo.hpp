#pragma once

// Sharded, deterministic Monte Carlo estimation of the index distribution.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "stabidx/models.hpp"
#include "stabidx/probability.hpp"
#include "stabidx/random.hpp"

namespace stabidx {

inline constexpr double kMaxIndeterminateFraction = 1e-3;

struct EstimationConfig {
  ModelFamily family = ModelFamily::continuous_system(1);
  IndexMethod method = IndexMethod::automatic;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  std::uint32_t shards = 16;
  double tol = kDefaultTol;
  /// Threads used to execute shards; 0 means hardware concurrency. Has no
  /// effect on the result.
  unsigned workers = 0;

  void validate() const {
    if (samples < 1) throw std::invalid_argument("EstimationConfig: samples must be >= 1");
    if (shards < 1) throw std::invalid_argument("EstimationConfig: shards must be >= 1");
    if (samples < shards) throw std::invalid_argument("EstimationConfig: samples must be >= shards");
    if (!(tol > 0.0)) throw std::invalid_argument("EstimationConfig: tol must be positive");
  }
};

struct IndexHistogram {
  ModelFamily family = ModelFamily::continuous_system(1);
  std::vector<std::uint64_t> counts;  // length n+1
  std::uint64_t indeterminate = 0;
  std::uint64_t total = 0;

  static IndexHistogram empty(const ModelFamily& f) {
    return {f, std::vector<std::uint64_t>(static_cast<std::size_t>(f.n() + 1), 0), 0, 0};
  }

  int n() const { return family.n(); }
  std::uint64_t determinate() const { return total - indeterminate; }
  double indeterminate_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(indeterminate) / static_cast<double>(total);
  }

  void record(const RootCount& rc) {
    ++total;
    if (rc.determinate())
      ++counts[static_cast<std::size_t>(rc.value())];
    else
      ++indeterminate;
  }

  friend bool operator==(const IndexHistogram&, const IndexHistogram&) = default;
};

/// Componentwise sum. Associative and commutative.
inline IndexHistogram merge(const IndexHistogram& a, const IndexHistogram& b) {
  if (!(a.family == b.family) || a.counts.size() != b.counts.size())
    throw std::invalid_argument("merge: histograms describe different families or dimensions");
  IndexHistogram out = a;
  for (std::size_t k = 0; k < out.counts.size(); ++k) out.counts[k] += b.counts[k];
  out.indeterminate += b.indeterminate;
  out.total += b.total;
  return out;
}

/// Raised when too many samples could not be certified; usually a tolerance
/// misconfiguration. Carries the full histogram.
class EstimationAborted : public std::runtime_error {
 public:
  explicit EstimationAborted(IndexHistogram h)
      : std::runtime_error("estimation aborted: indeterminate fraction " +
                           std::to_string(h.indeterminate_fraction()) + " exceeds limit"),
        histogram_(std::move(h)) {}
  const IndexHistogram& histogram() const { return histogram_; }

 private:
  IndexHistogram histogram_;
};

/// Samples assigned to shard `shard` out of `shards`.
inline std::uint64_t shard_size(std::uint64_t samples, std::uint32_t shards, std::uint32_t shard) {
  return samples / shards + (shard < samples % shards ? 1 : 0);
}

/// One shard: its own substream, its own histogram.
inline IndexHistogram run_shard(const EstimationConfig& cfg, std::uint32_t shard) {
  NormalStream<> normal(substream(cfg.seed, shard));
  IndexHistogram h = IndexHistogram::empty(cfg.family);
  const std::uint64_t count = shard_size(cfg.samples, cfg.shards, shard);
  for (std::uint64_t i = 0; i < count; ++i) h.record(sample_index(cfg.family, cfg.method, normal, cfg.tol).index);
  return h;
}

/// Histogram without the indeterminate-fraction check.
inline IndexHistogram run_estimation_unchecked(const EstimationConfig& cfg) {
  cfg.validate();
  unsigned workers = cfg.workers != 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, cfg.shards);

  std::vector<IndexHistogram> parts(cfg.shards, IndexHistogram::empty(cfg.family));
  std::atomic<std::uint32_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::uint32_t s = next++; s < cfg.shards; s = next++) {
      try {
        parts[s] = run_shard(cfg, s);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  // Reduce in shard order.
  IndexHistogram total = IndexHistogram::empty(cfg.family);
  for (const auto& p : parts) total = merge(total, p);
  return total;
}

/// Draws exactly cfg.samples samples split over cfg.shards substreams.
/// Throws EstimationAborted if more than 1e-3 of them are indeterminate.
inline IndexHistogram run_estimation(const EstimationConfig& cfg) {
  IndexHistogram h = run_estimation_unchecked(cfg);
  if (h.indeterminate_fraction() > kMaxIndeterminateFraction) throw EstimationAborted(std::move(h));
  return h;
}

/// Relative frequencies over determinate samples with binomial standard errors.
inline ProbabilityVector frequencies(const IndexHistogram& h) {
  const std::uint64_t d = h.determinate();
  if (d == 0) throw std::domain_error("frequencies: histogram has no determinate samples");
  ProbabilityVector p;
  p.source = ProbabilitySource::raw;
  p.samples = d;
  p.values.resize(h.counts.size());
  p.std_error.resize(h.counts.size());
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const double v = static_cast<double>(h.counts[k]) / static_cast<double>(d);
    p.values[k] = v;
    p.std_error[k] = std::sqrt(v * (1.0 - v) / static_cast<double>(d));
  }
  return p;
}

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares line through (ln x, ln y); points with y <= 0 are skipped.
/// Absent when fewer than two usable points remain.
inline std::optional<LogLogFit> fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  const auto m = static_cast<double>(lx.size());
  if (lx.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

struct ConvergenceRow {
  std::uint64_t samples = 0;
  double estimate = 0.0;   // mean over replicates
  double abs_error = 0.0;  // mean over replicates
};

struct ConvergenceTable {
  ModelFamily family = ModelFamily::continuous_system(1);
  int index = 0;
  double exact = 0.0;
  int replicates = 1;
  std::vector<ConvergenceRow> rows;
  std::optional<LogLogFit> fit;  // error vs M
};

/// Seed of run `i` in a convergence study. Replicate r of grid point j is run
/// r * grid.size() + j, so a single-replicate study uses runs 0..grid.size()-1.
inline std::uint64_t grid_seed(std::uint64_t seed, std::size_t i) {
  std::uint64_t s = seed ^ (0xa0761d6478bd642fULL * (static_cast<std::uint64_t>(i) + 1));
  return splitmix64(s);
}

/// Independent estimation at each M of the grid, the absolute error of p~_k
/// against `exact`, and the log-log fit of error against M. With
/// replicates > 1 each row averages that many independent runs.
inline ConvergenceTable convergence_study(const ModelFamily& family, int k, double exact,
                                          const std::vector<std::uint64_t>& grid, std::uint64_t seed,
                                          std::uint32_t shards = 1, double tol = kDefaultTol, int replicates = 1) {
  if (k < 0 || k > family.n()) throw std::invalid_argument("convergence_study: index out of range");
  if (replicates < 1) throw std::invalid_argument("convergence_study: replicates must be >= 1");
  ConvergenceTable t{family, k, exact, replicates, {}, std::nullopt};
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ConvergenceRow row{grid[i], 0.0, 0.0};
    for (int r = 0; r < replicates; ++r) {
      EstimationConfig cfg;
      cfg.family = family;
      cfg.samples = grid[i];
      cfg.seed = grid_seed(seed, static_cast<std::size_t>(r) * grid.size() + i);
      cfg.shards = static_cast<std::uint32_t>(std::min<std::uint64_t>(shards, grid[i]));
      cfg.tol = tol;
      const double est = frequencies(run_estimation(cfg)).values[static_cast<std::size_t>(k)];
      row.estimate += est / replicates;
      row.abs_error += std::abs(est - exact) / replicates;
    }
    t.rows.push_back(row);
    xs.push_back(static_cast<double>(grid[i]));
    ys.push_back(row.abs_error);
  }
  t.fit = fit_log_log(xs, ys);
  return t;
}

}  // namespace stabidx
