#pragma once

// JSON forms of histograms, probability vectors, constraint systems and
// estimation configs.

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "stabidx/constraints.hpp"
#include "stabidx/montecarlo.hpp"
#include "stabidx/probability.hpp"

namespace stabidx {

using json = nlohmann::json;

namespace detail {

inline ModelFamily family_from_json(const json& j) {
  const auto kind = parse_family_kind(j.at("family").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown family '" + j.at("family").get<std::string>() + "'");
  return ModelFamily(*kind, j.at("n").get<int>());
}

}  // namespace detail

/// {family, n, M, seed, counts[], indeterminate}
inline json histogram_to_json(const IndexHistogram& h, std::uint64_t seed) {
  return json{{"family", to_string(h.family.kind())},
              {"n", h.n()},
              {"M", h.total},
              {"seed", seed},
              {"counts", h.counts},
              {"indeterminate", h.indeterminate}};
}

struct HistogramRecord {
  IndexHistogram histogram;
  std::uint64_t seed = 0;
};

inline HistogramRecord histogram_from_json(const json& j) {
  HistogramRecord r{IndexHistogram::empty(detail::family_from_json(j)), j.at("seed").get<std::uint64_t>()};
  r.histogram.counts = j.at("counts").get<std::vector<std::uint64_t>>();
  r.histogram.indeterminate = j.at("indeterminate").get<std::uint64_t>();
  r.histogram.total = j.at("M").get<std::uint64_t>();
  if (static_cast<int>(r.histogram.counts.size()) != r.histogram.n() + 1)
    throw std::invalid_argument("histogram: counts length does not match n");
  std::uint64_t sum = r.histogram.indeterminate;
  for (auto c : r.histogram.counts) sum += c;
  if (sum != r.histogram.total) throw std::invalid_argument("histogram: counts do not add up to M");
  return r;
}

inline json probability_to_json(const ProbabilityVector& p) {
  return json{{"values", p.values}, {"stderr", p.std_error}, {"source", to_string(p.source)}, {"samples", p.samples}};
}

inline ProbabilityVector probability_from_json(const json& j) {
  ProbabilityVector p;
  p.values = j.at("values").get<std::vector<double>>();
  p.std_error = j.at("stderr").get<std::vector<double>>();
  if (p.std_error.size() != p.values.size()) throw std::invalid_argument("probability vector: stderr length mismatch");
  const auto src = j.at("source").get<std::string>();
  if (src == "raw")
    p.source = ProbabilitySource::raw;
  else if (src == "refined")
    p.source = ProbabilitySource::refined;
  else if (src == "exact")
    p.source = ProbabilitySource::exact;
  else
    throw std::invalid_argument("probability vector: unknown source '" + src + "'");
  p.samples = j.value("samples", std::uint64_t{0});
  return p;
}

/// {family, n, free[], design (row-major), offset[]}
inline json constraints_to_json(const ConstraintSystem& cs) {
  std::vector<double> design;
  design.reserve(static_cast<std::size_t>(cs.design.size()));
  for (Eigen::Index r = 0; r < cs.design.rows(); ++r)
    for (Eigen::Index c = 0; c < cs.design.cols(); ++c) design.push_back(cs.design(r, c));
  return json{{"family", to_string(cs.family.kind())},
              {"n", cs.n()},
              {"free", cs.free},
              {"design", design},
              {"offset", std::vector<double>(cs.offset.data(), cs.offset.data() + cs.offset.size())}};
}

inline ConstraintSystem constraints_from_json(const json& j) {
  ConstraintSystem cs{detail::family_from_json(j), {}, {}, j.at("free").get<std::vector<int>>(), true};
  cs.refinement_eligible = cs.family.kind() != ModelFamily::Kind::discrete_system;
  const auto rows = static_cast<Eigen::Index>(cs.n() + 1);
  const auto cols = static_cast<Eigen::Index>(cs.free.size());
  const auto design = j.at("design").get<std::vector<double>>();
  const auto offset = j.at("offset").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(design.size()) != rows * cols || static_cast<Eigen::Index>(offset.size()) != rows)
    throw std::invalid_argument("constraint system: shape mismatch");
  cs.design.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) cs.design(r, c) = design[static_cast<std::size_t>(r * cols + c)];
  cs.offset = Eigen::Map<const Eigen::VectorXd>(offset.data(), rows);
  return cs;
}

inline json config_to_json(const EstimationConfig& c) {
  return json{{"family", to_string(c.family.kind())}, {"n", c.family.n()}, {"method", to_string(c.method)},
              {"samples", c.samples}, {"seed", c.seed}, {"shards", c.shards}, {"tol", c.tol}};
}

inline EstimationConfig config_from_json(const json& j) {
  EstimationConfig c;
  c.family = detail::family_from_json(j);
  const auto m = parse_index_method(j.at("method").get<std::string>());
  if (!m) throw std::invalid_argument("unknown method");
  c.method = *m;
  c.samples = j.at("samples").get<std::uint64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.shards = j.at("shards").get<std::uint32_t>();
  c.tol = j.at("tol").get<double>();
  return c;
}

}  // namespace stabidx
