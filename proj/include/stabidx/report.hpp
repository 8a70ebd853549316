#pragma once

// Table, CSV and JSON emitters for estimates, convergence studies and the
// verification suite. Probabilities are printed with 5 decimals; JSON keeps
// full precision so it round-trips.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "stabidx/constraints.hpp"
#include "stabidx/montecarlo.hpp"
#include "stabidx/refine.hpp"
#include "stabidx/serialization.hpp"
#include "stabidx/verify.hpp"

namespace stabidx {

enum class OutputFormat { table, csv, json };

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
  if (s == "table") return OutputFormat::table;
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  return std::nullopt;
}

struct EstimateReport {
  EstimationConfig config;
  IndexHistogram histogram;
  ProbabilityVector observed;
  std::optional<ProbabilityVector> refined;  // absent for frequency-only families
  std::set<int> pinned;
  std::optional<std::string> repair_note;    // set when repair did not converge
  ExactProbabilities exact;
  ConstraintSystem constraints;
};

/// Estimation, frequencies and, for refinement-eligible families with free
/// variables, non-negativity-repaired least squares. Throws EstimationAborted.
inline EstimateReport make_estimate_report(const EstimationConfig& cfg) {
  EstimateReport r{cfg, run_estimation(cfg), {}, std::nullopt, {}, std::nullopt,
                   exact_probabilities(cfg.family), build_constraints(cfg.family)};
  r.observed = frequencies(r.histogram);
  if (r.constraints.refinement_eligible && r.constraints.free_count() > 0) {
    try {
      RepairResult rep = nonneg_repair(r.constraints, r.observed);
      r.refined = std::move(rep.estimate);
      r.pinned = std::move(rep.pinned);
    } catch (const RepairFailure& e) {
      r.refined = e.last_iterate();
      r.repair_note = e.what();
    }
  }
  return r;
}

namespace detail {

inline std::string prob(double v) { return fmt::format("{:.5f}", v); }

inline std::string exact_or_relation(const EstimateReport& r, int k) {
  const auto& v = r.exact.values[static_cast<std::size_t>(k)];
  if (v) return prob(*v);
  if (r.constraints.refinement_eligible) return relation_text(r.constraints, k);
  return "";
}

inline json optional_vector(const std::vector<std::optional<double>>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(x ? json(*x) : json(nullptr));
  return out;
}

}  // namespace detail

inline std::string render_estimate(const EstimateReport& r, OutputFormat fmt_kind) {
  const int n = r.config.family.n();
  const bool has_ls = r.refined.has_value();
  const bool has_exact = r.constraints.refinement_eligible || r.exact.any();

  if (fmt_kind == OutputFormat::json) {
    json j{{"config", config_to_json(r.config)},
           {"histogram", histogram_to_json(r.histogram, r.config.seed)},
           {"observed", probability_to_json(r.observed)},
           {"exact", detail::optional_vector(r.exact.values)}};
    if (has_ls) {
      j["refined"] = probability_to_json(*r.refined);
      j["pinned"] = std::vector<int>(r.pinned.begin(), r.pinned.end());
    }
    if (r.constraints.refinement_eligible) {
      std::vector<std::string> rel;
      for (int k = 0; k <= n; ++k) rel.push_back(relation_text(r.constraints, k));
      j["relations"] = rel;
    }
    if (r.repair_note) j["repair_note"] = *r.repair_note;
    return j.dump(2) + "\n";
  }

  std::string out;
  if (fmt_kind == OutputFormat::csv) {
    out += "index,observed,stderr";
    if (has_ls) out += ",least_squares";
    if (has_exact) out += ",exact_or_relation";
    out += "\n";
    for (int k = 0; k <= n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      out += fmt::format("{},{},{}", k, detail::prob(r.observed.values[i]), detail::prob(r.observed.std_error[i]));
      if (has_ls) out += "," + detail::prob(r.refined->values[i]);
      if (has_exact) out += "," + detail::exact_or_relation(r, k);
      out += "\n";
    }
    return out;
  }

  out += fmt::format("family {}  n={}  M={}  seed={}  shards={}  method={}\n", to_string(r.config.family.kind()), n,
                     r.histogram.total, r.config.seed, r.config.shards, to_string(r.config.method));
  out += fmt::format("indeterminate {} ({:.2e})\n\n", r.histogram.indeterminate, r.histogram.indeterminate_fraction());
  out += fmt::format("{:>5}  {:>10}  {:>9}", "k", "observed", "stderr");
  if (has_ls) out += fmt::format("  {:>13}", "least squares");
  if (has_exact) out += "  exact / relation";
  out += "\n";
  for (int k = 0; k <= n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out += fmt::format("{:>5}  {:>10}  {:>9}", k, detail::prob(r.observed.values[i]), detail::prob(r.observed.std_error[i]));
    if (has_ls) out += fmt::format("  {:>13}", detail::prob(r.refined->values[i]));
    if (has_exact) out += "  " + detail::exact_or_relation(r, k);
    out += "\n";
  }
  if (!r.pinned.empty()) {
    out += "\npinned to zero:";
    for (int j : r.pinned) out += fmt::format(" p{}", j);
    out += "\n";
  }
  if (r.repair_note) out += "\nwarning: " + *r.repair_note + "\n";
  return out;
}

inline std::string render_convergence(const ConvergenceTable& t, std::uint64_t seed, OutputFormat fmt_kind) {
  if (fmt_kind == OutputFormat::json) {
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back({{"M", r.samples}, {"estimate", r.estimate}, {"abs_error", r.abs_error}});
    json j{{"family", to_string(t.family.kind())}, {"n", t.family.n()}, {"k", t.index},
           {"exact", t.exact}, {"seed", seed}, {"replicates", t.replicates}, {"rows", rows}};
    if (t.fit)
      j["fit"] = {{"slope", t.fit->slope}, {"intercept", t.fit->intercept}, {"r_squared", t.fit->r_squared}};
    else
      j["fit"] = nullptr;
    return j.dump(2) + "\n";
  }

  std::string out;
  if (fmt_kind == OutputFormat::csv) {
    out += "M,estimate,abs_error\n";
    for (const auto& r : t.rows) out += fmt::format("{},{},{:.5e}\n", r.samples, detail::prob(r.estimate), r.abs_error);
    if (t.fit) out += fmt::format("# slope,{:.3f},intercept,{:.3f},r_squared,{:.3f}\n", t.fit->slope, t.fit->intercept, t.fit->r_squared);
    return out;
  }

  out += fmt::format("family {}  n={}  k={}  exact={}  seed={}  replicates={}\n\n", to_string(t.family.kind()), t.family.n(),
                     t.index, detail::prob(t.exact), seed, t.replicates);
  out += fmt::format("{:>12}  {:>10}  {:>12}\n", "M", "p~", "|error|");
  for (const auto& r : t.rows) out += fmt::format("{:>12}  {:>10}  {:>12.5e}\n", r.samples, detail::prob(r.estimate), r.abs_error);
  if (t.fit)
    out += fmt::format("\nlog-log fit: slope {:.3f}  intercept {:.3f}  R^2 {:.3f}\n", t.fit->slope, t.fit->intercept,
                       t.fit->r_squared);
  else
    out += "\nlog-log fit: not enough nonzero errors\n";
  return out;
}

inline std::string render_property(const PropertyResult& r, OutputFormat fmt_kind) {
  if (fmt_kind == OutputFormat::csv) return fmt::format("\"{}\",{},\"{}\"\n", r.name, r.passed ? "PASS" : "FAIL", r.detail);
  return fmt::format("{}  {}  ({})\n", r.passed ? "PASS" : "FAIL", r.name, r.detail);
}

inline std::string render_verification(const std::vector<PropertyResult>& results, OutputFormat fmt_kind) {
  if (fmt_kind == OutputFormat::json) {
    json arr = json::array();
    for (const auto& r : results) arr.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    return arr.dump(2) + "\n";
  }
  std::string out = fmt_kind == OutputFormat::csv ? "property,result,detail\n" : "";
  for (const auto& r : results) out += render_property(r, fmt_kind);
  return out;
}

}  // namespace stabidx
