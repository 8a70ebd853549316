// stabidx: Monte Carlo estimation of stability-index distributions.
//
//   stabidx estimate    --family cont-eq --n 3 --samples 1000000
//   stabidx convergence --family disc-eq --n 2 --k 2
//   stabidx verify

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stabidx/stabidx.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kAborted = 2, kVerifyFailed = 3 };

struct CommonOptions {
  std::string family = "cont-sys";
  int n = 1;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = stabidx::kDefaultSeed;
  std::uint32_t shards = 16;
  std::string method = "auto";
  double tol = stabidx::kDefaultTol;
  std::string format = "table";
  std::string out;
  unsigned workers = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_family) {
  if (with_family) {
    cmd->add_option("--family", o.family, "Model family")
        ->check(CLI::IsMember({"cont-sys", "cont-eq", "disc-sys", "disc-eq"}))
        ->required();
    cmd->add_option("--n", o.n, "Dimension / order")->check(CLI::Range(1, 64))->required();
    cmd->add_option("--method", o.method, "Index method")->check(CLI::IsMember({"rh", "eigen", "auto"}));
  }
  cmd->add_option("--samples", o.samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--shards", o.shards, "Number of independent substreams")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", o.tol, "Relative boundary tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));
  cmd->add_option("--out", o.out, "Write output to FILE instead of stdout");
  cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores); does not change results");
}

stabidx::EstimationConfig to_config(const CommonOptions& o) {
  stabidx::EstimationConfig c;
  c.family = stabidx::ModelFamily(*stabidx::parse_family_kind(o.family), o.n);
  c.method = *stabidx::parse_index_method(o.method);
  c.samples = o.samples;
  c.seed = o.seed;
  c.shards = o.shards;
  c.tol = o.tol;
  c.workers = o.workers;
  return c;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw CLI::ValidationError("--out", "cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability-index distributions of random linear models"};
  app.require_subcommand(1);

  CommonOptions est;
  auto* estimate = app.add_subcommand("estimate", "Estimate the index distribution of one family");
  add_common(estimate, est, true);

  CommonOptions conv;
  int conv_k = 0;
  int replicates = 1;
  std::vector<std::uint64_t> grid{100, 1'000, 10'000, 100'000, 1'000'000};
  auto* convergence = app.add_subcommand("convergence", "Error decay of one probability against its exact value");
  add_common(convergence, conv, true);
  convergence->add_option("--k", conv_k, "Index whose probability is tracked")->required();
  convergence->add_option("--grid", grid, "Sample counts, comma separated")->delimiter(',')->check(CLI::PositiveNumber);
  convergence->add_option("--replicates", replicates, "Independent runs averaged at each M")->check(CLI::PositiveNumber);
  conv.shards = 1;

  CommonOptions ver;
  double arctan_error = 0.0;
  auto* verify = app.add_subcommand("verify", "Run the invariant suite");
  add_common(verify, ver, false);
  verify->add_option("--inject-arctan-error", arctan_error,
                     "Add a constant to the arctan in the erf-Gaussian closed form (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*estimate) {
      const auto cfg = to_config(est);
      cfg.validate();
      Output out(est.out);
      const auto report = stabidx::make_estimate_report(cfg);
      out.stream() << stabidx::render_estimate(report, *stabidx::parse_output_format(est.format));
      return kOk;
    }

    if (*convergence) {
      const auto cfg = to_config(conv);
      if (conv_k < 0 || conv_k > cfg.family.n()) {
        std::cerr << "error: --k must lie in 0.." << cfg.family.n() << "\n";
        return kUsage;
      }
      const auto exact = stabidx::exact_probabilities(cfg.family).values[static_cast<std::size_t>(conv_k)];
      if (!exact) {
        std::cerr << "error: no exact value is known for p" << conv_k << " of " << stabidx::to_string(cfg.family.kind())
                  << " n=" << cfg.family.n() << "\n";
        return kUsage;
      }
      Output out(conv.out);
      const auto table = stabidx::convergence_study(cfg.family, conv_k, *exact, grid, cfg.seed, cfg.shards, cfg.tol, replicates);
      out.stream() << stabidx::render_convergence(table, cfg.seed, *stabidx::parse_output_format(conv.format));
      return kOk;
    }

    stabidx::VerifyOptions opt;
    opt.samples = ver.samples;
    opt.seed = ver.seed;
    opt.shards = ver.shards;
    opt.tol = ver.tol;
    if (arctan_error != 0.0) {
      opt.erf_closed_form = [arctan_error](double a, double b) {
        return (std::atan(b / a) + arctan_error) / (a * std::sqrt(std::numbers::pi));
      };
    }
    const auto fmt_kind = *stabidx::parse_output_format(ver.format);
    Output out(ver.out);
    std::ostream& os = out.stream();
    if (fmt_kind == stabidx::OutputFormat::csv) os << "property,result,detail\n";
    const auto results = stabidx::run_verification(opt, [&](const stabidx::PropertyResult& r) {
      if (fmt_kind != stabidx::OutputFormat::json) os << stabidx::render_property(r, fmt_kind) << std::flush;
    });
    if (fmt_kind == stabidx::OutputFormat::json) os << stabidx::render_verification(results, fmt_kind);
    for (const auto& r : results)
      if (!r.passed) return kVerifyFailed;
    return kOk;
  } catch (const stabidx::EstimationAborted& e) {
    std::cerr << "error: " << e.what() << " (" << e.histogram().indeterminate << " of " << e.histogram().total
              << " samples indeterminate)\n";
    return kAborted;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
