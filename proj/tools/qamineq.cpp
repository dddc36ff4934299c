// Command-line front end: evaluate means, decide inequality instances, build
// certificates, hunt counterexamples, and replay stored evidence.
//
// Exit codes: 0 holds_certified / valid certificate, 1 fails / valid
// counterexample, 2 undecided / nothing found, 64 input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qamineq/json_io.hpp"
#include "qamineq/qamineq.hpp"

namespace {

using namespace qamineq;

constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitInput = 64;
constexpr int kExitInternal = 70;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::vector<double> parse_csv(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw IoError("cannot parse number '" + item + "'");
    }
  }
  if (out.empty()) throw IoError("empty number list");
  return out;
}

struct Options {
  std::string problem_path;
  std::string generator_path;
  std::string evidence_path;
  std::string x_csv, lambda_csv;
  std::uint64_t seed = 0;
  long long budget = 30000;
  int grid = 5;
  int sample = 120;
  double tolerance = 1e-6;
  std::string output = "text";
};

DecideConfig make_config(const Options& opt) {
  DecideConfig cfg;
  cfg.seed = opt.seed;
  cfg.grid.points_per_dim = opt.grid;
  cfg.sample.count = opt.sample;
  cfg.falsify.budget = opt.budget;
  cfg.falsify.threshold = opt.tolerance;
  return cfg;
}

void emit(const Options& opt, const json& machine, const std::string& human) {
  if (opt.output == "json")
    std::cout << machine.dump(2) << "\n";
  else
    std::cout << human << "\n";
}

int cmd_eval(const Options& opt) {
  const GeneratorFn f = parse_generator(load_json(opt.generator_path));
  const std::vector<double> x = parse_csv(opt.x_csv);
  double value;
  if (opt.lambda_csv.empty()) {
    value = qam(f, x);
  } else {
    value = weighted_qam(f, x, WeightVector{parse_csv(opt.lambda_csv)});
  }
  emit(opt, json{{"value", value}}, std::to_string(value));
  return 0;
}

int cmd_check(const Options& opt) {
  const InequalityProblem p = parse_problem(load_json(opt.problem_path));
  const Verdict v = decide(p, make_config(opt));
  const json out = verdict_to_json(v);
  std::string human = "verdict: " + out["status"].get<std::string>();
  if (v.counterexample)
    human += "  (violation " + std::to_string(v.counterexample->violation()) + ")";
  emit(opt, out, human);
  switch (v.status) {
    case VerdictStatus::HoldsCertified: return kExitHolds;
    case VerdictStatus::Fails: return kExitFails;
    case VerdictStatus::Undecided: return kExitUndecided;
  }
  return kExitInternal;
}

int cmd_certify(const Options& opt) {
  const InequalityProblem p = parse_problem(load_json(opt.problem_path));
  const DecideConfig cfg = make_config(opt);
  const CertifyResult r = build_certificate(p, cfg.grid, cfg.sample, cfg.refine);
  switch (r.status) {
    case CertifyStatus::Certified:
      emit(opt, certificate_to_json(*r.certificate),
           "certificate over " + std::to_string(r.certificate->entries.size()) +
               " base points, residual " + std::to_string(r.certificate->residual));
      return kExitHolds;
    case CertifyStatus::Refuted:
      emit(opt, counterexample_to_json(*r.counterexample),
           "refuted: violation " + std::to_string(r.counterexample->violation()));
      return kExitFails;
    case CertifyStatus::Undecided:
      emit(opt, json{{"status", "undecided"}, {"note", r.note}}, "undecided: " + r.note);
      return kExitUndecided;
  }
  return kExitInternal;
}

int cmd_falsify(const Options& opt) {
  const InequalityProblem p = parse_problem(load_json(opt.problem_path));
  FalsifyConfig cfg;
  cfg.budget = opt.budget;
  cfg.seed = opt.seed;
  cfg.threshold = opt.tolerance;
  if (const auto ce = falsify(p, cfg)) {
    emit(opt, counterexample_to_json(*ce),
         "counterexample: violation " + std::to_string(ce->violation()));
    return kExitFails;
  }
  emit(opt, json{{"status", "none"}}, "none (not a proof)");
  return kExitUndecided;
}

int cmd_report(const Options& opt) {
  const InequalityProblem p = parse_problem(load_json(opt.problem_path));
  const json ev = load_json(opt.evidence_path);
  if (ev.contains("points")) {
    const Counterexample stored = parse_counterexample(ev);
    const Counterexample fresh = replay(p, stored);
    const bool reproduced = std::abs(fresh.lhs - stored.lhs) <= 1e-12 &&
                            std::abs(fresh.rhs - stored.rhs) <= 1e-12 &&
                            fresh.violation() > opt.tolerance;
    emit(opt,
         json{{"status", reproduced ? "fails" : "invalid"},
              {"violation", fresh.violation()}},
         reproduced ? "counterexample replayed: fails" : "evidence did not replay");
    return reproduced ? kExitFails : kExitUndecided;
  }
  if (ev.contains("coeffs")) {
    const Certificate cert = parse_certificate(ev);
    // re-verify every entry on a fresh sample
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b9ULL);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst = -kInf;
    for (const CertificateEntry& e : cert.entries) {
      const double f0_t = p.f(0)(p.apply_Phi(e.base));
      std::vector<double> ft(static_cast<std::size_t>(p.k()));
      for (int j = 1; j <= p.k(); ++j)
        ft[static_cast<std::size_t>(j - 1)] = p.f(j)(e.base[static_cast<std::size_t>(j - 1)]);
      for (int s = 0; s < 400; ++s) {
        std::vector<double> x(static_cast<std::size_t>(p.k()));
        for (int j = 0; j < p.k(); ++j)
          x[static_cast<std::size_t>(j)] = p.box()[static_cast<std::size_t>(j)].at(uni(rng));
        worst = std::max(worst, detail::entry_residual(p, e, ft, f0_t, x));
      }
    }
    const bool valid = worst <= 1e-6;
    emit(opt, json{{"status", valid ? "holds_certified" : "invalid"}, {"residual", worst}},
         valid ? "certificate replayed: holds_certified" : "certificate did not replay");
    return valid ? kExitHolds : kExitUndecided;
  }
  throw IoError("evidence file is neither a certificate nor a counterexample");
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"quasi-arithmetic mean inequality toolkit"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "random seed")->envname("QAMINEQ_SEED");
    sub->add_option("--output", opt.output, "output format: text|json")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--tolerance", opt.tolerance, "violation threshold")
        ->check(CLI::Range(1e-15, 1e-3));
  };

  CLI::App* eval = app.add_subcommand("eval", "evaluate a (weighted) mean");
  eval->add_option("--f", opt.generator_path, "generator JSON file")->required();
  eval->add_option("--x", opt.x_csv, "comma-separated arguments")->required();
  eval->add_option("--lambda", opt.lambda_csv, "comma-separated weights");
  add_common(eval);

  CLI::App* check = app.add_subcommand("check", "decide an inequality instance");
  check->add_option("problem", opt.problem_path, "problem JSON file")->required();
  check->add_option("--budget", opt.budget, "falsifier evaluation budget")
      ->check(CLI::PositiveNumber);
  check->add_option("--grid", opt.grid, "certificate grid points per dimension")
      ->check(CLI::PositiveNumber);
  check->add_option("--sample", opt.sample, "certificate sample size")
      ->check(CLI::PositiveNumber);
  add_common(check);

  CLI::App* certify = app.add_subcommand("certify", "build a coefficient certificate");
  certify->add_option("problem", opt.problem_path, "problem JSON file")->required();
  certify->add_option("--grid", opt.grid, "grid points per dimension")->check(CLI::PositiveNumber);
  certify->add_option("--sample", opt.sample, "sample size")->check(CLI::PositiveNumber);
  add_common(certify);

  CLI::App* fals = app.add_subcommand("falsify", "search for a counterexample");
  fals->add_option("problem", opt.problem_path, "problem JSON file")->required();
  fals->add_option("--budget", opt.budget, "evaluation budget")->check(CLI::PositiveNumber);
  add_common(fals);

  CLI::App* report = app.add_subcommand("report", "replay stored evidence");
  report->add_option("evidence", opt.evidence_path, "certificate or counterexample JSON")
      ->required();
  report->add_option("--problem", opt.problem_path, "problem JSON file")->required();
  add_common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (app.got_subcommand(eval)) return cmd_eval(opt);
    if (app.got_subcommand(check)) return cmd_check(opt);
    if (app.got_subcommand(certify)) return cmd_certify(opt);
    if (app.got_subcommand(fals)) return cmd_falsify(opt);
    if (app.got_subcommand(report)) return cmd_report(opt);
  } catch (const InconsistencyError& e) {
    std::cerr << "internal inconsistency: " << e.what() << "\n";
    return kExitInternal;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
