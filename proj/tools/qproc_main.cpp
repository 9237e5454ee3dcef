// Copyright 2026 The qproc developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch front end: load scenario documents, validate them, compute
// probability tables, condition processes on observed events, reconstruct
// processes from probability oracles, run the identity-and-completeness
// self-checks, and compare sampled frequencies against predictions.
//
// Exit codes: 0 success, 1 validity failure, 2 parse/usage failure,
// 3 conditioning on a zero-probability event.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qproc/qproc.hpp"
#include "qproc/scenario_io.hpp"

namespace {

using namespace qproc;

enum ExitCode : int {
  kExitOk = 0,
  kExitValidity = 1,
  kExitParse = 2,
  kExitUndefinedConditional = 3,
};

struct GlobalOptions {
  std::string output = "human";
  double tol = 1e-9;
  std::uint64_t seed = 1;
  int trials = 0;  // per-command default applied when 0

  bool machine() const { return output == "machine"; }
};

void emit(const Json& j, const GlobalOptions& options,
          const std::string& human) {
  if (options.machine())
    std::cout << j.dump(2) << "\n";
  else
    std::cout << human;
}

std::string fmt(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string join_outcome(const std::vector<std::string>& outcome) {
  std::string s;
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    if (i) s += ", ";
    s += outcome[i];
  }
  return s;
}

int cmd_validate(const std::string& path, const GlobalOptions& options) {
  const ScenarioDocument doc = load_scenario(path);
  Json checks = Json::array();
  std::string human;
  bool all_passed = true;

  for (std::size_t i = 0; i < doc.instruments.size(); ++i) {
    const Instrument& instrument = doc.instruments[i];
    const InstrumentReport report = validate_instrument(instrument, options.tol);
    all_passed = all_passed && report.passed;
    Json check;
    check["name"] = "instrument[" + instrument.region().label + "]";
    check["passed"] = report.passed;
    check["trace_defect"] = report.trace_defect;
    Json margins = Json::array();
    double min_margin = 0.0;
    for (const auto& e : report.elements) {
      margins.push_back(e.cp_margin);
      min_margin = std::min(min_margin, e.cp_margin);
    }
    check["cp_margins"] = std::move(margins);
    checks.push_back(std::move(check));
    human += "instrument " + instrument.region().label + ": " +
             (report.passed ? "PASS" : "FAIL") + " (trace defect " +
             fmt(report.trace_defect) + ", min CP margin " + fmt(min_margin) +
             ")\n";
  }

  if (doc.process_spec) {
    const ProcessMatrix w = doc.build_process();
    const int trials = options.trials > 0 ? options.trials : 200;
    const ProcessTolerances tols{options.tol, 10.0 * options.tol, options.tol};
    const ProcessReport report =
        validate_process(w, trials, options.seed, tols);
    all_passed = all_passed && report.passed;
    Json check;
    check["name"] = "process";
    check["passed"] = report.passed;
    check["psd_margin"] = report.psd_margin;
    check["hermiticity_defect"] = report.hermiticity_defect;
    check["normalization_defect"] = report.max_normalization_defect;
    check["trace_defect"] = report.trace_defect;
    check["trials"] = trials;
    checks.push_back(std::move(check));
    human += std::string("process: ") + (report.passed ? "PASS" : "FAIL") +
             " (psd margin " + fmt(report.psd_margin) +
             ", normalization defect " + fmt(report.max_normalization_defect) +
             ", trace defect " + fmt(report.trace_defect) + ")\n";
  }

  Json j;
  j["command"] = "validate";
  j["checks"] = std::move(checks);
  j["passed"] = all_passed;
  human += std::string("overall: ") + (all_passed ? "PASS" : "FAIL") + "\n";
  emit(j, options, human);
  return all_passed ? kExitOk : kExitValidity;
}

int cmd_prob(const std::string& path, const GlobalOptions& options) {
  const ScenarioDocument doc = load_scenario(path);
  const Scenario scenario = doc.to_scenario();
  const OutcomeDistribution table = prob_table(scenario, options.tol);

  Json rows = Json::array();
  std::string human;
  for (const auto& [outcome, p] : table.probs) {
    Json row;
    row["outcome"] = outcome;
    row["probability"] = p;
    rows.push_back(std::move(row));
    human += "P(" + join_outcome(outcome) + ") = " + fmt(p) + "\n";
  }
  Json j;
  j["command"] = "prob";
  j["table"] = std::move(rows);
  j["total"] = table.total();
  human += "total = " + fmt(table.total()) + "\n";
  emit(j, options, human);
  return kExitOk;
}

int cmd_update(const std::string& path, const std::string& region,
               const std::string& outcome, const GlobalOptions& options) {
  const ScenarioDocument doc = load_scenario(path);
  const Scenario scenario = doc.to_scenario();
  if (!scenario.process)
    throw PreconditionError("update: scenario has no process");

  const std::size_t region_index = scenario.process->region_index(region);
  const Instrument& instrument = scenario.instruments[region_index];
  std::size_t element = instrument.size();
  for (std::size_t k = 0; k < instrument.size(); ++k)
    if (instrument.outcomes()[k] == outcome) element = k;
  if (element == instrument.size())
    throw CompositionError("update: instrument at region '" + region +
                           "' has no outcome '" + outcome + "'");

  const ProcessMatrix updated = update_process(
      *scenario.process, region, instrument.elements()[element], options.tol);

  ScenarioDocument out;
  out.regions = updated.regions();
  for (std::size_t i = 0; i < doc.instruments.size(); ++i) {
    if (i == region_index) continue;
    out.instruments.push_back(doc.instruments[i]);
    out.instrument_names.push_back(i < doc.instrument_names.size()
                                       ? doc.instrument_names[i]
                                       : std::string{});
  }
  out.process_spec = ProcessSpec{ProcessSpec::Kind::Matrix, updated.matrix()};

  const Json j = scenario_to_json(out);
  std::string human = "updated process on regions";
  for (const Region& r : updated.regions())
    human += " " + r.label + "(" + std::to_string(r.d_in) + "," +
             std::to_string(r.d_out) + ")";
  human += ":\n";
  for (Index r = 0; r < updated.matrix().rows(); ++r) {
    for (Index c = 0; c < updated.matrix().cols(); ++c) {
      const Complex v = updated.matrix()(r, c);
      human += "  (" + fmt(v.real()) + ", " + fmt(v.imag()) + ")";
    }
    human += "\n";
  }
  emit(j, options, human);
  return kExitOk;
}

int cmd_reconstruct(const std::string& path, long sampled,
                    const GlobalOptions& options) {
  const ScenarioDocument doc = load_scenario(path);
  const ProcessMatrix w = doc.build_process();

  ReconstructOptions rec;
  rec.seed = options.seed;
  if (options.trials > 0) {
    rec.axiom_trials = options.trials;
    rec.linearity_trials = options.trials;
  }
  if (sampled > 0) {
    // Finite-statistics oracle: loosen the thresholds to a few standard
    // errors of the frequency estimates unless the user pinned them.
    const double statistical =
        5.0 / std::sqrt(static_cast<double>(sampled));
    rec.precondition_tol = std::max(rec.precondition_tol, statistical);
    rec.holdout_tol = std::max(rec.holdout_tol, statistical);
  }
  const FrameOracle oracle =
      sampled > 0 ? sampled_oracle(w, sampled, derive_seed(options.seed, 99))
                  : wrap_process(w);
  const ReconstructionResult result = reconstruct_process_full(oracle, rec);

  const Json j = scenario_to_json(process_document(result.process));
  std::string human = "reconstructed process on regions";
  for (const Region& r : result.process.regions())
    human += " " + r.label + "(" + std::to_string(r.d_in) + "," +
             std::to_string(r.d_out) + ")";
  human += "\n";
  human += "held-out defect: " + fmt(result.holdout_defect) + "\n";
  human += "round-trip Frobenius gap: " +
           fmt((result.process.matrix() - w.matrix()).norm()) + "\n";
  emit(j, options, human);
  return kExitOk;
}

int cmd_lemmas(Index dim, const GlobalOptions& options) {
  const int trials = options.trials > 0 ? options.trials : 50;
  const MethodsLemmaReport report =
      verify_methods_lemmas(dim, trials, options.seed, options.tol);
  Json j;
  j["command"] = "lemmas";
  j["dim"] = dim;
  j["trials"] = trials;
  j["seed"] = options.seed;
  j["swap_defect"] = report.swap_defect;
  j["completeness_defect"] = report.completeness_defect;
  j["inner_product_defect"] = report.inner_defect;
  j["tol"] = report.tol;
  j["passed"] = report.passed;
  std::string human;
  human += "swap decomposition defect:    " + fmt(report.swap_defect) + "\n";
  human += "completeness defect:          " + fmt(report.completeness_defect) + "\n";
  human += "inner-product equality defect: " + fmt(report.inner_defect) + "\n";
  human += std::string("overall: ") + (report.passed ? "PASS" : "FAIL") + "\n";
  emit(j, options, human);
  return report.passed ? kExitOk : kExitValidity;
}

int cmd_sample(const std::string& path, long n, const GlobalOptions& options) {
  const ScenarioDocument doc = load_scenario(path);
  if (!doc.has_instruments())
    throw PreconditionError("sample: scenario has no instruments");
  const auto rho = doc.initial_state();
  if (!rho)
    throw PreconditionError(
        "sample: sampling needs a process built from a state (constructor "
        "'state' or 'identity_channel')");
  const SampleReport report =
      compare_with_process(*rho, doc.instruments, n, options.seed);

  Json rows = Json::array();
  std::string human;
  for (const auto& row : report.rows) {
    Json r;
    r["outcome"] = row.outcome;
    r["count"] = row.count;
    r["frequency"] = row.frequency;
    r["predicted"] = row.predicted;
    r["std_error"] = row.std_error;
    r["z"] = row.z;
    rows.push_back(std::move(r));
    human += "(" + join_outcome(row.outcome) + "): freq " + fmt(row.frequency) +
             "  predicted " + fmt(row.predicted) + "  z " + fmt(row.z) + "\n";
  }
  Json j;
  j["command"] = "sample";
  j["n"] = report.n;
  j["seed"] = report.seed;
  j["rows"] = std::move(rows);
  j["max_analytic_gap"] = report.max_analytic_gap;
  j["max_abs_z"] = report.max_abs_z;
  j["flagged"] = report.any_flagged;
  human += "n = " + std::to_string(report.n) +
           ", max analytic gap = " + fmt(report.max_analytic_gap) +
           ", max |z| = " + fmt(report.max_abs_z) +
           (report.any_flagged ? "  ** FLAGGED **" : "") + "\n";
  emit(j, options, human);
  return report.any_flagged ? kExitValidity : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"process-matrix toolkit: joint probabilities for quantum "
               "events in local regions"};
  app.require_subcommand(1);

  GlobalOptions options;
  if (const char* env = std::getenv("PROCESS_RULE_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0)) {
      std::cerr << "invalid PROCESS_RULE_TOL: '" << env << "'\n";
      return kExitParse;
    }
    options.tol = v;
  }

  auto add_common = [&options](CLI::App* cmd) {
    cmd->add_option("--seed", options.seed, "random seed");
    cmd->add_option("--trials", options.trials, "number of random trials");
    cmd->add_option("--tol", options.tol, "numerical tolerance");
    cmd->add_option("--output", options.output, "output format")
        ->check(CLI::IsMember({"human", "machine"}));
  };

  std::string path, region, outcome;
  long samples = 100000;
  long sampled_queries = 0;
  Index dim = 2;

  CLI::App* validate = app.add_subcommand("validate", "check all objects");
  validate->add_option("path", path, "scenario document")->required();
  add_common(validate);

  CLI::App* prob = app.add_subcommand("prob", "joint probability table");
  prob->add_option("path", path, "scenario document")->required();
  add_common(prob);

  CLI::App* update =
      app.add_subcommand("update", "condition the process on an event");
  update->add_option("path", path, "scenario document")->required();
  update->add_option("--region", region, "region of the observed event")
      ->required();
  update->add_option("--outcome", outcome, "observed outcome label")
      ->required();
  add_common(update);

  CLI::App* reconstruct = app.add_subcommand(
      "reconstruct", "recover the process from its probabilities");
  reconstruct->add_option("path", path, "scenario document")->required();
  reconstruct->add_option(
      "--sampled", sampled_queries,
      "answer oracle queries with this many samples instead of exactly");
  add_common(reconstruct);

  CLI::App* lemmas = app.add_subcommand(
      "lemmas", "swap, completeness and inner-product self-checks");
  lemmas->add_option("--dim", dim, "Hilbert-space dimension")->required();
  add_common(lemmas);

  CLI::App* sample =
      app.add_subcommand("sample", "compare sampled frequencies to predictions");
  sample->add_option("path", path, "scenario document")->required();
  sample->add_option("-n,--samples", samples, "number of runs");
  add_common(sample);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(path, options);
    if (prob->parsed()) return cmd_prob(path, options);
    if (update->parsed()) return cmd_update(path, region, outcome, options);
    if (reconstruct->parsed())
      return cmd_reconstruct(path, sampled_queries, options);
    if (lemmas->parsed()) return cmd_lemmas(dim, options);
    if (sample->parsed()) return cmd_sample(path, samples, options);
  } catch (const qproc::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const qproc::UndefinedConditionalError& e) {
    std::cerr << "undefined conditional: " << e.what() << "\n";
    return kExitUndefinedConditional;
  } catch (const qproc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidity;
  }
  return kExitParse;
}
