#include "app.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "io.hpp"
#include "microrev/fock_oracle.hpp"
#include "microrev/gaussian_core.hpp"
#include "microrev/heterodyne.hpp"
#include "microrev/parallel.hpp"
#include "microrev/reversibility.hpp"
#include "records.hpp"
#include "sweep_config.hpp"

namespace microrev::cli {

namespace {

struct BathFlags {
  std::optional<double> nth;
  std::optional<double> beta;

  void add_to(CLI::App& cmd) {
    auto* n = cmd.add_option("--nth", nth, "Bath mean occupation n_th (> 0)");
    auto* b = cmd.add_option("--beta", beta, "Dimensionless inverse temperature (> 0)");
    n->excludes(b);
  }

  std::optional<BathSpec> resolve() const {
    if (nth) return BathSpec::from_nth(*nth);
    if (beta) return BathSpec::from_beta(*beta);
    return std::nullopt;
  }
};

struct QueryFlags {
  std::string alpha_i;
  std::string alpha_f;
  BathFlags bath;
  double tau = 0.0;

  TransitionQuery resolve() const {
    const auto b = bath.resolve();
    if (!b) throw UsageError("one of --nth or --beta is required");
    return {parse_complex(alpha_i), parse_complex(alpha_f), *b, BeamSplitterSpec::from_tau(tau)};
  }
};

// ---------------------------------------------------------------- ratio

struct RatioArgs {
  QueryFlags query;
  std::string engine = "analytic";
  std::size_t dim = 40;
  double tail_budget = fock::kDefaultTailBudget;
};

int cmd_ratio(const RatioArgs& a, std::ostream& out) {
  const TransitionQuery q = a.query.resolve();
  const RecordEngine engine = parse_engine(a.engine);
  if (engine == RecordEngine::MonteCarlo) throw UsageError("ratio supports --engine analytic or fock; use experiment");
  const ResultRecord rec = evaluate_record(q, engine, {a.dim, a.tail_budget}, 0, 0, {});
  nlohmann::json j = record_to_json(rec);
  if (engine == RecordEngine::Fock) j["fock_dim"] = a.dim;
  out << j.dump(2) << '\n';
  return rec.ok() ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- sweeps

struct SweepFlags {
  std::string config;
  std::string output;
  std::vector<std::string> alpha_i_list;
  std::vector<std::string> alpha_f_list;
  std::vector<double> nth_list;
  std::vector<double> beta_list;
  std::vector<double> tau_list;
  std::vector<std::string> engines;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  bool print_config = false;

  void add_to(CLI::App& cmd, bool with_mc) {
    cmd.add_option("--config", config, "JSON config file (fields of SweepConfig)");
    cmd.add_flag("--print-config", print_config, "Print the effective config as JSON and exit");
    cmd.add_option("--output", output, "Output CSV path");
    cmd.add_option("--alpha-i-list", alpha_i_list, "Initial amplitudes, comma separated")->delimiter(',');
    cmd.add_option("--alpha-f-list", alpha_f_list, "Final amplitudes, comma separated")->delimiter(',');
    cmd.add_option("--nth-list", nth_list, "Bath occupations, comma separated")->delimiter(',');
    cmd.add_option("--beta-list", beta_list, "Inverse temperatures, comma separated")->delimiter(',');
    if (with_mc) {
      cmd.add_option("--tau-list", tau_list, "Transmissivities, comma separated")->delimiter(',');
      cmd.add_option("--engines", engines, "Engines per query: analytic, fock, montecarlo")->delimiter(',');
      cmd.add_option("--samples", samples, "Monte Carlo samples per protocol");
      cmd.add_option("--seed", seed, "Base seed");
    }
    cmd.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  }

  void apply(SweepConfig& cfg) const {
    if (!config.empty()) load_config_file(cfg, config);
    auto amps = [](const std::vector<std::string>& xs) {
      std::vector<ComplexAmplitude> out;
      for (const auto& x : xs) out.push_back(parse_complex(x));
      return out;
    };
    if (!alpha_i_list.empty()) cfg.amplitudes_i = amps(alpha_i_list);
    if (!alpha_f_list.empty()) cfg.amplitudes_f = amps(alpha_f_list);
    if (!nth_list.empty()) cfg.nth_list = nth_list;
    if (!beta_list.empty()) cfg.beta_list = beta_list;
    if (!tau_list.empty()) cfg.tau_list = tau_list;
    if (!engines.empty()) cfg.engines = engines;
    if (samples) cfg.mc_samples = *samples;
    if (seed) cfg.base_seed = *seed;
    if (!output.empty()) cfg.output_path = output;
  }
};

int cmd_sweep_fig3(const SweepFlags& flags, std::ostream& out) {
  SweepConfig cfg = default_fig3_config();
  flags.apply(cfg);
  validate_fig3(cfg);
  if (flags.print_config) {
    out << config_to_json(cfg).dump(2) << '\n';
    return kExitOk;
  }
  const auto queries = fig3_queries(cfg);
  std::vector<RecordEngine> engines;
  for (const auto& e : cfg.engines) engines.push_back(parse_engine(e));

  const fock::OracleOptions fock_opts{cfg.fock_dim, cfg.fock_tail_budget};
  const heterodyne::BootstrapOptions boot{cfg.n_resamples, cfg.resample_size};
  std::vector<std::optional<ResultRecord>> rows(queries.size() * engines.size());
  parallel_for(
      rows.size(),
      [&](std::size_t k) {
        const std::size_t qi = k / engines.size();
        // The seed depends on the query index only, so adding engines never
        // changes Monte Carlo rows.
        rows[k] = evaluate_record(queries[qi], engines[k % engines.size()], fock_opts, cfg.mc_samples,
                                  heterodyne::derive_seed(cfg.base_seed, qi), boot);
      },
      flags.threads);

  std::ostringstream csv;
  CsvWriter writer(csv);
  writer.row(record_csv_header());
  std::size_t failed = 0, mc = 0, mc_within = 0;
  for (const auto& slot : rows) {
    const ResultRecord& r = *slot;
    writer.row(record_csv_fields(r));
    if (!r.ok()) ++failed;
    if (const auto w = r.within_4se()) {
      ++mc;
      if (*w) ++mc_within;
    }
  }
  const auto path = resolve_output_path(cfg.output_path);
  write_file(path, csv.str());
  out << "sweep-fig3: " << rows.size() << " rows, " << failed << " failed";
  if (mc) out << ", montecarlo within 4 se: " << mc_within << "/" << mc;
  out << ", written to " << path.string() << '\n';
  return failed ? kExitCheckFailed : kExitOk;
}

const std::vector<std::string>& upsilon_header() {
  static const std::vector<std::string> header{
      "n_th",         "beta",           "alpha_i_re",  "alpha_i_im",         "alpha_f_re",   "alpha_f_im",
      "alpha_sq_tot", "delta_alpha_sq", "log_upsilon", "log_upsilon_per_tot", "half_beta_sq", "status"};
  return header;
}

int cmd_sweep_upsilon(const SweepFlags& flags, std::ostream& out) {
  SweepConfig cfg = default_upsilon_config();
  flags.apply(cfg);
  validate_upsilon(cfg);
  if (flags.print_config) {
    out << config_to_json(cfg).dump(2) << '\n';
    return kExitOk;
  }
  const auto baths = sweep_baths(cfg);

  std::ostringstream csv;
  CsvWriter writer(csv);
  writer.row(upsilon_header());
  std::size_t rows = 0;
  for (const auto& bath : baths) {
    const double beta = bath.beta();
    for (const auto& ai : cfg.amplitudes_i) {
      for (const auto& af : cfg.amplitudes_f) {
        const double tot = ai.norm_sq() + af.norm_sq();
        const double log_u = upsilon_closed_form(ai, af, beta);
        writer.row({format_number(bath.n_th()), format_number(beta), format_number(ai.re()), format_number(ai.im()),
                    format_number(af.re()), format_number(af.im()), format_number(tot),
                    format_number(af.norm_sq() - ai.norm_sq()), format_number(log_u),
                    tot > 0.0 ? format_number(log_u / tot) : "", format_number(beta * beta / 2.0), "ok"});
        ++rows;
      }
    }
  }
  const auto path = resolve_output_path(cfg.output_path);
  write_file(path, csv.str());
  out << "sweep-upsilon: " << rows << " rows, written to " << path.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- oracle-check

struct OracleArgs {
  std::size_t dim = 40;
  std::optional<double> tolerance;
  std::string output;
  std::size_t threads = 0;
};

struct CheckOutcome {
  std::string name;
  double tolerance = 0.0;
  std::optional<double> max_error;
  std::string error;
  bool passed = false;
};

std::string exception_kind(const std::exception& e) {
  if (dynamic_cast<const TruncationTooSmall*>(&e)) return "TruncationTooSmall";
  if (dynamic_cast<const ZeroBackwardProbability*>(&e)) return "ZeroBackwardProbability";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  return "Error";
}

CheckOutcome run_check(std::string name, double tolerance, const std::function<double()>& measure) {
  CheckOutcome c;
  c.name = std::move(name);
  c.tolerance = tolerance;
  try {
    c.max_error = measure();
    c.passed = *c.max_error <= tolerance;
  } catch (const std::exception& e) {
    c.error = exception_kind(e) + ": " + e.what();
  }
  return c;
}

int cmd_oracle_check(const OracleArgs& a, std::ostream& out) {
  if (a.dim < 2) throw UsageError("--dim must be at least 2");
  if (a.tolerance && !(*a.tolerance >= 0.0)) throw UsageError("--tolerance must be >= 0");
  const auto tol = [&](double fallback) { return a.tolerance.value_or(fallback); };
  const std::size_t dim = a.dim;
  const double theta = BeamSplitterSpec::from_tau(0.7).theta();

  std::vector<CheckOutcome> checks;
  checks.push_back(run_check("unitarity", tol(1e-12), [&] {
    double worst = 0.0;
    for (double t : {0.3, theta, std::numbers::pi / 4.0, 1.3}) {
      worst = std::max(worst, fock::beam_splitter(t, dim).max_unitarity_error());
    }
    return worst;
  }));
  checks.push_back(
      run_check("energy_conservation", tol(1e-12), [&] { return fock::energy_conservation_check(theta, dim); }));
  checks.push_back(run_check("fixed_point", tol(1e-8), [&] {
    return fock::fixed_point_check(BathSpec::from_nth(1.0), std::numbers::pi / 4.0, dim);
  }));
  checks.push_back(run_check("gaussian_equivalence", tol(1e-6), [&] {
    const std::vector<ComplexAmplitude> amps{0.0, 0.5, {1.0, 0.5}, 2.0, {-1.3, 0.7}};
    const std::vector<double> nths{0.5, 1.0, 1.62};
    const std::vector<double> taus{0.15, 0.3, 0.5, 0.85};
    double worst = 0.0;
    for (double nth : nths) {
      const auto bath = BathSpec::from_nth(nth);
      for (double tau : taus) {
        const auto bs = BeamSplitterSpec::from_tau(tau);
        const auto u = fock::beam_splitter(bs.theta(), dim, std::max(dim, fock::thermal_dim_for(bath)));
        std::vector<double> errs(amps.size() * amps.size());
        parallel_for(
            errs.size(),
            [&](std::size_t k) {
              const TransitionQuery q{amps[k / amps.size()], amps[k % amps.size()], bath, bs};
              const double ef = gaussian::forward_probability(q);
              const double eb = gaussian::backward_probability(q);
              errs[k] = std::max(std::abs(fock::forward_probability_fock(q, u) - ef) / ef,
                                 std::abs(fock::backward_probability_fock(q, u) - eb) / eb);
            },
            a.threads);
        for (double e : errs) worst = std::max(worst, e);
      }
    }
    return worst;
  }));
  checks.push_back(run_check("general_ratio", tol(1e-5), [&] {
    using fock::FockKet;
    const Complex i(0.0, 1.0);
    const std::vector<FockKet> states{
        FockKet::from_amplitudes({1.0, 0.0, 1.0}),
        FockKet::from_amplitudes({0.0, 1.0, 0.0, i}),
        FockKet::from_amplitudes({1.0, 1.0, 1.0}),
        FockKet::from_amplitudes({2.0, 0.0, 0.0, -1.0, 0.0, i}),
        FockKet::from_amplitudes({0.0, 0.0, 1.0, 0.0, 1.0}),
        fock::coherent_ket(2.0, dim),
        fock::coherent_ket(ComplexAmplitude(0.6, 0.8), dim),
    };
    const auto bath = BathSpec::from_nth(1.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < states.size(); ++k) {
      const auto r = fock::general_ratio_check(states[k], states[(k + 1) % states.size()], bath, theta, dim);
      worst = std::max(worst, r.relative_error());
    }
    return worst;
  }));

  bool all_passed = true;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) {
    all_passed = all_passed && c.passed;
    list.push_back({{"name", c.name},
                    {"passed", c.passed},
                    {"max_error", c.max_error ? number_or_null(*c.max_error) : nlohmann::json(nullptr)},
                    {"tolerance", c.tolerance},
                    {"error", c.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(c.error)}});
  }
  const nlohmann::json report{{"dim", dim}, {"passed", all_passed}, {"checks", list}};
  const std::string text = report.dump(2) + "\n";
  if (!a.output.empty()) write_file(resolve_output_path(a.output), text);
  out << text;
  return all_passed ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  QueryFlags query{.alpha_i = "2", .alpha_f = "1.5", .bath = {}, .tau = 0.15};
  std::size_t samples = 50000;
  std::uint64_t seed = 20240611;
  std::size_t n_resamples = 1000;
  std::size_t resample_size = 1000;
  std::string output_dir = ".";
  std::string prefix = "experiment";
};

nlohmann::json fit_to_json(const heterodyne::IsotropicGaussianFit& f) {
  return {{"mean", amplitude_to_json(f.mean)}, {"variance", f.variance}, {"n_samples", f.n_samples}};
}

nlohmann::json state_to_json(const DisplacedThermalState& s) {
  return {{"mu", amplitude_to_json(s.mu)}, {"nbar", s.nbar}};
}

const std::vector<std::string>& experiment_extra_header() {
  static const std::vector<std::string> extra{"samples",          "seed",
                                              "fwd_fit_mean_re",  "fwd_fit_mean_im",
                                              "fwd_fit_variance", "bwd_fit_mean_re",
                                              "bwd_fit_mean_im",  "bwd_fit_variance",
                                              "log_p_fwd",        "log_p_bwd"};
  return extra;
}

int cmd_experiment(ExperimentArgs a, std::ostream& out) {
  if (!a.query.bath.nth && !a.query.bath.beta) a.query.bath.nth = 1.62;
  const TransitionQuery q = a.query.resolve();
  const heterodyne::BootstrapOptions boot{a.n_resamples, a.resample_size};
  const auto est = heterodyne::estimate_log_ratio(q, a.samples, a.seed, boot);

  ResultRecord rec{.engine = RecordEngine::MonteCarlo, .query = q, .result = {}, .bootstrap = {}};
  rec.result = make_transition_result(q, est.log_p_fwd, est.log_p_bwd);
  rec.bootstrap = est.estimate;
  const TransitionResult analytic = evaluate(q, Engine::Analytic);

  std::ostringstream csv;
  CsvWriter writer(csv);
  auto header = record_csv_header();
  header.insert(header.end(), experiment_extra_header().begin(), experiment_extra_header().end());
  writer.row(header);
  auto fields = record_csv_fields(rec);
  for (const auto& v : {std::to_string(a.samples), std::to_string(a.seed), format_number(est.forward_fit.mean.re()),
                        format_number(est.forward_fit.mean.im()), format_number(est.forward_fit.variance),
                        format_number(est.backward_fit.mean.re()), format_number(est.backward_fit.mean.im()),
                        format_number(est.backward_fit.variance), format_number(est.log_p_fwd),
                        format_number(est.log_p_bwd)}) {
    fields.push_back(v);
  }
  writer.row(fields);

  const nlohmann::json summary{
      {"query",
       {{"alpha_i", amplitude_to_json(q.alpha_i)},
        {"alpha_f", amplitude_to_json(q.alpha_f)},
        {"n_th", q.bath.n_th()},
        {"beta", q.bath.beta()},
        {"tau", q.bs.tau()}}},
      {"samples", a.samples},
      {"seed", a.seed},
      {"forward",
       {{"state", state_to_json(est.forward_state)},
        {"evaluate", amplitude_to_json(est.forward_eval)},
        {"fit", fit_to_json(est.forward_fit)},
        {"log_density", est.log_p_fwd}}},
      {"backward",
       {{"input", amplitude_to_json(est.backward_input)},
        {"state", state_to_json(est.backward_state)},
        {"evaluate", amplitude_to_json(est.backward_eval)},
        {"fit", fit_to_json(est.backward_fit)},
        {"log_density", est.log_p_bwd}}},
      {"estimate",
       {{"point", est.estimate.point},
        {"std_error", est.estimate.std_error},
        {"ci_low", est.estimate.ci_low},
        {"ci_high", est.estimate.ci_high},
        {"n_resamples", est.estimate.n_resamples},
        {"resample_size", est.estimate.resample_size}}},
      {"predicted_log_ratio", analytic.predicted_log_ratio},
      {"analytic_log_ratio", analytic.log_ratio},
      {"within_4se", *rec.within_4se()},
      {"log_upsilon_estimate", rec.result->log_upsilon},
      {"log_upsilon_theory", analytic.log_upsilon}};

  const auto dir = resolve_output_dir(a.output_dir);
  const std::string json_text = summary.dump(2) + "\n";
  write_file(dir / (a.prefix + ".csv"), csv.str());
  write_file(dir / (a.prefix + ".json"), json_text);
  out << json_text;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum microscopic reversibility for coherent states: closed forms, Fock-space oracle and "
               "heterodyne Monte Carlo"};
  app.name("microrev");
  app.require_subcommand(1);

  RatioArgs ratio;
  auto* ratio_cmd = app.add_subcommand("ratio", "Forward/backward log ratio for one query (JSON to stdout)");
  ratio_cmd->add_option("--alpha-i", ratio.query.alpha_i, "Initial amplitude, e.g. 1.5 or 1-0.5i")->required();
  ratio_cmd->add_option("--alpha-f", ratio.query.alpha_f, "Final amplitude")->required();
  ratio.query.bath.add_to(*ratio_cmd);
  ratio_cmd->add_option("--tau", ratio.query.tau, "Beam-splitter transmissivity in [0, 1]")->required();
  ratio_cmd->add_option("--engine", ratio.engine, "analytic or fock")->capture_default_str();
  ratio_cmd->add_option("--dim", ratio.dim, "Fock dimension per mode")->capture_default_str();
  ratio_cmd->add_option("--tail-budget", ratio.tail_budget, "Fock truncation budget")->capture_default_str();

  SweepFlags fig3;
  auto* fig3_cmd = app.add_subcommand("sweep-fig3", "Log-ratio sweep over amplitude, temperature and coupling grids (CSV)");
  fig3.add_to(*fig3_cmd, true);

  SweepFlags ups;
  auto* ups_cmd = app.add_subcommand("sweep-upsilon", "log Upsilon against total energy and temperature (CSV)");
  ups.add_to(*ups_cmd, false);

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Fock-space oracle self-checks (JSON report)");
  oracle_cmd->add_option("--dim", oracle.dim, "Fock dimension per mode")->capture_default_str();
  oracle_cmd->add_option("--tolerance", oracle.tolerance, "Override every check tolerance");
  oracle_cmd->add_option("--output", oracle.output, "Also write the report to this path");
  oracle_cmd->add_option("--threads", oracle.threads, "Worker threads (0 = hardware concurrency)");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Heterodyne Monte Carlo estimate of the log ratio");
  exp_cmd->add_option("--alpha-i", exp.query.alpha_i, "Initial amplitude")->capture_default_str();
  exp_cmd->add_option("--alpha-f", exp.query.alpha_f, "Final amplitude")->capture_default_str();
  exp.query.bath.add_to(*exp_cmd);
  exp_cmd->add_option("--tau", exp.query.tau, "Beam-splitter transmissivity")->capture_default_str();
  exp_cmd->add_option("--samples", exp.samples, "Heterodyne samples per protocol")->capture_default_str();
  exp_cmd->add_option("--seed", exp.seed, "Base seed")->capture_default_str();
  exp_cmd->add_option("--n-resamples", exp.n_resamples, "Bootstrap resamples")->capture_default_str();
  exp_cmd->add_option("--resample-size", exp.resample_size, "Bootstrap resample size")->capture_default_str();
  exp_cmd->add_option("--output-dir", exp.output_dir, "Directory for the CSV and JSON outputs")->capture_default_str();
  exp_cmd->add_option("--prefix", exp.prefix, "Output file stem")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*ratio_cmd) return cmd_ratio(ratio, out);
    if (*fig3_cmd) return cmd_sweep_fig3(fig3, out);
    if (*ups_cmd) return cmd_sweep_upsilon(ups, out);
    if (*oracle_cmd) return cmd_oracle_check(oracle, out);
    if (*exp_cmd) return cmd_experiment(exp, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace microrev::cli
