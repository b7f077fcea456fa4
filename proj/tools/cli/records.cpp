#include "records.hpp"

#include <cmath>

#include "io.hpp"

namespace microrev::cli {

std::string engine_name(RecordEngine e) {
  switch (e) {
    case RecordEngine::Analytic:
      return "analytic";
    case RecordEngine::Fock:
      return "fock";
    case RecordEngine::MonteCarlo:
      return "montecarlo";
  }
  return "unknown";
}

RecordEngine parse_engine(const std::string& name) {
  if (name == "analytic") return RecordEngine::Analytic;
  if (name == "fock") return RecordEngine::Fock;
  if (name == "montecarlo") return RecordEngine::MonteCarlo;
  throw UsageError("unknown engine '" + name + "' (expected analytic, fock or montecarlo)");
}

std::optional<bool> ResultRecord::within_4se() const {
  if (!bootstrap || !result) return std::nullopt;
  return std::abs(result->log_ratio - result->predicted_log_ratio) < 4.0 * bootstrap->std_error;
}

ResultRecord evaluate_record(const TransitionQuery& q, RecordEngine engine, const fock::OracleOptions& fock_opts,
                             std::size_t mc_samples, std::uint64_t seed, const heterodyne::BootstrapOptions& boot) {
  ResultRecord rec{.engine = engine, .query = q, .result = {}, .bootstrap = {}};
  try {
    switch (engine) {
      case RecordEngine::Analytic:
        rec.result = evaluate(q, Engine::Analytic);
        break;
      case RecordEngine::Fock:
        rec.result = evaluate(q, Engine::Fock, fock_opts);
        break;
      case RecordEngine::MonteCarlo: {
        const auto est = heterodyne::estimate_log_ratio(q, mc_samples, seed, boot);
        rec.result = make_transition_result(q, est.log_p_fwd, est.log_p_bwd);
        rec.bootstrap = est.estimate;
        break;
      }
    }
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception& e) {
    rec.result.reset();
    rec.bootstrap.reset();
    rec.status = std::string("error: ") + e.what();
  }
  return rec;
}

const std::vector<std::string>& record_csv_header() {
  static const std::vector<std::string> header{
      "engine",        "alpha_i_re",   "alpha_i_im",          "alpha_f_re",  "alpha_f_im",          "n_th",
      "beta",          "tau",          "p_fwd",               "p_bwd",       "log_ratio",           "predicted_log_ratio",
      "heat",          "classical_log_ratio", "log_upsilon",  "alpha_sq_tot", "delta_alpha_sq",     "std_error",
      "ci_low",        "ci_high",      "n_resamples",         "resample_size", "within_4se",        "status"};
  return header;
}

std::vector<std::string> record_csv_fields(const ResultRecord& r) {
  const auto& q = r.query;
  std::vector<std::string> f{engine_name(r.engine),
                             format_number(q.alpha_i.re()),
                             format_number(q.alpha_i.im()),
                             format_number(q.alpha_f.re()),
                             format_number(q.alpha_f.im()),
                             format_number(q.bath.n_th()),
                             format_number(q.bath.beta()),
                             format_number(q.bs.tau())};
  if (r.result) {
    const auto& t = *r.result;
    for (double v : {t.p_fwd, t.p_bwd, t.log_ratio, t.predicted_log_ratio, t.heat, t.classical_log_ratio, t.log_upsilon,
                     t.alpha_sq_tot, t.delta_alpha_sq}) {
      f.push_back(format_number(v));
    }
  } else {
    f.insert(f.end(), 9, "");
  }
  if (r.bootstrap) {
    const auto& b = *r.bootstrap;
    f.push_back(format_number(b.std_error));
    f.push_back(format_number(b.ci_low));
    f.push_back(format_number(b.ci_high));
    f.push_back(std::to_string(b.n_resamples));
    f.push_back(std::to_string(b.resample_size));
  } else {
    f.insert(f.end(), 5, "");
  }
  const auto within = r.within_4se();
  f.push_back(within ? (*within ? "true" : "false") : "");
  f.push_back(r.status);
  return f;
}

nlohmann::json record_to_json(const ResultRecord& r) {
  const auto& q = r.query;
  nlohmann::json j{{"engine", engine_name(r.engine)},
                   {"alpha_i", amplitude_to_json(q.alpha_i)},
                   {"alpha_f", amplitude_to_json(q.alpha_f)},
                   {"n_th", q.bath.n_th()},
                   {"beta", number_or_null(q.bath.beta())},
                   {"tau", q.bs.tau()},
                   {"status", r.status}};
  if (r.result) {
    const auto& t = *r.result;
    j["p_fwd"] = t.p_fwd;
    j["p_bwd"] = t.p_bwd;
    j["log_ratio"] = t.log_ratio;
    j["predicted_log_ratio"] = t.predicted_log_ratio;
    j["heat"] = t.heat;
    j["classical_log_ratio"] = t.classical_log_ratio;
    j["log_upsilon"] = t.log_upsilon;
    j["upsilon"] = number_or_null(std::exp(t.log_upsilon));
    j["alpha_sq_tot"] = t.alpha_sq_tot;
    j["delta_alpha_sq"] = t.delta_alpha_sq;
  }
  if (r.bootstrap) {
    const auto& b = *r.bootstrap;
    j["bootstrap"] = {{"point", b.point},         {"std_error", b.std_error},     {"ci_low", b.ci_low},
                      {"ci_high", b.ci_high},     {"n_resamples", b.n_resamples}, {"resample_size", b.resample_size}};
    j["within_4se"] = *r.within_4se();
  }
  return j;
}

}  // namespace microrev::cli
