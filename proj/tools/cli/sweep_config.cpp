#include "sweep_config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "io.hpp"
#include "microrev/reversibility.hpp"

namespace microrev::cli {

namespace {

std::vector<ComplexAmplitude> reals(std::initializer_list<double> xs) { return {xs.begin(), xs.end()}; }

template <class T>
std::vector<T> list_of(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw UsageError(std::string(key) + " must be an array");
  return j.get<std::vector<T>>();
}

std::vector<ComplexAmplitude> amplitude_list(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw UsageError(std::string(key) + " must be an array");
  std::vector<ComplexAmplitude> out;
  for (const auto& item : j) out.push_back(amplitude_from_json(item));
  return out;
}

void require_non_empty(bool empty, const char* what) {
  if (empty) throw UsageError(std::string(what) + " must not be empty");
}

void validate_common(const SweepConfig& cfg) {
  require_non_empty(cfg.amplitudes_i.empty(), "amplitudes_i");
  require_non_empty(cfg.amplitudes_f.empty(), "amplitudes_f");
  for (double n : cfg.nth_list) {
    if (!(n > 0.0) || !std::isfinite(n)) throw UsageError("nth_list entries must be finite and > 0");
  }
  for (double b : cfg.beta_list) {
    if (!(b > 0.0) || !std::isfinite(b)) throw UsageError("beta_list entries must be finite and > 0");
  }
}

}  // namespace

SweepConfig default_fig3_config() {
  SweepConfig cfg;
  cfg.amplitudes_i = reals({1.46, 2.0, 2.4, 2.8, 3.36});
  cfg.amplitudes_f = reals({1.0, 2.0});
  cfg.nth_list = {1.22, 1.62, 2.4, 3.57};
  // 85% reflectivity for n_th = 1.62, 70% for the others.
  cfg.tau_list = {0.3, 0.15, 0.3, 0.3};
  cfg.nth_phases = {{1.22, std::numbers::pi / 4.0}};
  cfg.output_path = "fig3.csv";
  return cfg;
}

SweepConfig default_upsilon_config() {
  SweepConfig cfg;
  cfg.amplitudes_i = reals({1.0, 1.5, 2.0, 2.5, 3.0, 3.36});
  cfg.amplitudes_f = cfg.amplitudes_i;
  cfg.nth_list = {1.22, 1.62, 2.4, 3.57};
  cfg.beta_list = {0.01, 0.1, 0.25, 0.58, 1.0};
  cfg.engines = {"analytic"};
  cfg.output_path = "upsilon.csv";
  return cfg;
}

void apply_config_json(SweepConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "amplitudes_i") {
        cfg.amplitudes_i = amplitude_list(value, "amplitudes_i");
      } else if (key == "amplitudes_f") {
        cfg.amplitudes_f = amplitude_list(value, "amplitudes_f");
      } else if (key == "nth_list") {
        cfg.nth_list = list_of<double>(value, "nth_list");
      } else if (key == "beta_list") {
        cfg.beta_list = list_of<double>(value, "beta_list");
      } else if (key == "tau_list") {
        cfg.tau_list = list_of<double>(value, "tau_list");
      } else if (key == "tau_mode") {
        cfg.tau_mode = value.get<std::string>();
      } else if (key == "nth_phases") {
        cfg.nth_phases.clear();
        for (const auto& item : value) cfg.nth_phases.push_back({item.at("n_th").get<double>(), item.at("phase").get<double>()});
      } else if (key == "engines") {
        cfg.engines = list_of<std::string>(value, "engines");
      } else if (key == "mc_samples") {
        cfg.mc_samples = value.get<std::size_t>();
      } else if (key == "base_seed") {
        cfg.base_seed = value.get<std::uint64_t>();
      } else if (key == "n_resamples") {
        cfg.n_resamples = value.get<std::size_t>();
      } else if (key == "resample_size") {
        cfg.resample_size = value.get<std::size_t>();
      } else if (key == "fock_dim") {
        cfg.fock_dim = value.get<std::size_t>();
      } else if (key == "fock_tail_budget") {
        cfg.fock_tail_budget = value.get<double>();
      } else if (key == "output_path") {
        cfg.output_path = value.get<std::string>();
      } else {
        throw UsageError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
}

void load_config_file(SweepConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + e.what());
  }
  apply_config_json(cfg, j);
}

nlohmann::json config_to_json(const SweepConfig& cfg) {
  nlohmann::json ai = nlohmann::json::array(), af = nlohmann::json::array(), phases = nlohmann::json::array();
  for (const auto& a : cfg.amplitudes_i) ai.push_back(amplitude_to_json(a));
  for (const auto& a : cfg.amplitudes_f) af.push_back(amplitude_to_json(a));
  for (const auto& p : cfg.nth_phases) phases.push_back({{"n_th", p.n_th}, {"phase", p.phase}});
  return {{"amplitudes_i", ai},
          {"amplitudes_f", af},
          {"nth_list", cfg.nth_list},
          {"beta_list", cfg.beta_list},
          {"tau_list", cfg.tau_list},
          {"tau_mode", cfg.tau_mode},
          {"nth_phases", phases},
          {"engines", cfg.engines},
          {"mc_samples", cfg.mc_samples},
          {"base_seed", cfg.base_seed},
          {"n_resamples", cfg.n_resamples},
          {"resample_size", cfg.resample_size},
          {"fock_dim", cfg.fock_dim},
          {"fock_tail_budget", cfg.fock_tail_budget},
          {"output_path", cfg.output_path}};
}

std::vector<BathSpec> sweep_baths(const SweepConfig& cfg) {
  std::vector<BathSpec> baths;
  try {
    for (double n : cfg.nth_list) baths.push_back(BathSpec::from_nth(n));
    for (double b : cfg.beta_list) baths.push_back(BathSpec::from_beta(b));
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return baths;
}

void validate_fig3(const SweepConfig& cfg) {
  validate_common(cfg);
  require_non_empty(cfg.nth_list.empty(), "nth_list");
  require_non_empty(cfg.tau_list.empty(), "tau_list");
  require_non_empty(cfg.engines.empty(), "engines");
  for (const auto& e : cfg.engines) {
    if (parse_engine(e) == RecordEngine::MonteCarlo && cfg.mc_samples < 3) {
      throw UsageError("mc_samples must be at least 3 for montecarlo rows");
    }
  }
  if (std::set<std::string>(cfg.engines.begin(), cfg.engines.end()).size() != cfg.engines.size()) {
    throw UsageError("engines must not repeat");
  }
  for (double t : cfg.tau_list) {
    if (!(t >= 0.0 && t <= 1.0)) throw UsageError("tau_list entries must lie in [0, 1]");
  }
  const std::size_t n_baths = cfg.nth_list.size() + cfg.beta_list.size();
  if (cfg.tau_mode == "paired") {
    if (cfg.tau_list.size() != 1 && cfg.tau_list.size() != n_baths) {
      throw UsageError("paired tau_list needs one entry or one per bath");
    }
  } else if (cfg.tau_mode != "grid") {
    throw UsageError("tau_mode must be 'paired' or 'grid'");
  }
  if (cfg.n_resamples < 1 || cfg.resample_size < 1) throw UsageError("bootstrap sizes must be positive");
  if (cfg.fock_dim < 2) throw UsageError("fock_dim must be at least 2");
  if (!(cfg.fock_tail_budget > 0.0)) throw UsageError("fock_tail_budget must be > 0");
}

void validate_upsilon(const SweepConfig& cfg) {
  validate_common(cfg);
  require_non_empty(cfg.nth_list.empty() && cfg.beta_list.empty(), "nth_list and beta_list together");
}

std::vector<TransitionQuery> fig3_queries(const SweepConfig& cfg) {
  const auto baths = sweep_baths(cfg);
  std::vector<std::pair<std::size_t, double>> bath_tau;  // (bath index, tau)
  for (std::size_t b = 0; b < baths.size(); ++b) {
    if (cfg.tau_mode == "grid") {
      for (double t : cfg.tau_list) bath_tau.emplace_back(b, t);
    } else {
      bath_tau.emplace_back(b, cfg.tau_list.size() == 1 ? cfg.tau_list[0] : cfg.tau_list[b]);
    }
  }
  std::vector<TransitionQuery> out;
  for (const auto& [b, tau] : bath_tau) {
    const BathSpec& bath = baths[b];
    double phase = 0.0;
    for (const auto& p : cfg.nth_phases) {
      if (std::abs(p.n_th - bath.n_th()) <= 1e-12 * p.n_th) phase = p.phase;
    }
    for (const auto& ai : cfg.amplitudes_i) {
      for (const auto& af : cfg.amplitudes_f) {
        out.push_back({ai.rotated(phase), af.rotated(phase), bath, BeamSplitterSpec::from_tau(tau)});
      }
    }
  }
  return out;
}

}  // namespace microrev::cli
