#pragma once

// Sweep description shared by sweep-fig3 and sweep-upsilon. A config file is
// one JSON object with the same field names; keys that are absent keep their
// defaults and command-line flags are applied on top.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "microrev/types.hpp"
#include "records.hpp"

namespace microrev::cli {

/// Rotates both amplitudes of every row at the given n_th by `phase`.
struct NthPhase {
  double n_th = 0.0;
  double phase = 0.0;
};

struct SweepConfig {
  std::vector<ComplexAmplitude> amplitudes_i;
  std::vector<ComplexAmplitude> amplitudes_f;
  std::vector<double> nth_list;
  std::vector<double> beta_list;
  std::vector<double> tau_list;
  /// "paired": tau_list[k] goes with the k-th bath (or one tau for all);
  /// "grid": every bath with every tau.
  std::string tau_mode = "paired";
  std::vector<NthPhase> nth_phases;
  std::vector<std::string> engines{"analytic", "montecarlo"};
  std::size_t mc_samples = 50000;
  std::uint64_t base_seed = 20240611;
  std::size_t n_resamples = 1000;
  std::size_t resample_size = 1000;
  std::size_t fock_dim = 80;
  double fock_tail_budget = 1e-10;
  std::string output_path;
};

SweepConfig default_fig3_config();
SweepConfig default_upsilon_config();

/// Overwrites the fields present in `j`. Unknown keys are a UsageError.
void apply_config_json(SweepConfig& cfg, const nlohmann::json& j);
void load_config_file(SweepConfig& cfg, const std::string& path);

nlohmann::json config_to_json(const SweepConfig& cfg);

/// Baths in row order: nth_list first, then beta_list.
std::vector<BathSpec> sweep_baths(const SweepConfig& cfg);

/// Queries of a fig3 sweep in row order (bath, tau, alpha_i, alpha_f).
std::vector<TransitionQuery> fig3_queries(const SweepConfig& cfg);

/// Checks list sizes and domains; throws UsageError.
void validate_fig3(const SweepConfig& cfg);
void validate_upsilon(const SweepConfig& cfg);

}  // namespace microrev::cli
