#pragma once

// One output row per (query, engine): the flattened query, the derived
// transition quantities and, for Monte Carlo rows, the bootstrap estimate.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "microrev/heterodyne.hpp"
#include "microrev/reversibility.hpp"

namespace microrev::cli {

enum class RecordEngine { Analytic, Fock, MonteCarlo };

std::string engine_name(RecordEngine e);
RecordEngine parse_engine(const std::string& name);

struct ResultRecord {
  RecordEngine engine = RecordEngine::Analytic;
  TransitionQuery query;
  std::optional<TransitionResult> result;  // empty when the row failed
  std::optional<heterodyne::BootstrapEstimate> bootstrap;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
  /// |log_ratio - predicted| < 4 std_error; only defined for Monte Carlo rows.
  std::optional<bool> within_4se() const;
};

/// Evaluates one row; library failures become a non-ok status instead of
/// propagating.
ResultRecord evaluate_record(const TransitionQuery& q, RecordEngine engine, const fock::OracleOptions& fock_opts,
                             std::size_t mc_samples, std::uint64_t seed, const heterodyne::BootstrapOptions& boot);

const std::vector<std::string>& record_csv_header();
std::vector<std::string> record_csv_fields(const ResultRecord& r);

nlohmann::json record_to_json(const ResultRecord& r);

}  // namespace microrev::cli
