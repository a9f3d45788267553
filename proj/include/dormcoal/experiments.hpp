#ifndef DORMCOAL_EXPERIMENTS_HPP
#define DORMCOAL_EXPERIMENTS_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "dormcoal/analysis.hpp"
#include "dormcoal/lambda_measure.hpp"
#include "dormcoal/model.hpp"

namespace dormcoal {

// JSON <-> domain object bridges (the CLI config schema; see README).
nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);
LambdaMeasure measure_from_json(const nlohmann::json& j);
RegimeSpec regime_from_json(const nlohmann::json& j);

// FNV-1a hash of the canonical (sorted-key) dump, hex-encoded; stamped into
// every output header so results are traceable to their resolved config.
std::string config_hash(const nlohmann::json& resolved);

// Experiment entry points. Each resolves defaults into `config`, runs, writes
// CSV outputs plus a <command>_summary.json under config["out"], and returns
// the summary. Throws std::invalid_argument for config errors (exit 1 at the
// CLI) and other exceptions for runtime failures (exit 2).
nlohmann::json cmd_forward(nlohmann::json config);
nlohmann::json cmd_genealogy(nlohmann::json config);
nlohmann::json cmd_coalescent(nlohmann::json config);
nlohmann::json cmd_verify(nlohmann::json config);
nlohmann::json cmd_construct(nlohmann::json config);

}  // namespace dormcoal

#endif
