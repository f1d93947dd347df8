// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON (de)serialization of the model and training configuration. Every
// field is optional on input and falls back to its default.

#pragma once

#include <string>

#include <json.hpp>

#include "mvfsad/model.hpp"
#include "mvfsad/trainer.hpp"

namespace mvfsad {

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
};

nlohmann::json to_json(const ModelConfig& config);
nlohmann::json to_json(const TrainConfig& config);
nlohmann::json to_json(const RunConfig& config);

ModelConfig model_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j);
/// Expects {"model": {...}, "train": {...}}; either part may be missing.
RunConfig run_config_from_json(const nlohmann::json& j);

RunConfig load_run_config(const std::string& path);
void save_run_config(const std::string& path, const RunConfig& config);

}  // namespace mvfsad
