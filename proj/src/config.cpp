// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/config.hpp"

#include <fstream>

#include "mvfsad/errors.hpp"

namespace mvfsad {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
  }
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw InvalidArgument(std::string(what) + " must be a JSON object");
}

}  // namespace

json to_json(const ModelConfig& c) {
  return {
      {"encoder",
       {{"image_size", c.encoder.image_size},
        {"patch_size", c.encoder.patch_size},
        {"depth", c.encoder.depth},
        {"heads", c.encoder.heads},
        {"mlp_ratio", c.encoder.mlp_ratio},
        {"feature_dim", c.encoder.feature_dim},
        {"joint_dim", c.encoder.joint_dim},
        {"stages", c.encoder.stages},
        {"text_vocab", c.encoder.text_vocab},
        {"weight_seed", c.encoder.weight_seed}}},
      {"adapter", {{"hidden_ratio", c.adapter.hidden_ratio}, {"alpha", c.adapter.alpha}}},
      {"decoder", {{"blocks", c.decoder.blocks}, {"heads", c.decoder.heads}, {"mlp_ratio", c.decoder.mlp_ratio}}},
      {"fusion",
       {{"view_indices", c.fusion.view_indices},
        {"se_reduction", c.fusion.se_reduction},
        {"blocks", c.fusion.blocks},
        {"heads", c.fusion.heads},
        {"mlp_ratio", c.fusion.mlp_ratio}}},
      {"use_multiview", c.use_multiview},
      {"gamma", c.gamma},
      {"tau", c.tau},
      {"view_angles", c.view_angles},
      {"background", c.background},
      {"class_name", c.class_name},
      {"normal_prompts", c.normal_prompts},
      {"anomalous_prompts", c.anomalous_prompts},
  };
}

json to_json(const TrainConfig& c) {
  return {
      {"shots", c.shots},
      {"epochs", c.epochs},
      {"seed", c.seed},
      {"lr_class_text_adapter", c.lr_class_text_adapter},
      {"lr_seg_text_adapter", c.lr_seg_text_adapter},
      {"lr_image_adapter", c.lr_image_adapter},
      {"lr_decoder", c.lr_decoder},
      {"lr_fusion", c.lr_fusion},
      {"adam", {{"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"eps", c.adam.eps}}},
      {"perlin_min_log2", c.perlin_min_log2},
      {"perlin_max_log2", c.perlin_max_log2},
      {"perlin_threshold", c.perlin_threshold},
      {"mask_retries", c.mask_retries},
  };
}

json to_json(const RunConfig& c) { return {{"model", to_json(c.model)}, {"train", to_json(c.train)}}; }

ModelConfig model_config_from_json(const json& j) {
  require_object(j, "model config");
  ModelConfig c;
  if (j.contains("encoder")) {
    const json& e = j.at("encoder");
    require_object(e, "encoder config");
    read_field(e, "image_size", c.encoder.image_size);
    read_field(e, "patch_size", c.encoder.patch_size);
    read_field(e, "depth", c.encoder.depth);
    read_field(e, "heads", c.encoder.heads);
    read_field(e, "mlp_ratio", c.encoder.mlp_ratio);
    read_field(e, "feature_dim", c.encoder.feature_dim);
    read_field(e, "joint_dim", c.encoder.joint_dim);
    read_field(e, "stages", c.encoder.stages);
    read_field(e, "text_vocab", c.encoder.text_vocab);
    read_field(e, "weight_seed", c.encoder.weight_seed);
  }
  if (j.contains("adapter")) {
    const json& a = j.at("adapter");
    require_object(a, "adapter config");
    read_field(a, "hidden_ratio", c.adapter.hidden_ratio);
    read_field(a, "alpha", c.adapter.alpha);
  }
  if (j.contains("decoder")) {
    const json& d = j.at("decoder");
    require_object(d, "decoder config");
    read_field(d, "blocks", c.decoder.blocks);
    read_field(d, "heads", c.decoder.heads);
    read_field(d, "mlp_ratio", c.decoder.mlp_ratio);
  }
  if (j.contains("fusion")) {
    const json& f = j.at("fusion");
    require_object(f, "fusion config");
    read_field(f, "view_indices", c.fusion.view_indices);
    read_field(f, "se_reduction", c.fusion.se_reduction);
    read_field(f, "blocks", c.fusion.blocks);
    read_field(f, "heads", c.fusion.heads);
    read_field(f, "mlp_ratio", c.fusion.mlp_ratio);
  }
  read_field(j, "use_multiview", c.use_multiview);
  read_field(j, "gamma", c.gamma);
  read_field(j, "tau", c.tau);
  read_field(j, "view_angles", c.view_angles);
  read_field(j, "background", c.background);
  read_field(j, "class_name", c.class_name);
  read_field(j, "normal_prompts", c.normal_prompts);
  read_field(j, "anomalous_prompts", c.anomalous_prompts);
  c.validate();
  return c;
}

TrainConfig train_config_from_json(const json& j) {
  require_object(j, "train config");
  TrainConfig c;
  read_field(j, "shots", c.shots);
  read_field(j, "epochs", c.epochs);
  read_field(j, "seed", c.seed);
  read_field(j, "lr_class_text_adapter", c.lr_class_text_adapter);
  read_field(j, "lr_seg_text_adapter", c.lr_seg_text_adapter);
  read_field(j, "lr_image_adapter", c.lr_image_adapter);
  read_field(j, "lr_decoder", c.lr_decoder);
  read_field(j, "lr_fusion", c.lr_fusion);
  if (j.contains("adam")) {
    const json& a = j.at("adam");
    require_object(a, "adam config");
    read_field(a, "beta1", c.adam.beta1);
    read_field(a, "beta2", c.adam.beta2);
    read_field(a, "eps", c.adam.eps);
  }
  read_field(j, "perlin_min_log2", c.perlin_min_log2);
  read_field(j, "perlin_max_log2", c.perlin_max_log2);
  read_field(j, "perlin_threshold", c.perlin_threshold);
  read_field(j, "mask_retries", c.mask_retries);
  c.validate();
  return c;
}

RunConfig run_config_from_json(const json& j) {
  require_object(j, "config");
  RunConfig c;
  if (j.contains("model")) c.model = model_config_from_json(j.at("model"));
  if (j.contains("train")) c.train = train_config_from_json(j.at("train"));
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw IoError("cannot parse config " + path + ": " + e.what());
  }
  return run_config_from_json(j);
}

void save_run_config(const std::string& path, const RunConfig& config) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << to_json(config).dump(2) << "\n";
}

}  // namespace mvfsad
