// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/model.hpp"

#include "mvfsad/errors.hpp"
#include "mvfsad/prompts.hpp"

namespace mvfsad {

void ModelConfig::validate() const {
  encoder.validate();
  if (!(gamma > 0.0) || !(tau > 0.0)) throw InvalidArgument("ModelConfig: temperatures must be positive");
  if (use_multiview) {
    if (fusion.view_indices.empty()) throw InvalidArgument("ModelConfig: multi-view needs at least one view");
    for (const int i : fusion.view_indices) {
      if (i < 1 || i > 27) throw InvalidArgument("ModelConfig: view index outside 1..27");
    }
  }
}

RenderSettings ModelConfig::render_settings() const {
  return {encoder.image_size, encoder.image_size, background};
}

namespace {

PromptSet prompt_set(const std::vector<std::string>& prompts, const std::string& class_name, bool normal) {
  if (prompts.empty()) return normal ? default_normal_prompts(class_name) : default_anomalous_prompts(class_name);
  return {prompts, class_name};
}

}  // namespace

FrozenBackbone::FrozenBackbone(const ModelConfig& config)
    : config_(config), image_(config.encoder), text_(config.encoder) {
  config_.validate();
  t_plus_ = text_.encode(prompt_set(config_.normal_prompts, config_.class_name, true));
  t_minus_ = text_.encode(prompt_set(config_.anomalous_prompts, config_.class_name, false));
}

std::vector<RenderedView> FrozenBackbone::render_views(const Image& texture, const PointCloudGrid& cloud) const {
  const RenderSettings settings = config_.render_settings();
  const ViewRig rig = make_view_rig(cloud, settings);
  const auto grid = view_grid(config_.view_angles);
  return render_selected(rig.cloud, texture, grid, config_.fusion.view_indices, rig.camera, settings);
}

FrozenFeatures FrozenBackbone::extract(const Image& image, const PointCloudGrid& cloud) const {
  FrozenFeatures out;
  out.image = image_.encode(image);
  if (config_.use_multiview) {
    for (const auto& view : render_views(image, cloud)) out.views.push_back(image_.encode(view.image));
  }
  return out;
}

ParamList FrozenBackbone::parameters() const {
  ParamList out = image_.parameters();
  for (auto& p : text_.parameters()) out.push_back(std::move(p));
  return out;
}

TrainableHead::TrainableHead(const ModelConfig& config, std::uint64_t seed, bool build_fusion) : config_(config) {
  config_.validate();
  const int c = config_.encoder.joint_dim;
  const int d = config_.encoder.feature_dim;
  // Independent streams per module: dropping one never shifts another's init.
  Rng r_cg(derive_seed(seed, "class_text_adapter"));
  class_text_adapter_ = Adapter(c, config_.adapter, r_cg);
  Rng r_sg(derive_seed(seed, "seg_text_adapter"));
  seg_text_adapter_ = Adapter(c, config_.adapter, r_sg);
  Rng r_f(derive_seed(seed, "image_adapter"));
  image_adapter_ = Adapter(c, config_.adapter, r_f);
  Rng r_dec(derive_seed(seed, "decoder"));
  decoder_ = CoarseToFineDecoder(d, c, config_.encoder.stages, config_.decoder, r_dec);
  if (build_fusion) {
    const int views = config_.fusion.view_count();
    Rng r_g(derive_seed(seed, "fusion.global"));
    global_.emplace(c, views, config_.fusion.se_reduction, r_g);
    Rng r_l(derive_seed(seed, "fusion.local"));
    local_.emplace(d, c, views, config_.fusion, r_l);
  }
}

AdaptedText TrainableHead::adapt_text(const Matrix& t_plus, const Matrix& t_minus) const {
  const Tensor tp = Tensor::constant(t_plus);
  const Tensor tm = Tensor::constant(t_minus);
  const Tensor seg_rows[] = {seg_text_adapter_.forward(tp), seg_text_adapter_.forward(tm)};
  return {class_text_adapter_.forward(tp), class_text_adapter_.forward(tm), ops::concat_rows(seg_rows)};
}

HeadOutput TrainableHead::forward(const FrozenFeatures& features, const Tensor& seg_text) const {
  HeadOutput out;
  std::map<int, Tensor> stages;
  for (const auto& [l, f] : features.image.stages) stages.emplace(l, Tensor::constant(f));
  out.image_embedding = image_adapter_.forward(Tensor::constant(features.image.cls));
  out.local = decoder_.forward(stages);

  if (fusion_active()) {
    if (static_cast<int>(features.views.size()) != global_->views()) {
      throw InvalidArgument("TrainableHead: expected " + std::to_string(global_->views()) + " view embeddings");
    }
    const int last_stage = config_.encoder.stages.back();
    std::vector<Tensor> cls_views;
    std::vector<Tensor> feat_views;
    for (const auto& v : features.views) {
      cls_views.push_back(Tensor::constant(v.cls));
      feat_views.push_back(Tensor::constant(v.stages.at(last_stage)));
    }
    out.image_embedding = enhance(out.image_embedding, global_->forward(cls_views));
    out.local = enhance(out.local, local_->forward(feat_views));
  }

  out.similarity = similarity_map(out.local, seg_text, config_.gamma);
  out.map = anomaly_map(out.similarity, config_.encoder.image_size, config_.encoder.image_size);
  return out;
}

ParamList TrainableHead::group_parameters(const std::string& group) const {
  ParamList out;
  if (group == "class_text_adapter") {
    class_text_adapter_.collect(out, group);
  } else if (group == "seg_text_adapter") {
    seg_text_adapter_.collect(out, group);
  } else if (group == "image_adapter") {
    image_adapter_.collect(out, group);
  } else if (group == "decoder") {
    decoder_.collect(out, group);
  } else if (group == "fusion") {
    if (global_) global_->collect(out, "fusion.global");
    if (local_) local_->collect(out, "fusion.local");
  } else {
    throw InvalidArgument("unknown parameter group " + group);
  }
  return out;
}

ParamList TrainableHead::parameters() const {
  ParamList out;
  for (const char* g : kParamGroups) {
    for (auto& p : group_parameters(g)) out.push_back(std::move(p));
  }
  return out;
}

ScalarMap to_scalar_map(const Tensor& map) {
  ScalarMap out(static_cast<int>(map.rows()), static_cast<int>(map.cols()));
  Eigen::Map<Matrix>(out.values.data(), map.rows(), map.cols()) = map.value();
  return out;
}

}  // namespace mvfsad
