// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// The assembled pipeline: frozen backbone (image/text encoders plus the
// multi-view renderer) and the trainable head (adapters, decoder, fusion).

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvfsad/adaptation.hpp"
#include "mvfsad/encoder.hpp"
#include "mvfsad/fusion.hpp"
#include "mvfsad/geometry.hpp"
#include "mvfsad/renderer.hpp"

namespace mvfsad {

struct ModelConfig {
  EncoderConfig encoder;
  AdapterConfig adapter;
  DecoderConfig decoder;
  FusionConfig fusion;
  bool use_multiview = true;
  double gamma = kSimilarityTemperature;  // similarity-map temperature
  double tau = 0.07;                      // classification-score temperature
  std::array<double, 3> view_angles = default_view_angles();
  std::array<double, 3> background{0.0, 0.0, 0.0};
  std::string class_name = "object";
  std::vector<std::string> normal_prompts;     // empty -> built-in ensemble
  std::vector<std::string> anomalous_prompts;  // empty -> built-in ensemble

  void validate() const;
  RenderSettings render_settings() const;
};

/// Frozen encoder outputs for one image and, with multi-view on, its views.
struct FrozenFeatures {
  EmbeddingBundle image;
  std::vector<EmbeddingBundle> views;
};

class FrozenBackbone {
 public:
  explicit FrozenBackbone(const ModelConfig& config);

  /// Encodes `image`; when multi-view is on also renders the selected views of
  /// `cloud` textured with `image` and encodes each of them.
  FrozenFeatures extract(const Image& image, const PointCloudGrid& cloud) const;
  std::vector<RenderedView> render_views(const Image& texture, const PointCloudGrid& cloud) const;

  const ImageEncoder& image_encoder() const { return image_; }
  const TextEncoder& text_encoder() const { return text_; }
  const Matrix& text_normal() const { return t_plus_; }
  const Matrix& text_anomalous() const { return t_minus_; }
  ParamList parameters() const;
  const ModelConfig& config() const { return config_; }

 private:
  ModelConfig config_;
  ImageEncoder image_;
  TextEncoder text_;
  Matrix t_plus_;
  Matrix t_minus_;
};

struct AdaptedText {
  Tensor class_normal;     // 1 x C
  Tensor class_anomalous;  // 1 x C
  Tensor seg;              // 2 x C, normal row first
};

struct HeadOutput {
  Tensor image_embedding;  // adapted (and enhanced) CLS, 1 x C
  Tensor local;            // N_p x C
  Tensor similarity;       // N_p x 2
  Tensor map;              // H x W anomaly map
};

/// Names of the optimizer groups, in order.
inline constexpr std::array<const char*, 5> kParamGroups{"class_text_adapter", "seg_text_adapter", "image_adapter",
                                                         "decoder", "fusion"};

class TrainableHead {
 public:
  /// With build_fusion false the fusion branches are never constructed.
  TrainableHead(const ModelConfig& config, std::uint64_t seed, bool build_fusion);

  AdaptedText adapt_text(const Matrix& t_plus, const Matrix& t_minus) const;
  HeadOutput forward(const FrozenFeatures& features, const Tensor& seg_text) const;

  bool fusion_active() const { return config_.use_multiview && global_.has_value(); }
  bool has_fusion() const { return global_.has_value(); }

  /// Parameters prefixed with their group name ("decoder.block0.attn...").
  ParamList parameters() const;
  ParamList group_parameters(const std::string& group) const;

  Adapter& image_adapter() { return image_adapter_; }
  Adapter& class_text_adapter() { return class_text_adapter_; }
  Adapter& seg_text_adapter() { return seg_text_adapter_; }
  const CoarseToFineDecoder& decoder() const { return decoder_; }
  const ModelConfig& config() const { return config_; }

 private:
  ModelConfig config_;
  Adapter class_text_adapter_;
  Adapter seg_text_adapter_;
  Adapter image_adapter_;
  CoarseToFineDecoder decoder_;
  std::optional<GlobalFusion> global_;
  std::optional<LocalFusion> local_;
};

/// Matrix view of a rendered map tensor.
ScalarMap to_scalar_map(const Tensor& map);

}  // namespace mvfsad
