// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Frozen stand-in for a CLIP-style image/text encoder pair. Weights are drawn
// once from a seed and never receive gradients.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mvfsad/image.hpp"
#include "mvfsad/nn.hpp"
#include "mvfsad/tensor.hpp"

namespace mvfsad {

struct EncoderConfig {
  int image_size = 240;
  int patch_size = 16;
  int depth = 12;
  int heads = 4;
  int mlp_ratio = 4;
  int feature_dim = 64;  // D
  int joint_dim = 64;    // C
  std::vector<int> stages{6, 9, 12};
  int text_vocab = 4096;
  std::uint64_t weight_seed = 0x5eedc11bULL;

  void validate() const;
  int grid_side() const { return image_size / patch_size; }
  int patch_count() const { return grid_side() * grid_side(); }
};

/// CLS token in the joint space plus raw patch features per selected block.
struct EmbeddingBundle {
  Matrix cls;                    // 1 x C
  std::map<int, Matrix> stages;  // block index -> N_p x D
};

/// Prompt templates with `{}` standing for the class name.
struct PromptSet {
  std::vector<std::string> prompts;
  std::string class_name = "object";

  std::vector<std::string> rendered() const;
};

class ImageEncoder {
 public:
  explicit ImageEncoder(const EncoderConfig& config);

  EmbeddingBundle encode(const Image& image) const;
  const EncoderConfig& config() const { return config_; }
  ParamList parameters() const;

 private:
  Matrix patchify(const Image& image) const;

  EncoderConfig config_;
  Linear patch_embed_;
  Tensor cls_token_;
  Tensor pos_embed_;
  LayerNorm ln_pre_;
  std::vector<TransformerBlock> blocks_;
  LayerNorm ln_post_;
  Linear proj_;
};

class TextEncoder {
 public:
  explicit TextEncoder(const EncoderConfig& config);

  /// Embedding of one prompt (1 x C).
  Matrix encode_prompt(const std::string& prompt) const;
  /// Arithmetic mean of the prompt embeddings; throws on an empty set.
  Matrix encode(const PromptSet& set) const;
  ParamList parameters() const;

 private:
  EncoderConfig config_;
  Tensor table_;
  LayerNorm norm_;
  Linear proj_;
};

/// Word tokens used by the text encoder (lower-cased, punctuation stripped).
std::vector<std::string> tokenize(const std::string& text);

}  // namespace mvfsad
