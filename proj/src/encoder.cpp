// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "mvfsad/errors.hpp"

namespace mvfsad {
namespace {

constexpr double kPixelMean[3] = {0.48145466, 0.4578275, 0.40821073};
constexpr double kPixelStd[3] = {0.26862954, 0.26130258, 0.27577711};

Matrix gaussian(int rows, int cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = stddev * rng.normal();
  return m;
}

}  // namespace

void EncoderConfig::validate() const {
  if (patch_size <= 0 || image_size <= 0 || image_size % patch_size != 0) {
    throw InvalidArgument("EncoderConfig: image_size must be a positive multiple of patch_size");
  }
  if (feature_dim < 8 || joint_dim < 8) throw InvalidArgument("EncoderConfig: dims must be >= 8");
  if (depth < 1) throw InvalidArgument("EncoderConfig: depth must be >= 1");
  if (heads < 1 || feature_dim % heads != 0) throw InvalidArgument("EncoderConfig: heads must divide feature_dim");
  if (stages.empty()) throw InvalidArgument("EncoderConfig: stage set is empty");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i] < 1 || stages[i] > depth) throw InvalidArgument("EncoderConfig: stage outside 1..depth");
    if (i > 0 && stages[i] <= stages[i - 1]) throw InvalidArgument("EncoderConfig: stages must be increasing");
  }
  if (text_vocab < 1) throw InvalidArgument("EncoderConfig: text_vocab must be >= 1");
}

std::vector<std::string> PromptSet::rendered() const {
  std::vector<std::string> out;
  out.reserve(prompts.size());
  for (const auto& p : prompts) {
    std::string s = p;
    for (auto pos = s.find("{}"); pos != std::string::npos; pos = s.find("{}", pos + class_name.size())) {
      s.replace(pos, 2, class_name);
    }
    out.push_back(std::move(s));
  }
  return out;
}

ImageEncoder::ImageEncoder(const EncoderConfig& config) : config_(config) {
  config_.validate();
  const int d = config_.feature_dim;
  const int patch_dim = 3 * config_.patch_size * config_.patch_size;
  const double token_scale = 1.0 / std::sqrt(static_cast<double>(d));
  {
    Rng rng(derive_seed(config_.weight_seed, "image.embed"));
    patch_embed_ = Linear(patch_dim, d, rng, Trainable::kNo, false);
    cls_token_ = Tensor::constant(gaussian(1, d, token_scale, rng));
    pos_embed_ = Tensor::constant(gaussian(config_.patch_count() + 1, d, token_scale, rng));
    ln_pre_ = LayerNorm(d, Trainable::kNo);
  }
  // Each block has its own stream so block l is the same whatever the depth.
  for (int l = 1; l <= config_.depth; ++l) {
    Rng rng(derive_seed(config_.weight_seed, "image.block." + std::to_string(l)));
    blocks_.emplace_back(d, config_.heads, config_.mlp_ratio, rng, Trainable::kNo);
  }
  Rng rng(derive_seed(config_.weight_seed, "image.head"));
  ln_post_ = LayerNorm(d, Trainable::kNo);
  proj_ = Linear(d, config_.joint_dim, rng, Trainable::kNo, false);
}

Matrix ImageEncoder::patchify(const Image& image) const {
  const int p = config_.patch_size;
  const int side = config_.grid_side();
  Matrix patches(config_.patch_count(), 3 * p * p);
  for (int pr = 0; pr < side; ++pr) {
    for (int pc = 0; pc < side; ++pc) {
      auto row = patches.row(pr * side + pc);
      Eigen::Index k = 0;
      for (int ch = 0; ch < 3; ++ch) {
        for (int y = 0; y < p; ++y) {
          for (int x = 0; x < p; ++x) {
            row(k++) = (image.at(pr * p + y, pc * p + x, ch) - kPixelMean[ch]) / kPixelStd[ch];
          }
        }
      }
    }
  }
  return patches;
}

EmbeddingBundle ImageEncoder::encode(const Image& image) const {
  if (image.height != config_.image_size || image.width != config_.image_size) {
    throw InvalidArgument("ImageEncoder: expected " + std::to_string(config_.image_size) + "x" +
                          std::to_string(config_.image_size) + " input, got " + std::to_string(image.height) + "x" +
                          std::to_string(image.width));
  }
  const Tensor patches = Tensor::constant(patchify(image));
  const Tensor tokens[] = {cls_token_, patch_embed_.forward(patches)};
  Tensor x = ln_pre_.forward(ops::add(ops::concat_rows(tokens), pos_embed_));

  EmbeddingBundle out;
  const int np = config_.patch_count();
  for (int l = 1; l <= config_.depth; ++l) {
    x = blocks_[static_cast<std::size_t>(l - 1)].forward(x);
    if (std::find(config_.stages.begin(), config_.stages.end(), l) != config_.stages.end()) {
      out.stages.emplace(l, x.value().bottomRows(np));
    }
  }
  out.cls = proj_.forward(ln_post_.forward(ops::slice_rows(x, 0, 1))).value();
  return out;
}

ParamList ImageEncoder::parameters() const {
  ParamList out;
  patch_embed_.collect(out, "image.patch_embed");
  out.push_back({"image.cls_token", cls_token_});
  out.push_back({"image.pos_embed", pos_embed_});
  ln_pre_.collect(out, "image.ln_pre");
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i].collect(out, "image.block" + std::to_string(i + 1));
  ln_post_.collect(out, "image.ln_post");
  proj_.collect(out, "image.proj");
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isalnum(u) || u >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TextEncoder::TextEncoder(const EncoderConfig& config) : config_(config) {
  config_.validate();
  Rng rng(derive_seed(config_.weight_seed, "text"));
  table_ = Tensor::constant(gaussian(config_.text_vocab, config_.feature_dim, 1.0, rng));
  norm_ = LayerNorm(config_.feature_dim, Trainable::kNo);
  proj_ = Linear(config_.feature_dim, config_.joint_dim, rng, Trainable::kNo, false);
}

Matrix TextEncoder::encode_prompt(const std::string& prompt) const {
  const auto tokens = tokenize(prompt);
  if (tokens.empty()) throw InvalidArgument("TextEncoder: prompt has no tokens");
  Matrix pooled = Matrix::Zero(1, config_.feature_dim);
  for (const auto& t : tokens) {
    const auto id = static_cast<Eigen::Index>(fnv1a64(t) % static_cast<std::uint64_t>(config_.text_vocab));
    pooled += table_.value().row(id);
  }
  pooled /= static_cast<double>(tokens.size());
  return proj_.forward(norm_.forward(Tensor::constant(pooled))).value();
}

Matrix TextEncoder::encode(const PromptSet& set) const {
  if (set.prompts.empty()) throw InvalidArgument("TextEncoder: empty prompt set");
  // Summing in sorted order makes the mean independent of list order.
  auto prompts = set.rendered();
  std::sort(prompts.begin(), prompts.end());
  Matrix acc = Matrix::Zero(1, config_.joint_dim);
  for (const auto& p : prompts) acc += encode_prompt(p);
  return acc / static_cast<double>(set.prompts.size());
}

ParamList TextEncoder::parameters() const {
  ParamList out;
  out.push_back({"text.table", table_});
  norm_.collect(out, "text.norm");
  proj_.collect(out, "text.proj");
  return out;
}

}  // namespace mvfsad
