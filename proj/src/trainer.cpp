// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/trainer.hpp"

#include <cmath>

#include "mvfsad/errors.hpp"

namespace mvfsad {

void TrainConfig::validate() const {
  if (shots != 1 && shots != 2 && shots != 4) throw InvalidArgument("TrainConfig: shots must be 1, 2 or 4");
  if (epochs < 0) throw InvalidArgument("TrainConfig: epochs must be non-negative");
  for (const char* g : kParamGroups) {
    if (!(learning_rate(g) > 0.0)) throw InvalidArgument(std::string("TrainConfig: learning rate of ") + g + " must be positive");
  }
  if (perlin_min_log2 < 0 || perlin_max_log2 < perlin_min_log2) throw InvalidArgument("TrainConfig: bad Perlin period range");
  if (mask_retries < 1) throw InvalidArgument("TrainConfig: mask_retries must be at least 1");
}

double TrainConfig::learning_rate(const std::string& group) const {
  if (group == "class_text_adapter") return lr_class_text_adapter;
  if (group == "seg_text_adapter") return lr_seg_text_adapter;
  if (group == "image_adapter") return lr_image_adapter;
  if (group == "decoder") return lr_decoder;
  if (group == "fusion") return lr_fusion;
  throw InvalidArgument("unknown parameter group " + group);
}

std::uint64_t head_seed(const TrainConfig& config) { return derive_seed(config.seed, "head"); }

namespace {

std::vector<ParamGroup> make_groups(const TrainableHead& head, const TrainConfig& config) {
  std::vector<ParamGroup> groups;
  for (const char* g : kParamGroups) groups.push_back({g, config.learning_rate(g), head.group_parameters(g)});
  return groups;
}

void require_finite(double v, const char* term) {
  if (!std::isfinite(v)) throw NumericError(std::string("training diverged: ") + term + " is not finite");
}

LossBreakdown breakdown(const ContrastiveTerms& con, const Tensor& seg, const Tensor& total) {
  LossBreakdown out;
  out.l_i2t = con.i2t.item();
  out.l_t2i = con.t2i.item();
  out.l_con = con.con.item();
  out.l_seg = seg.item();
  out.l_tot = total.item();
  require_finite(out.l_i2t, "l_i2t");
  require_finite(out.l_t2i, "l_t2i");
  require_finite(out.l_seg, "l_seg");
  require_finite(out.l_tot, "l_tot");
  return out;
}

}  // namespace

Trainer::Trainer(const FrozenBackbone& backbone, TrainableHead& head, const TrainConfig& config,
                 std::vector<Image> anomaly_sources)
    : backbone_(backbone),
      head_(head),
      config_(config),
      sources_(std::move(anomaly_sources)),
      adam_((config.validate(), make_groups(head, config)), config.adam) {}

Trainer::Graph Trainer::build(const FrozenFeatures& normal, const FrozenFeatures& anomalous, const Mask& mask) const {
  const AdaptedText text = head_.adapt_text(backbone_.text_normal(), backbone_.text_anomalous());
  const HeadOutput pos = head_.forward(normal, text.seg);
  const HeadOutput neg = head_.forward(anomalous, text.seg);
  Graph g;
  g.con = contrastive_losses(pos.image_embedding, neg.image_embedding, text.class_normal, text.class_anomalous);
  const Mask clean(mask.height, mask.width, 0);
  g.seg = ops::scale(ops::add(seg_loss(pos.map, clean), seg_loss(neg.map, mask)), 0.5);
  g.total = total_loss(g.con.con, g.seg);
  return g;
}

LossBreakdown Trainer::evaluate_loss(const FrozenFeatures& normal, const FrozenFeatures& anomalous,
                                     const Mask& mask) const {
  const Graph g = build(normal, anomalous, mask);
  return breakdown(g.con, g.seg, g.total);
}

LossBreakdown Trainer::step(const FrozenFeatures& normal, const FrozenFeatures& anomalous, const Mask& mask) {
  const Graph g = build(normal, anomalous, mask);
  const LossBreakdown loss = breakdown(g.con, g.seg, g.total);
  adam_.zero_grad();
  g.total.backward();
  for (const auto& group : adam_.groups()) {
    for (const auto& p : group.params) {
      if (p.tensor.grad().size() != 0 && !p.tensor.grad().allFinite()) {
        throw NumericError("training diverged: gradient of " + p.name + " is not finite");
      }
    }
  }
  adam_.step();
  adam_.zero_grad();
  return loss;
}

AnomalySample Trainer::synthesize(const TrainingShot& shot, int epoch, int shot_index) const {
  const std::uint64_t step_seed =
      mix_seed(derive_seed(config_.seed, "synth"), static_cast<std::uint64_t>(epoch) * 4 + shot_index);
  const ScalarMap depth = depth_from_cloud(shot.cloud);
  AnomalySample sample;
  for (int attempt = 0; attempt < config_.mask_retries; ++attempt) {
    const std::uint64_t s = mix_seed(step_seed, attempt);
    Rng rng(derive_seed(s, "params"));
    const PerlinParams params =
        draw_perlin_params(rng, config_.perlin_min_log2, config_.perlin_max_log2, config_.perlin_threshold);
    Image source;
    if (sources_.empty()) {
      source = procedural_noise_texture(shot.image.height, shot.image.width, derive_seed(s, "texture"));
    } else {
      const Image& pick = sources_[rng.index(sources_.size())];
      source = pick.same_shape(shot.image) ? pick : resize_bilinear(pick, shot.image.height, shot.image.width);
    }
    sample = synthesize_anomaly(shot.image, depth, source, params, s);
    if (!sample.empty_mask) break;
  }
  return sample;
}

std::vector<StepRecord> Trainer::fit(const std::vector<TrainingShot>& shots,
                                     const std::function<void(const StepRecord&)>& progress) {
  if (static_cast<int>(shots.size()) != config_.shots) {
    throw InvalidArgument("Trainer::fit: expected " + std::to_string(config_.shots) + " shots, got " +
                          std::to_string(shots.size()));
  }
  std::vector<FrozenFeatures> cached;
  cached.reserve(shots.size());
  for (const auto& s : shots) cached.push_back(backbone_.extract(s.image, s.cloud));

  std::vector<StepRecord> history;
  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    for (int k = 0; k < config_.shots; ++k) {
      const AnomalySample sample = synthesize(shots[k], epoch, k);
      const FrozenFeatures anomalous = backbone_.extract(sample.x_minus, shots[k].cloud);
      StepRecord rec;
      rec.epoch = epoch;
      rec.shot = k;
      rec.loss = step(cached[k], anomalous, sample.mask);
      std::size_t on = 0;
      for (const auto v : sample.mask.values) on += v;
      rec.mask_fraction = sample.mask.size() ? static_cast<double>(on) / sample.mask.size() : 0.0;
      history.push_back(rec);
      if (progress) progress(rec);
    }
  }
  return history;
}

}  // namespace mvfsad
