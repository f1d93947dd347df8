// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "mvfsad/adaptation.hpp"
#include "mvfsad/errors.hpp"
#include "mvfsad/fusion.hpp"
#include "mvfsad/losses.hpp"
#include "mvfsad/model.hpp"

namespace mvfsad {
namespace {

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

std::vector<Tensor> random_constants(Rng& rng, int count, Eigen::Index rows, Eigen::Index cols) {
  std::vector<Tensor> out;
  for (int i = 0; i < count; ++i) out.push_back(Tensor::constant(random_matrix(rng, rows, cols)));
  return out;
}

// Compares d(loss)/d(param) from backward() against central differences for
// every entry of every parameter.
GradCheckResult check(const std::string& name, const ParamList& params, const std::function<Tensor()>& loss_fn,
                      const GradCheckOptions& opt) {
  GradCheckResult res;
  res.component = name;
  for (const auto& p : params) p.tensor.zero_grad();
  const Tensor loss = loss_fn();
  loss.backward();
  // Finite differences of an exactly-zero gradient still return forward
  // roundoff, which grows with |L|; the floor keeps those from dominating.
  const double floor = opt.floor * std::max(1.0, std::abs(loss.item()));
  std::vector<Matrix> analytic;
  for (const auto& p : params) {
    Matrix g = p.tensor.grad().size() ? p.tensor.grad() : Matrix::Zero(p.tensor.rows(), p.tensor.cols());
    if (!g.allFinite()) throw NumericError("grad_check: non-finite analytic gradient in " + p.name);
    analytic.push_back(std::move(g));
  }
  const NoGradGuard no_grad;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor t = params[k].tensor;
    Matrix& v = t.mutable_value();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double orig = v.data()[i];
      v.data()[i] = orig + opt.eps;
      const double up = loss_fn().item();
      v.data()[i] = orig - opt.eps;
      const double down = loss_fn().item();
      v.data()[i] = orig;
      const double numeric = (up - down) / (2.0 * opt.eps);
      const double a = analytic[k].data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      res.max_rel_error = std::max(res.max_rel_error, std::abs(a - numeric) / denom);
      ++res.entries_checked;
    }
  }
  for (const auto& p : params) p.tensor.zero_grad();
  return res;
}

// loss = sum(out .* R) with a fixed random R.
std::function<Tensor()> probe_loss(std::function<Tensor()> forward, Rng& rng) {
  const Tensor probe_out = forward();
  const Tensor r = Tensor::constant(random_matrix(rng, probe_out.rows(), probe_out.cols()));
  return [forward = std::move(forward), r] { return ops::sum(ops::mul(forward(), r)); };
}

std::string canonical(const std::string& id) {
  if (id == "A_f") return "image_adapter";
  if (id == "A_cg") return "class_text_adapter";
  if (id == "A_sg") return "seg_text_adapter";
  return id;
}

}  // namespace

std::vector<std::string> gradcheck_components() {
  return {"image_adapter", "class_text_adapter", "seg_text_adapter", "decoder", "global_fuse", "local_fuse", "encoder"};
}

GradCheckResult grad_check(const std::string& component, const GradCheckOptions& opt) {
  const std::string id = canonical(component);
  if (!(opt.eps > 0.0) || opt.dim < 4 || opt.grid_side < 1 || opt.views < 1) {
    throw InvalidArgument("grad_check: invalid options");
  }
  Rng rng(derive_seed(opt.seed, id));
  const int d = opt.dim;
  const int np = opt.grid_side * opt.grid_side;

  if (id == "encoder") {
    GradCheckResult res;
    res.component = id;
    res.has_parameters = false;
    res.note = "no trainable parameters";
    return res;
  }
  if (id == "image_adapter" || id == "class_text_adapter" || id == "seg_text_adapter") {
    const Adapter adapter(d, AdapterConfig{}, rng);
    const Tensor x = Tensor::constant(random_matrix(rng, id == "seg_text_adapter" ? 2 : 1, d));
    ParamList params;
    adapter.collect(params, id);
    return check(id, params, probe_loss([&] { return adapter.forward(x); }, rng), opt);
  }
  if (id == "decoder") {
    const std::vector<int> stages{1, 2, 3};
    const CoarseToFineDecoder decoder(d, d, stages, DecoderConfig{}, rng);
    std::map<int, Tensor> inputs;
    for (const int s : stages) inputs.emplace(s, Tensor::constant(random_matrix(rng, np, d)));
    ParamList params;
    decoder.collect(params, id);
    return check(id, params, probe_loss([&] { return decoder.forward(inputs); }, rng), opt);
  }
  if (id == "global_fuse") {
    const GlobalFusion fusion(d, opt.views, 2, rng);
    const auto cls = random_constants(rng, opt.views, 1, d);
    ParamList params;
    fusion.collect(params, id);
    return check(id, params, probe_loss([&] { return fusion.forward(cls); }, rng), opt);
  }
  if (id == "local_fuse") {
    FusionConfig cfg;
    const LocalFusion fusion(d, d, opt.views, cfg, rng);
    const auto feats = random_constants(rng, opt.views, np, d);
    ParamList params;
    fusion.collect(params, id);
    return check(id, params, probe_loss([&] { return fusion.forward(feats); }, rng), opt);
  }
  throw InvalidArgument("grad_check: unknown component '" + component + "'");
}

GradCheckResult grad_check_pipeline(const GradCheckOptions& opt) {
  Rng rng(derive_seed(opt.seed, "pipeline"));
  const int d = opt.dim;
  ModelConfig cfg;
  cfg.encoder.feature_dim = d;
  cfg.encoder.joint_dim = d;
  cfg.encoder.patch_size = 2;
  cfg.encoder.image_size = 2 * opt.grid_side;
  cfg.encoder.stages = {1, 2};
  cfg.encoder.depth = 2;
  cfg.fusion.view_indices.resize(std::min<std::size_t>(opt.views, cfg.fusion.view_indices.size()));
  const TrainableHead head(cfg, opt.seed, true);
  const int np = cfg.encoder.patch_count();

  auto features = [&](Rng& r) {
    FrozenFeatures f;
    f.image.cls = random_matrix(r, 1, d);
    for (const int s : cfg.encoder.stages) f.image.stages[s] = random_matrix(r, np, d);
    for (int v = 0; v < cfg.fusion.view_count(); ++v) {
      EmbeddingBundle b;
      b.cls = random_matrix(r, 1, d);
      for (const int s : cfg.encoder.stages) b.stages[s] = random_matrix(r, np, d);
      f.views.push_back(std::move(b));
    }
    return f;
  };
  const FrozenFeatures pos = features(rng);
  const FrozenFeatures neg = features(rng);
  const Matrix t_plus = random_matrix(rng, 1, d);
  const Matrix t_minus = random_matrix(rng, 1, d);
  Mask mask(cfg.encoder.image_size, cfg.encoder.image_size, 0);
  for (auto& m : mask.values) m = rng.uniform() < 0.3 ? 1 : 0;
  const Mask clean(mask.height, mask.width, 0);

  auto loss = [&] {
    const AdaptedText text = head.adapt_text(t_plus, t_minus);
    const HeadOutput p = head.forward(pos, text.seg);
    const HeadOutput n = head.forward(neg, text.seg);
    const ContrastiveTerms con =
        contrastive_losses(p.image_embedding, n.image_embedding, text.class_normal, text.class_anomalous);
    const Tensor seg = ops::scale(ops::add(seg_loss(p.map, clean), seg_loss(n.map, mask)), 0.5);
    return total_loss(con.con, seg);
  };
  return check("pipeline", head.parameters(), loss, opt);
}

}  // namespace mvfsad
