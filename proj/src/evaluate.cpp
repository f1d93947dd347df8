// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/evaluate.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>

#include "mvfsad/errors.hpp"

namespace mvfsad {

Prediction predict(const FrozenBackbone& backbone, const TrainableHead& head, const Image& image,
                   const PointCloudGrid& cloud) {
  const NoGradGuard no_grad;
  const FrozenFeatures features = backbone.extract(image, cloud);
  const AdaptedText text = head.adapt_text(backbone.text_normal(), backbone.text_anomalous());
  const HeadOutput out = head.forward(features, text.seg);
  Prediction p;
  p.map = to_scalar_map(out.map);
  p.score = classification_score(out.image_embedding.value(), text.class_normal.value(),
                                 text.class_anomalous.value(), p.map, head.config().tau);
  return p;
}

EvalReport build_report(std::vector<SampleScore> samples, const std::vector<ScalarMap>& maps,
                        const std::vector<std::optional<Mask>>& masks, double fpr_limit) {
  if (maps.size() != samples.size() || masks.size() != samples.size()) {
    throw InvalidArgument("build_report: scores, maps and masks must have equal length");
  }
  EvalReport r;
  r.fpr_limit = fpr_limit;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (const auto& s : samples) {
    scores.push_back(s.a_score);
    labels.push_back(s.label ? 1 : 0);
  }
  try {
    r.i_auroc = auroc(scores, labels);
  } catch (const UndefinedMetric&) {
  }
  try {
    r.aupr = aupr(scores, labels);
  } catch (const UndefinedMetric&) {
  }

  std::vector<ScalarMap> pix_maps;
  std::vector<Mask> pix_masks;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (masks[i]) {
      pix_maps.push_back(maps[i]);
      pix_masks.push_back(*masks[i]);
    } else if (samples[i].label == 0) {
      pix_maps.push_back(maps[i]);
      pix_masks.emplace_back(maps[i].height, maps[i].width, 0);
    }
  }
  if (!pix_maps.empty()) {
    try {
      r.p_auroc = p_auroc(pix_maps, pix_masks);
    } catch (const UndefinedMetric&) {
    }
    try {
      r.aupro = aupro(pix_maps, pix_masks, fpr_limit);
    } catch (const UndefinedMetric&) {
    }
  }
  r.samples = std::move(samples);
  return r;
}

EvalReport evaluate(const FrozenBackbone& backbone, const TrainableHead& head, const std::vector<EvalInput>& inputs,
                    double fpr_limit, std::vector<ScalarMap>* maps_out) {
  std::vector<SampleScore> samples;
  std::vector<ScalarMap> maps;
  std::vector<std::optional<Mask>> masks;
  for (const auto& in : inputs) {
    const Prediction p = predict(backbone, head, in.image, in.cloud);
    SampleScore s;
    s.id = in.id;
    s.label = in.label;
    s.s_plus = p.score.s_plus;
    s.s_minus = p.score.s_minus;
    s.a_score = p.score.a_score;
    s.max_map = *std::max_element(p.map.values.begin(), p.map.values.end());
    samples.push_back(std::move(s));
    maps.push_back(p.map);
    masks.push_back(in.mask);
  }
  EvalReport r = build_report(std::move(samples), maps, masks, fpr_limit);
  if (maps_out) *maps_out = std::move(maps);
  return r;
}

namespace {

nlohmann::json optional_value(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : r.samples) {
    samples.push_back({{"id", s.id},
                       {"label", s.label},
                       {"s_plus", s.s_plus},
                       {"s_minus", s.s_minus},
                       {"a_score", s.a_score},
                       {"max_map", s.max_map}});
  }
  return {{"i_auroc", optional_value(r.i_auroc)},
          {"aupr", optional_value(r.aupr)},
          {"p_auroc", optional_value(r.p_auroc)},
          {"aupro", optional_value(r.aupro)},
          {"fpr_limit", r.fpr_limit},
          {"samples", samples},
          {"config", r.config}};
}

void write_report_json(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << report_to_json(report).dump(2) << "\n";
}

void write_scores_csv(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "id,label,s_plus,s_minus,a_score,max_map\n" << std::setprecision(17);
  for (const auto& s : report.samples) {
    out << s.id << ',' << s.label << ',' << s.s_plus << ',' << s.s_minus << ',' << s.a_score << ',' << s.max_map
        << '\n';
  }
}

}  // namespace mvfsad
