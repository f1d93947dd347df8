// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvfsad/metrics.hpp"
#include "mvfsad/model.hpp"
#include "mvfsad/scoring.hpp"

namespace mvfsad {

struct Prediction {
  ScorePair score;
  ScalarMap map;
};

/// Test-time forward of one sample: adapted text, head output, score.
Prediction predict(const FrozenBackbone& backbone, const TrainableHead& head, const Image& image,
                   const PointCloudGrid& cloud);

struct EvalInput {
  std::string id;
  Image image;
  PointCloudGrid cloud;
  std::optional<Mask> mask;  // normal samples without a mask count as all-clear
  int label = 0;
};

struct SampleScore {
  std::string id;
  int label = 0;
  double s_plus = 0.0;
  double s_minus = 0.0;
  double a_score = 0.0;
  double max_map = 0.0;

  friend bool operator==(const SampleScore&, const SampleScore&) = default;
};

/// Metrics that are undefined for the given labels are left empty.
struct EvalReport {
  std::optional<double> i_auroc;
  std::optional<double> aupr;
  std::optional<double> p_auroc;
  std::optional<double> aupro;
  double fpr_limit = kDefaultFprLimit;
  std::vector<SampleScore> samples;
  nlohmann::json config;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Runs predict() over every input and computes I-AUROC and AUPR on
/// a_score, and P-AUROC and AUPRO over the maps of samples with masks.
/// `maps_out`, when given, receives the anomaly maps in input order.
EvalReport evaluate(const FrozenBackbone& backbone, const TrainableHead& head, const std::vector<EvalInput>& inputs,
                    double fpr_limit = kDefaultFprLimit, std::vector<ScalarMap>* maps_out = nullptr);

/// Metrics only, from precomputed scores and maps.
EvalReport build_report(std::vector<SampleScore> samples, const std::vector<ScalarMap>& maps,
                        const std::vector<std::optional<Mask>>& masks, double fpr_limit = kDefaultFprLimit);

nlohmann::json report_to_json(const EvalReport& report);
void write_report_json(const std::string& path, const EvalReport& report);
void write_scores_csv(const std::string& path, const EvalReport& report);

}  // namespace mvfsad
