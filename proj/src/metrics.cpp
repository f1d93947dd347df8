// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mvfsad/errors.hpp"

namespace mvfsad {
namespace {

void check_inputs(std::span<const double> scores, std::span<const std::uint8_t> labels, const char* what) {
  if (scores.size() != labels.size()) throw InvalidArgument(std::string(what) + ": scores and labels differ in length");
  for (const double s : scores) {
    if (std::isnan(s)) throw InvalidArgument(std::string(what) + ": NaN score");
  }
}

std::vector<std::size_t> order_by_score(std::span<const double> scores, bool descending) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (descending) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  } else {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  }
  return idx;
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_inputs(scores, labels, "auroc");
  const auto order = order_by_score(scores, false);
  double negatives_below = 0.0;
  double wins = 0.0;
  double n_pos = 0.0;
  double n_neg = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    double pos = 0.0;
    double neg = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? pos : neg) += 1.0;
      ++j;
    }
    wins += pos * negatives_below + 0.5 * pos * neg;
    negatives_below += neg;
    n_pos += pos;
    n_neg += neg;
    i = j;
  }
  if (n_pos == 0.0 || n_neg == 0.0) throw UndefinedMetric("auroc: both classes must be present");
  return wins / (n_pos * n_neg);
}

double aupr(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_inputs(scores, labels, "aupr");
  const double n_pos = static_cast<double>(std::count_if(labels.begin(), labels.end(), [](auto l) { return l != 0; }));
  if (n_pos == 0.0) throw UndefinedMetric("aupr: no positive samples");
  const auto order = order_by_score(scores, true);
  double tp = 0.0;
  double fp = 0.0;
  double prev_recall = 0.0;
  double ap = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? tp : fp) += 1.0;
      ++j;
    }
    const double recall = tp / n_pos;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
    i = j;
  }
  return ap;
}

namespace {

void check_maps(std::span<const ScalarMap> maps, std::span<const Mask> masks, const char* what) {
  if (maps.size() != masks.size()) throw InvalidArgument(std::string(what) + ": map and mask counts differ");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (!maps[i].same_shape(masks[i].height, masks[i].width)) {
      throw InvalidArgument(std::string(what) + ": map/mask shape mismatch at index " + std::to_string(i));
    }
  }
}

}  // namespace

double p_auroc(std::span<const ScalarMap> maps, std::span<const Mask> masks) {
  check_maps(maps, masks, "p_auroc");
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    scores.insert(scores.end(), maps[i].values.begin(), maps[i].values.end());
    for (const auto m : masks[i].values) labels.push_back(m ? 1 : 0);
  }
  return auroc(scores, labels);
}

int label_components(const Mask& mask, Plane<int>& labels) {
  labels = Plane<int>(mask.height, mask.width, 0);
  int next = 0;
  std::vector<std::pair<int, int>> stack;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask(r, c) || labels(r, c) != 0) continue;
      ++next;
      labels(r, c) = next;
      stack.emplace_back(r, c);
      while (!stack.empty()) {
        const auto [y, x] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = y + dy;
            const int nx = x + dx;
            if (ny < 0 || nx < 0 || ny >= mask.height || nx >= mask.width) continue;
            if (!mask(ny, nx) || labels(ny, nx) != 0) continue;
            labels(ny, nx) = next;
            stack.emplace_back(ny, nx);
          }
        }
      }
    }
  }
  return next;
}

double aupro(std::span<const ScalarMap> maps, std::span<const Mask> masks, double fpr_limit) {
  check_maps(maps, masks, "aupro");
  if (!(fpr_limit > 0.0 && fpr_limit <= 1.0)) throw InvalidArgument("aupro: fpr_limit must be in (0, 1]");

  struct Pixel {
    double score;
    int region;  // -1 for normal pixels
  };
  std::vector<Pixel> pixels;
  std::vector<double> region_size;
  double n_neg = 0.0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    Plane<int> labels;
    const int count = label_components(masks[i], labels);
    const int base = static_cast<int>(region_size.size());
    region_size.resize(region_size.size() + static_cast<std::size_t>(count), 0.0);
    for (std::size_t p = 0; p < labels.size(); ++p) {
      const int l = labels.values[p];
      if (l == 0) {
        pixels.push_back({maps[i].values[p], -1});
        n_neg += 1.0;
      } else {
        pixels.push_back({maps[i].values[p], base + l - 1});
        region_size[static_cast<std::size_t>(base + l - 1)] += 1.0;
      }
    }
  }
  if (region_size.empty()) throw UndefinedMetric("aupro: no ground-truth region in any mask");
  if (n_neg == 0.0) throw UndefinedMetric("aupro: no normal pixels to measure false positives");

  std::stable_sort(pixels.begin(), pixels.end(), [](const Pixel& a, const Pixel& b) { return a.score > b.score; });

  std::vector<double> covered(region_size.size(), 0.0);
  double fp = 0.0;
  double area = 0.0;
  double prev_fpr = 0.0;
  double prev_pro = 0.0;  // nothing reachable before the first operating point
  for (std::size_t i = 0; i < pixels.size();) {
    std::size_t j = i;
    while (j < pixels.size() && pixels[j].score == pixels[i].score) {
      if (pixels[j].region < 0) {
        fp += 1.0;
      } else {
        covered[static_cast<std::size_t>(pixels[j].region)] += 1.0;
      }
      ++j;
    }
    i = j;
    const double fpr = fp / n_neg;
    double pro = 0.0;
    for (std::size_t k = 0; k < covered.size(); ++k) pro += covered[k] / region_size[k];
    pro /= static_cast<double>(covered.size());

    area += (std::min(fpr, fpr_limit) - std::min(prev_fpr, fpr_limit)) * prev_pro;
    prev_fpr = fpr;
    prev_pro = pro;
    if (fpr >= fpr_limit) break;
  }
  area += (fpr_limit - std::min(prev_fpr, fpr_limit)) * prev_pro;
  return area / fpr_limit;
}

}  // namespace mvfsad
