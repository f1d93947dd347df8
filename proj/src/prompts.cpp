// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/prompts.hpp"

#include <fstream>

#include "mvfsad/errors.hpp"

namespace mvfsad {

std::vector<std::string> normal_state_phrases() {
  return {"{}", "flawless {}", "perfect {}", "unblemished {}", "{} without flaw", "{} without defect",
          "{} without damage"};
}

std::vector<std::string> anomalous_state_phrases() {
  return {"damaged {}", "broken {}", "{} with flaw", "{} with defect", "{} with damage"};
}

std::vector<std::string> photo_templates() {
  return {"a cropped photo of the {}.",
          "a cropped photo of a {}.",
          "a close-up photo of a {}.",
          "a close-up photo of the {}.",
          "a bright photo of a {}.",
          "a bright photo of the {}.",
          "a dark photo of the {}.",
          "a dark photo of a {}.",
          "a jpeg corrupted photo of a {}.",
          "a jpeg corrupted photo of the {}.",
          "a blurry photo of the {}.",
          "a blurry photo of a {}.",
          "a photo of a {}.",
          "a photo of the {}.",
          "a photo of a small {}.",
          "a photo of the small {}.",
          "a photo of a large {}.",
          "a photo of the large {}.",
          "a photo of the {} for visual inspection.",
          "a photo of a {} for visual inspection.",
          "a photo of the {} for anomaly detection.",
          "a photo of a {} for anomaly detection."};
}

std::vector<std::string> compose_prompts(const std::vector<std::string>& states,
                                         const std::vector<std::string>& templates) {
  std::vector<std::string> out;
  out.reserve(states.size() * templates.size());
  for (const auto& state : states) {
    for (const auto& tmpl : templates) {
      std::string s = tmpl;
      const auto pos = s.find("{}");
      if (pos != std::string::npos) s.replace(pos, 2, state);
      out.push_back(std::move(s));
    }
  }
  return out;
}

PromptSet default_normal_prompts(const std::string& class_name) {
  return {compose_prompts(normal_state_phrases(), photo_templates()), class_name};
}

PromptSet default_anomalous_prompts(const std::string& class_name) {
  return {compose_prompts(anomalous_state_phrases(), photo_templates()), class_name};
}

PromptSet load_prompt_file(const std::string& path, const std::string& class_name) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open prompt file " + path);
  PromptSet set;
  set.class_name = class_name;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    set.prompts.push_back(line);
  }
  if (set.prompts.empty()) throw InvalidArgument("prompt file " + path + " contains no prompts");
  return set;
}

}  // namespace mvfsad
