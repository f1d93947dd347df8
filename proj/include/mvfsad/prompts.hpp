// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Compositional prompt ensembles: state phrases crossed with photo templates.

#pragma once

#include <string>
#include <vector>

#include "mvfsad/encoder.hpp"

namespace mvfsad {

std::vector<std::string> normal_state_phrases();
std::vector<std::string> anomalous_state_phrases();
std::vector<std::string> photo_templates();

/// Every template with every state phrase substituted; `{}` remains the class slot.
std::vector<std::string> compose_prompts(const std::vector<std::string>& states,
                                         const std::vector<std::string>& templates);

PromptSet default_normal_prompts(const std::string& class_name);
PromptSet default_anomalous_prompts(const std::string& class_name);

/// One prompt per line; blank lines and lines starting with '#' are skipped.
PromptSet load_prompt_file(const std::string& path, const std::string& class_name);

}  // namespace mvfsad
