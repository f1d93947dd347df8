// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include "mvfsad/cli.hpp"

int main(int argc, char** argv) {
  return mvfsad::run_command(std::vector<std::string>(argv + 1, argv + argc));
}
