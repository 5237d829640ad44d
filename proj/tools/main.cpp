// Copyright 2026 The phiqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <iostream>

#include "phiqkd_cli.hpp"

int main(int argc, char** argv) {
  std::optional<std::string> env_seed;
  if (const char* s = std::getenv("PHIQKD_SEED")) env_seed = s;
  return phiqkd::cli::run_cli({argv + 1, argv + argc}, std::cout, std::cerr, env_seed);
}
