// Copyright 2026 The rwre Authors
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

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rwre/envgen.hpp"

namespace rwre {

nlohmann::json dist_to_json(const EnvDistribution& dist);
EnvDistribution dist_from_json(const nlohmann::json& j);

// {"spec": {...}, "seed": u64, "left": int, "right": int, "omega": [...],
//  "reflected_at": int|null}; omega written with 17 significant digits.
std::string env_to_json(const Environment& env);
Environment env_from_json(const nlohmann::json& j);

void save_environment(const Environment& env, const std::filesystem::path& path);
Environment load_environment(const std::filesystem::path& path);

// Shortest decimal with 17 significant digits ("%.17g").
std::string format_g17(double x);

}  // namespace rwre
