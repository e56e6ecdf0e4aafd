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

#include "rwre/env_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rwre/errors.hpp"

namespace rwre {

std::string format_g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json dist_to_json(const EnvDistribution& dist) {
  nlohmann::json j;
  j["family"] = dist.family();
  if (const auto* p = std::get_if<TwoPoint>(&dist.variant())) {
    j["p_hi"] = p->p_hi;
    j["p_lo"] = p->p_lo;
    j["beta"] = p->beta;
  } else if (const auto* p = std::get_if<BetaLike>(&dist.variant())) {
    j["shape_a"] = p->shape_a;
    j["shape_b"] = p->shape_b;
  } else {
    const auto& d = std::get<Discrete>(dist.variant());
    j["values"] = d.values;
    j["weights"] = d.weights;
  }
  return j;
}

EnvDistribution dist_from_json(const nlohmann::json& j) {
  try {
    const auto family = j.at("family").get<std::string>();
    if (family == "two_point") {
      return TwoPoint{j.at("p_hi").get<double>(), j.at("p_lo").get<double>(), j.at("beta").get<double>()};
    }
    if (family == "beta") {
      return BetaLike{j.at("shape_a").get<double>(), j.at("shape_b").get<double>()};
    }
    if (family == "discrete") {
      return Discrete{j.at("values").get<std::vector<double>>(), j.at("weights").get<std::vector<double>>()};
    }
    throw DomainError("unknown distribution family '" + family + "'");
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed distribution spec: ") + e.what());
  }
}

std::string env_to_json(const Environment& env) {
  std::ostringstream out;
  out << "{\"spec\":" << dist_to_json(env.spec()).dump() << ",\"seed\":" << env.seed()
      << ",\"left\":" << env.left() << ",\"right\":" << env.right() << ",\"omega\":[";
  const auto values = env.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_g17(values[i]);
  }
  out << "],\"reflected_at\":";
  if (env.reflected_at()) {
    out << *env.reflected_at();
  } else {
    out << "null";
  }
  out << "}\n";
  return out.str();
}

Environment env_from_json(const nlohmann::json& j) {
  try {
    std::optional<std::int64_t> reflected;
    if (j.contains("reflected_at") && !j.at("reflected_at").is_null()) {
      reflected = j.at("reflected_at").get<std::int64_t>();
    }
    return Environment(dist_from_json(j.at("spec")), j.at("left").get<std::int64_t>(),
                       j.at("right").get<std::int64_t>(), j.at("seed").get<std::uint64_t>(),
                       j.at("omega").get<std::vector<double>>(), reflected);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed environment file: ") + e.what());
  }
}

void save_environment(const Environment& env, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << env_to_json(env);
}

Environment load_environment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("environment file is not valid JSON: ") + e.what());
  }
  return env_from_json(j);
}

}  // namespace rwre
