// Copyright 2026 The revlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "revlab/error.hpp"
#include "revlab/toml.hpp"

namespace revlab {
namespace {

TEST(Toml, ScalarsTablesAndArrays) {
  const auto j = parse_toml(R"(# experiment
master_seed = 42
name = "demo"  # trailing comment
path = 'C:\raw'
rate = 5e-4
on = true

[protocol]
negatives = 99
ranking_cutoffs = [3, 5,
  10, 20]

[model.extra]
shape = { rows = 2, cols = 3 }

[[scenario]]
name = "a"

[[scenario]]
name = "b"
)");
  EXPECT_EQ(j["master_seed"], 42);
  EXPECT_EQ(j["name"], "demo");
  EXPECT_EQ(j["path"], "C:\\raw");
  EXPECT_DOUBLE_EQ(j["rate"].get<double>(), 5e-4);
  EXPECT_EQ(j["on"], true);
  EXPECT_EQ(j["protocol"]["ranking_cutoffs"], nlohmann::json({3, 5, 10, 20}));
  EXPECT_EQ(j["model"]["extra"]["shape"]["cols"], 3);
  ASSERT_EQ(j["scenario"].size(), 2u);
  EXPECT_EQ(j["scenario"][1]["name"], "b");
}

TEST(Toml, DottedKeysAndEscapes) {
  const auto j = parse_toml("a.b.c = 1\ns = \"tab\\tquote\\\"\"\nneg = -3\n");
  EXPECT_EQ(j["a"]["b"]["c"], 1);
  EXPECT_EQ(j["s"], "tab\tquote\"");
  EXPECT_EQ(j["neg"], -3);
}

TEST(Toml, ErrorsNameTheLine) {
  auto line_of = [](const std::string& text) {
    try {
      parse_toml(text, "cfg.toml");
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(line_of("a = 1\na = 2\n").find("cfg.toml:2"), std::string::npos);
  EXPECT_NE(line_of("a = 1\nb = \n").find("cfg.toml:2"), std::string::npos);
  EXPECT_NE(line_of("x = \"open\n").find("cfg.toml:1"), std::string::npos);
  EXPECT_NE(line_of("[t]\n[t]\n").find("cfg.toml:2"), std::string::npos);
  EXPECT_NE(line_of("when = 2020-01-01\n").find("cfg.toml:1"), std::string::npos);
}

}  // namespace
}  // namespace revlab
