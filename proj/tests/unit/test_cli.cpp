/*
 * Copyright (c) 2026 The catsplit Authors
 *
 * Licensed under the Apache License, Version 2.0;
 * You may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an 'AS IS' BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "catsplit/cli.hpp"
#include "catsplit/document.hpp"
#include "catsplit/head.hpp"
#include "catsplit/synth.hpp"
#include "test_support.hpp"

namespace catsplit {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "catsplit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  ::testing::internal::CaptureStdout();
  ::testing::internal::CaptureStderr();
  const int code = cli::run(static_cast<int>(argv.size()), argv.data());
  return {code, ::testing::internal::GetCapturedStdout(), ::testing::internal::GetCapturedStderr()};
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("cli");
    SynthConfig c;
    c.bases = 3;
    c.modifiers = 3;
    c.feature_dim = 16;
    c.text_dim = 8;
    c.train_per_class = 8;
    c.test_per_class = 8;
    c.seed = 3;
    write_bundle(generate(c), dir_->path() / "bundle");
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::string at(const std::string& rel) { return (dir_->path() / rel).string(); }
  static std::string bundle(const std::string& rel) { return at("bundle/" + rel); }

  static testing::TempDir* dir_;
};

testing::TempDir* Cli::dir_ = nullptr;

TEST_F(Cli, TaxonomyValidate) {
  const auto r = invoke({"taxonomy", "validate", bundle("taxonomy.json")});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out, "categories=7 groups=2 splits=1\n");
}

TEST_F(Cli, DictBuildFromTensorHead) {
  const auto r = invoke({"dict", "build", "--taxonomy", bundle("taxonomy.json"), "--head",
                         bundle("head/weights.cspl"), "--bias", bundle("head/bias.cspl"), "-o",
                         at("dict_cspl")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out, "entries=6 groups=2\n");
  EXPECT_TRUE(fs::exists(at("dict_cspl/dictionary.json")));
}

TEST_F(Cli, SplitEvalRoundTrip) {
  ASSERT_EQ(invoke({"dict", "build", "--taxonomy", bundle("taxonomy.json"), "--head",
                    bundle("head"), "-o", at("dict")})
                .code,
            0);
  auto r = invoke({"split", "--taxonomy", bundle("taxonomy.json"), "--head", bundle("head"),
                   "--method", "retrieval", "--dict", at("dict"), "--emb",
                   bundle("embeddings.json"), "-o", at("edited")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "split=b0 method=retrieval labels=9\n");
  r = invoke({"eval", "--taxonomy", bundle("taxonomy.json"), "--original", bundle("head"),
              "--edited", at("edited"), "--eval", bundle("eval.json"), "-o",
              at("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("generality=", 0), 0u);
  EXPECT_EQ(read_document(at("report.json"))["splits"][0]["method"], "retrieval");
}

TEST_F(Cli, SplitNeedsItsDependencies) {
  const auto r = invoke({"split", "--taxonomy", bundle("taxonomy.json"), "--head",
                         bundle("head"), "--method", "retrieval", "-o", at("nodict")});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("--dict"), std::string::npos) << r.err;
  const auto rnd = invoke({"split", "--taxonomy", bundle("taxonomy.json"), "--head",
                           bundle("head"), "--method", "random", "-o", at("noseed")});
  EXPECT_EQ(rnd.code, cli::kExitValidation);
  EXPECT_NE(rnd.err.find("requires --seed"), std::string::npos) << rnd.err;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(invoke({"taxonomy", "validate", at("missing.json")}).code, cli::kExitIo);
  EXPECT_EQ(invoke({"taxonomy", "validate", "--bogus", bundle("taxonomy.json")}).code,
            cli::kExitValidation);
  EXPECT_EQ(invoke({}).code, cli::kExitValidation);
  EXPECT_EQ(invoke({"split", "--taxonomy", bundle("taxonomy.json"), "--head", bundle("head"),
                    "--method", "magic", "-o", at("magic")})
                .code,
            cli::kExitValidation);
  testing::write_bytes(at("broken.json"), {'{', 'x'});
  EXPECT_EQ(invoke({"taxonomy", "validate", at("broken.json")}).code, cli::kExitValidation);
}

TEST_F(Cli, HelpEverywhere) {
  const std::vector<std::vector<std::string>> commands{
      {},         {"taxonomy", "validate"}, {"dict", "build"}, {"split"},  {"align", "train"},
      {"finetune"}, {"eval"},               {"baseline", "vlm"}, {"synth", "gen"}, {"pipeline"}};
  for (auto c : commands) {
    c.push_back("--help");
    const auto r = invoke(c);
    EXPECT_EQ(r.code, cli::kExitOk) << c.front();
    EXPECT_NE(r.out.find("Usage"), std::string::npos);
  }
}

TEST_F(Cli, FinetuneConfigAndFlagOverride) {
  const Document cfg{{"finetune", {{"shots", 2}, {"max_epochs", 3}, {"init", "random"}}}};
  write_document(cfg, at("ft.json"));
  auto r = invoke({"finetune", "--taxonomy", bundle("taxonomy.json"), "--head", bundle("head"),
                   "--train", bundle("train.json"), "--config", at("ft.json"), "--seed", "1",
                   "-o", at("ft_out")});
  // The bundle's train set holds every class, not just subcategories.
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("not a subcategory"), std::string::npos) << r.err;

  const auto train = load_feature_dataset(bundle("train.json"));
  const auto tax = load_taxonomy(bundle("taxonomy.json"));
  save_feature_dataset(split_samples(train, tax.splits().front()), at("sub_train.json"));
  r = invoke({"finetune", "--taxonomy", bundle("taxonomy.json"), "--head", bundle("head"),
              "--train", at("sub_train.json"), "--config", at("ft.json"), "--shots", "1",
              "--seed", "1", "-o", at("ft_out")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "split=b0 init=random scope=new-only shots=1 epochs=3\n");
  EXPECT_EQ(load_edited_head(at("ft_out")).provenance.front().second.method, InitMethod::random);
}

TEST_F(Cli, AlignTrainAndVlmBaseline) {
  ASSERT_EQ(invoke({"dict", "build", "--taxonomy", bundle("taxonomy.json"), "--head",
                    bundle("head"), "-o", at("dict2")})
                .code,
            0);
  auto r = invoke({"align", "train", "--taxonomy", bundle("taxonomy.json"), "--head",
                   bundle("head"), "--dict", at("dict2"), "--emb", bundle("embeddings.json"),
                   "--composition", "mod", "--epochs", "4", "--no-early-stop", "--seed", "2",
                   "-o", at("align")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("pairs=6 epochs=4", 0), 0u) << r.out;
  r = invoke({"baseline", "vlm", "--taxonomy", bundle("taxonomy.json"), "--head", bundle("head"),
              "--emb", bundle("embeddings.json"), "--eval", bundle("eval.json"), "--video",
              bundle("eval_video_embeddings.cspl"), "-o", at("vlm.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_DOUBLE_EQ(read_document(at("vlm.json"))["macro"]["locality"].get<double>(), 100.0);
}

TEST_F(Cli, PipelineWritesReportAndRunRecord) {
  SynthConfig c;
  c.bases = 3;
  c.modifiers = 3;
  c.feature_dim = 16;
  c.text_dim = 8;
  c.train_per_class = 8;
  c.test_per_class = 8;
  write_document(Document{{"synth", c.to_document()}, {"method", "joint"}}, at("pipe.json"));
  const auto r = invoke({"pipeline", "--config", at("pipe.json"), "--seed", "5", "--method",
                         "retrieval", "-o", at("pipe")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto run = read_document(at("pipe/run.json"));
  EXPECT_EQ(run["seed"], 5);
  EXPECT_EQ(run["method"], "retrieval");
  EXPECT_TRUE(fs::exists(at("pipe/report.json")));
  EXPECT_TRUE(fs::exists(at("pipe/edited_head/head.json")));
  EXPECT_EQ(invoke({"synth", "gen", "--seed", "1", "--config", at("pipe.json"), "-o", at("gen")}).code, 0);
  EXPECT_TRUE(fs::exists(at("gen/bundle.json")));
}

}  // namespace
}  // namespace catsplit
