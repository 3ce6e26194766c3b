#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"

namespace lookupf {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out, err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  const auto r = run({"eval", "--predictions", "/nonexistent.csv", "--gt", "/nonexistent.csv"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("error"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST(Cli, EvalWorkedExample) {
  fixtures::TempDir dir("cli");
  write_text_file(dir / "p.csv", "query_id,reference_id,score\nq1,r1,0.9\nq1,r2,0.8\nq2,r3,0.7\n");
  write_text_file(dir / "gt.csv", "query_id,reference_id\nq1,r1\nq2,r3\n");
  const auto r = run({"eval", "--predictions", (dir / "p.csv").string(), "--gt", (dir / "gt.csv").string(),
                      "--out", (dir / "report").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["micro_ap"].get<double>(), 0.833333, 1e-6);
  EXPECT_EQ(j["recall_at_p90"].get<double>(), 0.5);
  EXPECT_EQ(j["threshold_at_p90"].get<double>(), 0.9);
  EXPECT_TRUE(fs::exists(dir / "report" / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "report" / "manifest.json"));
}

TEST(Cli, DomainErrorsExitOne) {
  fixtures::TempDir dir("cli");
  write_text_file(dir / "p.csv", "q1,r1,0.9\n");
  write_text_file(dir / "gt.csv", "query_id,reference_id\n");
  const auto r = run({"eval", "--predictions", (dir / "p.csv").string(), "--gt", (dir / "gt.csv").string()});
  EXPECT_EQ(r.code, cli::kExitDomainError);
  EXPECT_NE(r.err.find("EmptyGroundTruth"), std::string::npos) << r.err;
  write_text_file(dir / "bad.csv", "q1,r1\n");
  EXPECT_EQ(run({"eval", "--predictions", (dir / "bad.csv").string(), "--gt", (dir / "gt.csv").string()}).code,
            cli::kExitDomainError);
}

TEST(Cli, GenerateAugmentAndSegment) {
  fixtures::TempDir dir("cli");
  save_png(synthesize_scene(3, 64, 64, "base"), dir / "base.png");
  save_png(synthesize_scene(4, 64, 64, "donor"), dir / "donor.png");
  ASSERT_EQ(run({"gen", "copy-move", "--image", (dir / "base.png").string(), "--out", (dir / "cm").string(), "--seed", "5"}).code, 0);
  ASSERT_EQ(run({"gen", "splice", "--target", (dir / "base.png").string(), "--donor", (dir / "donor.png").string(),
                 "--out", (dir / "sp").string()}).code, 0);
  std::vector<fs::path> masks;
  for (const auto& e : fs::recursive_directory_iterator(dir.path()))
    if (e.path().filename().string().find("_mask.png") != std::string::npos) masks.push_back(e.path());
  ASSERT_EQ(masks.size(), 2u);
  const auto aug = run({"augment", "--image", (dir / "base.png").string(), "--out", (dir / "a.png").string(),
                        "--ops", "flip,brightness:1.2", "--seed", "1"});
  ASSERT_EQ(aug.code, 0) << aug.err;
  EXPECT_TRUE(fs::exists(dir / "a.png"));
  EXPECT_TRUE(fs::exists(dir / "a.manifest.json"));
  EXPECT_EQ(run({"augment", "--image", (dir / "base.png").string(), "--out", (dir / "b.png").string(), "--ops", "blur:999"}).code,
            cli::kExitDomainError);
}

TEST(Cli, EndToEnd) {
  fixtures::TempDir dir("cli");
  const auto ds = dir / "ds";
  ASSERT_EQ(run({"dataset", "emit", "--out", ds.string(), "--references", "20", "--training", "2", "--queries", "6",
                 "--segments", "2", "--image-size", "64", "--seed", "3"}).code, 0);
  const auto idx = run({"index", "build", "--images", (ds / "Reference").string(), "--out", (dir / "ref.lfds").string()});
  ASSERT_EQ(idx.code, 0) << idx.err;
  const auto q = run({"index", "query", "--index", (dir / "ref.lfds").string(), "--image",
                      (ds / "Reference" / "R0007.png").string(), "-k", "3"});
  ASSERT_EQ(q.code, 0) << q.err;
  const auto qj = nlohmann::json::parse(q.out);
  EXPECT_EQ(qj["candidates"][0]["reference_id"], "R0007");

  const auto v = run({"verify", "--index", (dir / "ref.lfds").string(), "--images", (ds / "Query").string(),
                      "--detector", "oracle", "--labels", (ds / "Annotations").string(), "--out", (dir / "run").string()});
  ASSERT_EQ(v.code, 0) << v.err;
  EXPECT_EQ(nlohmann::json::parse(v.out)["failed"], 0);
  const auto report = nlohmann::json::parse(slurp(dir / "run" / "reports" / "Q0000.json"));
  EXPECT_FALSE(report["authentic"].get<bool>());
  EXPECT_EQ(report["forgery_type"], "copy-move");

  const auto e = run({"eval", "--predictions", (dir / "run" / "predictions.csv").string(), "--gt",
                      (ds / "Annotations" / "ground_truth.csv").string(), "--proportions",
                      (ds / "Annotations" / "proportions.csv").string()});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto ej = nlohmann::json::parse(e.out);
  EXPECT_GT(ej["micro_ap"].get<double>(), 0.0);
  EXPECT_EQ(ej["buckets"].size(), 10u);

  const auto b = run({"verify", "--index", (dir / "ref.lfds").string(), "--images", (ds / "Query").string(),
                      "--detector", "baseline", "--out", (dir / "base").string()});
  EXPECT_EQ(b.code, 0) << b.err;

  const auto d = run({"dedup", "--images", (ds / "Reference").string()});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(nlohmann::json::parse(d.out)["kept"].size(), 20u);
}

}  // namespace
}  // namespace lookupf
