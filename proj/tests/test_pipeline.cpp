#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fakery/pipeline.hpp"

using namespace fakery;
namespace fs = std::filesystem;

namespace {

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("fakery_test_" + name + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_files(const fs::path& root) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(root)) n += e.is_regular_file();
  return n;
}

double high_frequency_energy(const ImageRecord& img) {
  double e = 0.0;
  for (std::size_t ch = 0; ch < 3; ++ch) {
    SquareGrid<32> g;
    for (std::size_t r = 0; r < 32; ++r)
      for (std::size_t c = 0; c < 32; ++c) g[r * 32 + c] = img.at(r, c, ch) / 255.0;
    const auto X = dct2<32>(g);
    for (std::size_t u = 0; u < 32; ++u)
      for (std::size_t v = 0; v < 32; ++v)
        if (u >= 8 || v >= 8) e += X[u * 32 + v] * X[u * 32 + v];
  }
  return e;
}

RunConfig small_config(const fs::path& data, const fs::path& out) {
  RunConfig c;
  c.data_root = data;
  c.out_dir = out;
  c.features = {"mixed"};
  c.models = {"logreg"};
  c.gbdt_rounds = 20;
  c.forest_trees = 10;
  return c;
}

ResultRow row(const std::string& model, const std::string& spec, double bal) {
  MetricsReport m;
  m.pr_auc = m.roc_auc = m.f1 = 0.9;
  m.balanced_accuracy = bal;
  m.brier = 0.1;
  return {model, spec, m};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Fixture, CountsDeterminismAndPlantedSignal) {
  ScratchDir a("fixture_a"), b("fixture_b");
  make_fixture(a.path(), {.n_per_class = 6, .seed = 5});
  make_fixture(b.path(), {.n_per_class = 6, .seed = 5});
  EXPECT_EQ(count_files(a.path()), 24u);
  for (const auto& e : fs::recursive_directory_iterator(a.path()))
    if (e.is_regular_file()) { ASSERT_EQ(slurp(e.path()), slurp(b.path() / fs::relative(e.path(), a.path()))); }

  const auto entries = scan_dataset(a.path(), std::string("train"));
  ASSERT_EQ(entries.size(), 12u);
  const auto images = load_images(entries);
  std::vector<double> real, fake;
  for (const auto& im : images) (im.label ? fake : real).push_back(high_frequency_energy(im));
  std::sort(real.begin(), real.end());
  const double median = (real[2] + real[3]) / 2.0;
  for (double e : fake) EXPECT_LT(e, median);

  ScratchDir c("fixture_c");
  make_fixture(c.path(), {.n_per_class = 6, .seed = 6});
  EXPECT_NE(slurp(a.path() / "train/REAL/00000.png"), slurp(c.path() / "train/REAL/00000.png"));
  EXPECT_THROW(make_fixture(c.path(), {.n_per_class = 1}), ConfigError);
}

TEST(Fixture, NullSignalClassesLookAlike) {
  ScratchDir d("fixture_null");
  make_fixture(d.path(), {.n_per_class = 8, .seed = 3, .null_signal = true});
  const auto images = load_images(scan_dataset(d.path(), std::string("train")));
  double real = 0.0, fake = 0.0;
  for (const auto& im : images) (im.label ? fake : real) += high_frequency_energy(im) / 8.0;
  EXPECT_NEAR(real / fake, 1.0, 0.05);
}

TEST(Config, DefaultsAndMerging) {
  RunConfig c;
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.val_fraction, 0.10);
  EXPECT_EQ(c.voting_members, kDefaultVotingMembers);
  EXPECT_NO_THROW(c.validate());

  merge_json(c, nlohmann::json::parse(R"({"seed": 7, "models": ["logreg", "voting"], "features": "baseline,mixed",
                                          "val_fraction": 0.25, "train_limit": 100})"));
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.models, (std::vector<std::string>{"logreg", "voting"}));
  EXPECT_EQ(c.features, (std::vector<std::string>{"baseline", "mixed"}));
  EXPECT_EQ(c.val_fraction, 0.25);
  EXPECT_EQ(c.train_limit, 100u);

  const std::map<std::string, std::string> env{{"FAKERY_SEED", "9"}, {"FAKERY_TEST_LIMIT", "20"},
                                               {"FAKERY_MODELS", "gbdt_leafwise"}};
  merge_env(c, [&](const char* k) -> const char* {
    const auto it = env.find(k);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.test_limit, 20u);
  EXPECT_EQ(c.models, (std::vector<std::string>{"gbdt_leafwise"}));
  EXPECT_EQ(c.train_limit, 100u);

  EXPECT_THROW(set_config_value(c, "colour", "red"), ConfigError);
  EXPECT_THROW(set_config_value(c, "seed", "many"), ConfigError);
  RunConfig bad;
  bad.models = {"svm"};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = {};
  bad.features = {"raw+sift"};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = {};
  bad.voting_members = {"voting"};
  EXPECT_THROW(bad.validate(), ConfigError);

  ScratchDir d("config");
  {
    std::ofstream f(d.path() / "run.json");
    f << R"({"out_dir": "elsewhere", "gbdt_rounds": 12})";
  }
  RunConfig fromfile;
  merge_file(fromfile, d.path() / "run.json");
  EXPECT_EQ(fromfile.out_dir, fs::path("elsewhere"));
  EXPECT_EQ(fromfile.gbdt_rounds, 12u);
  EXPECT_THROW(merge_file(fromfile, d.path() / "absent.json"), ConfigError);
}

TEST(Pipeline, ExtractWritesCachesAndSkipsOnManifestHit) {
  ScratchDir d("extract");
  make_fixture(d.path() / "data", {.n_per_class = 4, .seed = 1});
  const auto cfg = small_config(d.path() / "data", d.path() / "out");
  std::ostringstream log;
  const auto first = cmd_extract(cfg, log);
  ASSERT_EQ(first.written.size(), 2u);
  const auto train = read_cache(cache_path(cfg, "train", "mixed"));
  EXPECT_EQ(train.features.rows(), 8u);
  EXPECT_EQ(train.features.cols(), 3673u);
  EXPECT_EQ(train.spec_tag, "mixed");
  const auto before = sha256_file(cache_path(cfg, "train", "mixed"));
  const auto second = cmd_extract(cfg, log);
  EXPECT_TRUE(second.written.empty());
  EXPECT_EQ(second.skipped.size(), 2u);
  EXPECT_EQ(sha256_file(cache_path(cfg, "train", "mixed")), before);

  // A different subsample invalidates the cache.
  auto limited = cfg;
  limited.train_limit = 4;
  EXPECT_EQ(cmd_extract(limited, log).written.size(), 1u);
  EXPECT_EQ(read_cache(cache_path(cfg, "train", "mixed")).features.rows(), 4u);

  const auto manifest = nlohmann::json::parse(slurp(cfg.out_dir / "manifest.json"));
  EXPECT_TRUE(manifest.contains("config"));
  EXPECT_TRUE(manifest.contains("updated_at"));
  EXPECT_EQ(manifest["caches"]["train/mixed"]["sha256"], sha256_file(cache_path(cfg, "train", "mixed")));
}

TEST(Pipeline, CacheConflictOnDimensionMismatch) {
  ScratchDir d("conflict");
  make_fixture(d.path() / "data", {.n_per_class = 2, .seed = 1});
  const auto cfg = small_config(d.path() / "data", d.path() / "out");
  const FloatMatrix wrong(4, 10);
  write_cache(wrong, std::vector<Label>{0, 0, 1, 1}, "mixed", cache_path(cfg, "train", "mixed"));
  std::ostringstream log;
  EXPECT_THROW(cmd_extract(cfg, log), CacheConflictError);
}

TEST(Pipeline, EndToEndDeterministicWithSeparableFixture) {
  ScratchDir d("e2e");
  make_fixture(d.path() / "data", {.n_per_class = 20, .seed = 2});
  std::ostringstream log;
  std::vector<std::string> thresholds, metrics;
  for (const char* out : {"out1", "out2"}) {
    auto cfg = small_config(d.path() / "data", d.path() / out);
    cfg.models = {"logreg", "gbdt_leafwise"};
    EXPECT_THROW(cmd_evaluate(cfg, log), MissingArtifactError);
    cmd_extract(cfg, log);
    EXPECT_THROW(cmd_evaluate(cfg, log), MissingArtifactError);
    const auto trained = cmd_train(cfg, log);
    EXPECT_EQ(trained.thresholds.at("mixed/logreg").val_f1, 1.0);
    const auto rows = cmd_evaluate(cfg, log);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) EXPECT_GE(r.metrics.roc_auc, 0.95) << r.model;
    const auto report = cmd_report(cfg, log);
    EXPECT_EQ(report.rows.size(), 2u);
    for (const auto& f : report.files) EXPECT_TRUE(fs::exists(f)) << f;
    for (const char* m : {"logreg", "gbdt_leafwise"}) {
      thresholds.push_back(slurp(run_dir(cfg, "mixed", m) / "threshold.json"));
      metrics.push_back(slurp(run_dir(cfg, "mixed", m) / "metrics.json"));
      EXPECT_TRUE(fs::exists(run_dir(cfg, "mixed", m) / "model.json"));
    }
    const auto j = nlohmann::json::parse(metrics.back());
    EXPECT_EQ(j.at("counts").at("tp").get<int>() + j.at("counts").at("fn").get<int>(), 20);
  }
  EXPECT_EQ(thresholds[0], thresholds[2]);
  EXPECT_EQ(thresholds[1], thresholds[3]);
  EXPECT_EQ(metrics[0], metrics[2]);
  EXPECT_EQ(metrics[1], metrics[3]);
}

TEST(Pipeline, TrendReportOnPlantedFixture) {
  ScratchDir d("trend");
  make_fixture(d.path() / "data", {.n_per_class = 30, .seed = 11});
  auto cfg = small_config(d.path() / "data", d.path() / "out");
  cfg.features = {"baseline", "advanced", "mixed"};
  cfg.models = {"logreg", "gbdt_leafwise"};
  std::ostringstream log;
  const auto report = cmd_run_all(cfg, log);
  EXPECT_EQ(report.rows.size(), 6u);
  EXPECT_EQ(line_count(slurp(cfg.out_dir / "report" / "metrics_long.csv")), 1u + 36u);
  const auto trend = slurp(cfg.out_dir / "report" / "trend.csv");
  EXPECT_EQ(line_count(trend), 3u) << trend;
  std::istringstream lines(trend);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    // model,baseline,advanced,mixed,flag: the flag must agree with the values.
    std::vector<std::string> cells;
    std::istringstream fields(line);
    for (std::string c; std::getline(fields, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 5u) << line;
    const double b = std::stod(cells[1]), a = std::stod(cells[2]), m = std::stod(cells[3]);
    EXPECT_EQ(cells[4], b <= a && a <= m ? "yes" : "no") << line;
    if (cells[0] == "gbdt_leafwise") { EXPECT_EQ(cells[4], "yes") << line; }
  }
  for (const char* spec : {"baseline", "advanced", "mixed"})
    EXPECT_TRUE(fs::exists(cfg.out_dir / "report" / (std::string("table_") + spec + ".md")));
}

TEST(Pipeline, ByteFlipInCacheIsDetected) {
  ScratchDir d("flip");
  make_fixture(d.path() / "data", {.n_per_class = 6, .seed = 4});
  const auto cfg = small_config(d.path() / "data", d.path() / "out");
  std::ostringstream log;
  cmd_extract(cfg, log);
  const auto path = cache_path(cfg, "train", "mixed");
  const auto size = fs::file_size(path);
  for (std::uintmax_t offset : {std::uintmax_t{3}, size / 2, size - 1}) {
    auto bytes = read_bytes(path);
    bytes[offset] ^= 0x01;
    {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    EXPECT_THROW(cmd_train(cfg, log), ChecksumError) << "offset " << offset;
    bytes[offset] ^= 0x01;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  EXPECT_NO_THROW(cmd_train(cfg, log));
}

TEST(Pipeline, VotingArtifactHoldsDefaultMembers) {
  ScratchDir d("voting");
  make_fixture(d.path() / "data", {.n_per_class = 10, .seed = 8});
  auto cfg = small_config(d.path() / "data", d.path() / "out");
  cfg.features = {"advanced"};
  cfg.models = {"voting"};
  std::ostringstream log;
  cmd_extract(cfg, log);
  cmd_train(cfg, log);
  const auto dir = run_dir(cfg, "advanced", "voting");
  const auto model = load_model(dir / "model.json");
  ASSERT_TRUE(std::holds_alternative<VotingModel>(model));
  const auto& v = std::get<VotingModel>(model);
  ASSERT_EQ(v.members.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(v.members[i].name, kDefaultVotingMembers[i]);
  EXPECT_TRUE(std::holds_alternative<LinearModel>(v.members[0].model));
  EXPECT_TRUE(std::holds_alternative<GbdtModel>(v.members[3].model));
  const auto members = nlohmann::json::parse(slurp(dir / "members.json"));
  EXPECT_EQ(members["members"].get<std::vector<std::string>>(), kDefaultVotingMembers);
  const auto rows = cmd_evaluate(cfg, log);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].model, "voting");
}

TEST(Report, RowArithmeticAndTables) {
  std::vector<ResultRow> rows;
  for (const char* spec : {"mixed", "baseline", "advanced"})
    for (const char* model : {"gbdt_leafwise", "logreg"})
      rows.push_back(row(model, spec, spec == std::string("baseline") ? 0.7 : spec == std::string("advanced") ? 0.8 : 0.9));
  sort_results(rows);
  EXPECT_EQ(rows.front().spec, "baseline");
  EXPECT_EQ(rows.front().model, "logreg");
  const auto longcsv = long_csv(rows);
  EXPECT_EQ(line_count(longcsv), 1u + 36u);
  EXPECT_EQ(longcsv.substr(0, longcsv.find('\n')), "model,spec,metric,value");

  const auto trend = trend_csv(rows);
  EXPECT_NE(trend.find("logreg,0.69999999999999996,0.80000000000000004,0.90000000000000002,yes"), std::string::npos)
      << trend;

  const std::vector<ResultRow> single{row("logreg", "mixed", 0.5)};
  const auto table = csv_table(single, "mixed");
  EXPECT_EQ(line_count(table), 2u);
  EXPECT_EQ(table.substr(0, table.find('\n')), "model,PR-AUC,ROC-AUC,F1,MCC,BalAcc,Brier");
  const auto md = markdown_table(single, "mixed");
  EXPECT_NE(md.find("| logreg | **0.9000** | **0.9000** | **0.9000** | **0.0000** | **0.5000** | **0.1000** |"),
            std::string::npos)
      << md;

  std::vector<ResultRow> two{row("logreg", "mixed", 0.5), row("gbdt_leafwise", "mixed", 0.6)};
  two[1].metrics.brier = 0.3;
  const auto md2 = markdown_table(two, "mixed");
  EXPECT_NE(md2.find("| **0.6000** | 0.3000 |"), std::string::npos) << md2;
  EXPECT_NE(md2.find("| 0.5000 | **0.1000** |"), std::string::npos) << md2;

  std::vector<ResultRow> dip{row("logreg", "baseline", 0.8), row("logreg", "advanced", 0.7),
                             row("logreg", "mixed", 0.9)};
  EXPECT_NE(trend_csv(dip).find(",no\n"), std::string::npos);
}

TEST(Report, NoResults) {
  ScratchDir d("noresults");
  RunConfig cfg;
  cfg.out_dir = d.path();
  std::ostringstream log;
  EXPECT_THROW(cmd_report(cfg, log), NoResultsError);
}

TEST(Cli, ErrorsAreMachineReadable) {
  ScratchDir d("cli");
  const std::string cli = FAKERY_CLI_PATH;
  const auto err = d.path() / "err.txt";
  const auto run = [&](const std::string& args) {
    return std::system((cli + " " + args + " 2>" + err.string() + " >/dev/null").c_str());
  };
  EXPECT_NE(run("evaluate --out " + (d.path() / "nothing").string() + " --features mixed --models logreg"), 0);
  auto j = nlohmann::json::parse(slurp(err));
  EXPECT_EQ(j["error"], "MissingArtifactError");
  EXPECT_TRUE(j.contains("message"));

  EXPECT_NE(run("train --models svm"), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(err))["error"], "ConfigError");

  EXPECT_EQ(run("make-fixture --out " + (d.path() / "fx").string() + " --n-per-class 3 --seed 4"), 0);
  EXPECT_EQ(count_files(d.path() / "fx"), 12u);
  EXPECT_NE(run("make-fixture --out " + (d.path() / "fx2").string() + " --n-per-class 1"), 0);
  EXPECT_NE(run("no-such-command"), 0);
}
