// fakery: command-line front end for the feature pipeline.
//
// Configuration precedence, lowest first: built-in defaults, --config file,
// FAKERY_* environment variables, command-line flags.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "fakery/pipeline.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> data_root, features, models, out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> train_limit, test_limit, gbdt_rounds, forest_trees;
};

void add_run_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration");
  cmd->add_option("--data-root", o.data_root, "dataset root containing {train,test}/{REAL,FAKE}");
  cmd->add_option("--features", o.features, "comma-separated feature specs (baseline,advanced,mixed,raw+dct,...)");
  cmd->add_option("--models", o.models, "comma-separated model names");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--train-limit", o.train_limit, "cap on training images (0 = all)");
  cmd->add_option("--test-limit", o.test_limit, "cap on test images (0 = all)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--gbdt-rounds", o.gbdt_rounds, "boosting rounds");
  cmd->add_option("--forest-trees", o.forest_trees, "trees per forest");
}

fakery::RunConfig resolve(const Overrides& o) {
  fakery::RunConfig c;
  if (!o.config_path.empty()) fakery::merge_file(c, o.config_path);
  fakery::merge_env(c);
  if (o.data_root) c.data_root = *o.data_root;
  if (o.features) c.features = fakery::split_list(*o.features);
  if (o.models) c.models = fakery::split_list(*o.models);
  if (o.out) c.out_dir = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.train_limit) c.train_limit = *o.train_limit;
  if (o.test_limit) c.test_limit = *o.test_limit;
  if (o.gbdt_rounds) c.gbdt_rounds = *o.gbdt_rounds;
  if (o.forest_trees) c.forest_trees = *o.forest_trees;
  c.validate();
  return c;
}

int fail(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << std::endl;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Handcrafted-feature detector for real vs synthetic 32x32 images"};
  app.require_subcommand(1);

  Overrides o;
  auto* extract = app.add_subcommand("extract", "decode images and write feature caches");
  auto* train = app.add_subcommand("train", "fit models and tune thresholds on validation");
  auto* evaluate = app.add_subcommand("evaluate", "score the test split at the tuned thresholds");
  auto* report = app.add_subcommand("report", "write result tables and plot data");
  auto* run_all = app.add_subcommand("run-all", "extract, train, evaluate and report");
  for (auto* cmd : {extract, train, evaluate, report, run_all}) add_run_flags(cmd, o);

  std::string fixture_out;
  fakery::FixtureOptions fixture;
  auto* make_fixture = app.add_subcommand("make-fixture", "write a synthetic dataset tree");
  make_fixture->add_option("--out", fixture_out, "output directory")->required();
  make_fixture->add_option("--n-per-class", fixture.n_per_class, "images per class per split");
  make_fixture->add_option("--seed", fixture.seed, "random seed");
  make_fixture->add_flag("--null-signal", fixture.null_signal, "draw both classes from the same distribution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fail("UsageError", e.what());
  }

  try {
    if (make_fixture->parsed()) {
      fakery::make_fixture(fixture_out, fixture);
      std::cerr << "make-fixture: wrote " << 4 * fixture.n_per_class << " images to " << fixture_out << "\n";
      return 0;
    }
    const auto config = resolve(o);
    if (extract->parsed()) fakery::cmd_extract(config, std::cerr);
    if (train->parsed()) fakery::cmd_train(config, std::cerr);
    if (evaluate->parsed()) fakery::cmd_evaluate(config, std::cerr);
    if (report->parsed()) fakery::cmd_report(config, std::cout);
    if (run_all->parsed()) fakery::cmd_run_all(config, std::cerr);
    return 0;
  } catch (const fakery::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("InternalError", e.what());
  }
}
