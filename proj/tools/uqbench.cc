// uqbench command line.
#include <httplib.h>

#include <CLI11.hpp>
#include <csignal>
#include <iostream>

#include "uqbench/calib/service.h"
#include "uqbench/core/errors.h"
#include "uqbench/core/jsonl.h"
#include "uqbench/datasets/clevr.h"
#include "uqbench/datasets/vizwiz.h"
#include "uqbench/runner/pipeline.h"
#include "uqbench/runner/report.h"

namespace fs = std::filesystem;
using namespace uqbench;

namespace {

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int run_stage(const std::string& which, const fs::path& config_path) {
  runner::Experiment exp(runner::ExperimentConfig::load(config_path));
  std::vector<runner::StageOutcome> outcomes;
  if (which == "perturb") outcomes.push_back(exp.perturb());
  if (which == "infer") outcomes.push_back(exp.infer());
  if (which == "score") outcomes.push_back(exp.score());
  if (which == "evaluate") outcomes.push_back(exp.evaluate());
  if (which == "run") outcomes = exp.run();
  for (const auto& o : outcomes) {
    std::cerr << runner::stage_name(o.stage) << ": " << o.instances << " instances, "
              << o.failed << " failed" << (o.reused ? " (up to date)" : "") << "\n";
  }
  return runner::exit_code_for(outcomes);
}

std::pair<std::string, fs::path> split_dataset(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) {
    return {fs::path(arg).stem().string(), fs::path(arg)};
  }
  return {arg.substr(0, eq), fs::path(arg.substr(eq + 1))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uqbench: perturbation-driven uncertainty benchmark for VLMs"};
  app.require_subcommand(1);

  fs::path config;
  for (const char* name : {"perturb", "infer", "score", "evaluate", "run"}) {
    const std::string what = name;
    auto* sub = app.add_subcommand(
        name, what == "run" ? "run all four stages" : "run the " + what + " stage");
    sub->add_option("--config", config, "experiment config (JSON)")->required();
  }

  fs::path annotations, subsets_out;
  std::string cross_rule = "coverage";
  auto* subsets = app.add_subcommand("build-subsets", "filter VizWiz annotations into subsets");
  subsets->add_option("--annotations", annotations)->required();
  subsets->add_option("--out", subsets_out, "output directory")->required();
  subsets->add_option("--cross-rule", cross_rule, "coverage | strict");

  fs::path scenes, clevr_out;
  int per_type = 50;
  std::uint64_t clevr_seed = 0;
  auto* clevr = app.add_subcommand("generate-clevr", "generate CLEVR question/answer pairs");
  clevr->add_option("--scenes", scenes)->required();
  clevr->add_option("--per-type", per_type);
  clevr->add_option("--seed", clevr_seed);
  clevr->add_option("--out", clevr_out, "output JSONL file")->required();

  int port = 8080;
  std::string host = "127.0.0.1";
  std::vector<std::string> datasets;
  fs::path calibration = "calibration.json";
  fs::path static_dir;
  auto* serve = app.add_subcommand("serve", "start the calibration service");
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  serve->add_option("--dataset", datasets, "name=instances.jsonl (repeatable)");
  serve->add_option("--calibration", calibration);
  serve->add_option("--static", static_dir, "directory with UI assets");

  fs::path report_path;
  std::string metric = "auroc";
  auto* heatmap = app.add_subcommand("heatmap", "print estimator x kind CSV for a metric");
  heatmap->add_option("--report", report_path)->required();
  heatmap->add_option("--metric", metric);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto* sub = app.get_subcommands().front();
    const auto name = sub->get_name();
    if (name == "perturb" || name == "infer" || name == "score" || name == "evaluate" ||
        name == "run") {
      return run_stage(name, config);
    }
    if (name == "build-subsets") {
      const auto rule = datasets::parse_cross_rule(cross_rule);
      if (!rule) throw ParameterError("unknown cross rule: " + cross_rule);
      const auto build =
          datasets::build_subsets(datasets::read_vizwiz_annotations(annotations), *rule);
      fs::create_directories(subsets_out);
      write_jsonl(subsets_out / "instances.jsonl", build.instances);
      Json counts = Json::object();
      for (auto s : {datasets::VizwizSubset::kClean, datasets::VizwizSubset::kVisual,
                     datasets::VizwizSubset::kTextual, datasets::VizwizSubset::kCross}) {
        counts[std::string(datasets::subset_name(s))] = build.counts[static_cast<int>(s)];
      }
      counts["unassigned"] = build.unassigned;
      std::cout << counts.dump() << "\n";
      return 0;
    }
    if (name == "generate-clevr") {
      const auto qas =
          datasets::generate_clevr(datasets::read_scenes(scenes), per_type, clevr_seed);
      if (clevr_out.has_parent_path()) fs::create_directories(clevr_out.parent_path());
      write_jsonl(clevr_out, datasets::to_instances(qas));
      std::cerr << "wrote " << qas.size() << " questions to " << clevr_out << "\n";
      return 0;
    }
    if (name == "serve") {
      calib::ServiceOptions opts;
      for (const auto& d : datasets) opts.datasets.insert(split_dataset(d));
      opts.calibration = calibration;
      if (!static_dir.empty()) opts.static_dir = static_dir;
      calib::CalibService service(std::move(opts));
      httplib::Server server;
      calib::mount(server, service);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        std::cerr << "error: could not bind " << host << ":" << port << "\n";
        return 1;
      }
      return 0;
    }
    if (name == "heatmap") {
      std::cout << runner::emit_heatmap_data(Json::parse(read_file(report_path)), metric);
      return 0;
    }
  } catch (const runner::AbortError& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
