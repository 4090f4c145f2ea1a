// Experiment driver: run, inspect-bank, report.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ckm/error.hpp"
#include "ckm/experiment.hpp"
#include "ckm/memory_bank.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int run_command(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed, std::optional<std::size_t> snapshot_every) {
  ckm::ExperimentConfig config;
  try {
    config = ckm::load_config(config_path);
    if (seed) config.seed = *seed;
    if (snapshot_every) config.snapshot_every = *snapshot_every;
    config.out_dir = out_dir;
    ckm::validate_config(config);
  } catch (const ckm::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    fs::create_directories(out_dir);
    ckm::RunOptions options;
    options.on_snapshot = [&](std::size_t iter, const ckm::MemoryBank& bank) {
      write_file(fs::path(out_dir) / ("bank_" + std::to_string(iter) + ".json"), ckm::snapshot(bank));
    };
    const ckm::ExperimentReport report = ckm::run_experiment(config, options);
    write_file(fs::path(out_dir) / "metrics.csv", ckm::metrics_csv(report));
    write_file(fs::path(out_dir) / "summary.json", ckm::summary_json(config, report));

    const auto& m = report.summary.metrics;
    std::cout << "iterations " << config.iterations << "\n"
              << "afa base accuracy " << m.base_accuracy.value_or(NAN) << "\n"
              << "baseline accuracy " << report.baseline_accuracy.value_or(NAN) << "\n"
              << "novel recall " << m.novel_recall.value_or(NAN) << "\n"
              << "selection precision " << m.selection_precision.value_or(NAN) << " (chance "
              << report.selection_chance_rate.value_or(NAN) << ")\n"
              << "outputs in " << out_dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int inspect_command(const std::string& path) {
  try {
    const ckm::MemoryBank bank = ckm::load_snapshot(read_file(path));
    std::cout << "C " << bank.num_base_classes << "  dim " << bank.dim << "  momentum "
              << bank.momentum << "\n";
    for (std::size_t c = 0; c < bank.num_base_classes; ++c) {
      std::cout << "class " << c + 1 << "  |prototype| " << ckm::norm(bank.base_prototypes[c])
                << "  |aux+ - aux-| "
                << ckm::euclidean_distance(bank.base_aux_plus[c], bank.base_aux_minus[c])
                << "  |disparity| " << ckm::norm(bank.base_disparity[c]) << "\n";
    }
    const double drift =
        std::max(ckm::euclidean_distance(bank.novel_aux_plus,
                                         ckm::add(bank.novel_prototype, bank.novel_disparity)),
                 ckm::euclidean_distance(bank.novel_aux_minus,
                                         ckm::subtract(bank.novel_prototype, bank.novel_disparity)));
    std::cout << "novel  |prototype| " << ckm::norm(bank.novel_prototype) << "  |disparity| "
              << ckm::norm(bank.novel_disparity) << "  aux consistency error " << drift << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int report_command(const std::string& out_dir) {
  try {
    const std::string json = ckm::csv_to_json(read_file(fs::path(out_dir) / "metrics.csv"));
    write_file(fs::path(out_dir) / "metrics.json", json);
    std::cout << json << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Category memory bank experiments on a synthetic cross-domain benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> snapshot_every;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--snapshot-every", snapshot_every, "Write bank_<iter>.json every N iterations");

  std::string snapshot_path;
  auto* inspect = app.add_subcommand("inspect-bank", "Summarize a memory bank snapshot");
  inspect->add_option("--snapshot", snapshot_path, "Snapshot file")->required();

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Render metrics.csv as metrics.json");
  report->add_option("--out", report_dir, "Run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*run) return run_command(config_path, out_dir, seed, snapshot_every);
  if (*inspect) return inspect_command(snapshot_path);
  return report_command(report_dir);
}
