#include "ckm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ckm/error.hpp"

namespace ckm {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) fail(Errc::InvalidConfig, where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(Errc::InvalidConfig, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& field) {
  if (!obj.contains(key)) return;
  try {
    field = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(Errc::InvalidConfig, std::string("field '") + key + "': " + e.what());
  }
}

void positive(double v, const char* name) {
  if (!(v > 0.0)) fail(Errc::InvalidConfig, std::string(name) + " must be positive");
}

void positive(std::size_t v, const char* name) {
  if (v == 0) fail(Errc::InvalidConfig, std::string(name) + " must be positive");
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
  const auto& s = c.spec;
  if (s.num_base_classes < 2) fail(Errc::InvalidConfig, "spec.num_base_classes must be at least 2");
  if (s.num_novel_classes < 1) fail(Errc::InvalidConfig, "spec.num_novel_classes must be at least 1");
  if (s.dim < 2) fail(Errc::InvalidConfig, "spec.dim must be at least 2");
  positive(s.mean_radius, "spec.mean_radius");
  positive(s.class_spread, "spec.class_spread");
  positive(s.background_spread, "spec.background_spread");
  if (!(s.shift_magnitude >= 0.0)) fail(Errc::InvalidConfig, "spec.shift_magnitude must be >= 0");
  if (!(s.jitter_spread >= 0.0)) fail(Errc::InvalidConfig, "spec.jitter_spread must be >= 0");

  positive(c.source_foreground, "source_foreground");
  positive(c.target_foreground, "target_foreground");
  positive(c.eval_foreground, "eval_foreground");
  positive(c.gamma, "gamma");
  positive(c.top_k, "top_k");
  if (!(c.beta > 0.0 && c.beta <= 1.0)) fail(Errc::InvalidConfig, "beta must lie in (0, 1]");
  if (!(c.fg_threshold >= 0.0 && c.fg_threshold <= 1.0)) {
    fail(Errc::InvalidConfig, "fg_threshold must lie in [0, 1]");
  }
  positive(c.learning_rate, "learning_rate");
  positive(c.lambda_novel, "lambda_novel");
  positive(c.lambda_adaptive, "lambda_adaptive");
  positive(c.eval_every, "eval_every");
  if (c.source_background + c.source_novel < c.top_k) {
    fail(Errc::InvalidConfig, "source_background + source_novel must be at least top_k");
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    fail(Errc::InvalidConfig, e.what());
  }
  reject_unknown(doc,
                 {"spec", "iterations", "source_foreground", "source_background", "source_novel",
                  "target_foreground", "target_background", "eval_foreground", "eval_background",
                  "gamma", "top_k", "beta", "fg_threshold", "learning_rate", "lambda_novel",
                  "lambda_adaptive", "seed", "eval_every", "snapshot_every", "out_dir"},
                 "config");

  ExperimentConfig c;
  if (doc.contains("spec")) {
    const json& s = doc["spec"];
    reject_unknown(s,
                   {"num_base_classes", "num_novel_classes", "dim", "mean_radius", "class_spread",
                    "background_spread", "shift_magnitude", "jitter_spread", "novel_offset", "scores"},
                   "spec");
    read(s, "num_base_classes", c.spec.num_base_classes);
    read(s, "num_novel_classes", c.spec.num_novel_classes);
    read(s, "dim", c.spec.dim);
    read(s, "mean_radius", c.spec.mean_radius);
    read(s, "class_spread", c.spec.class_spread);
    read(s, "background_spread", c.spec.background_spread);
    read(s, "shift_magnitude", c.spec.shift_magnitude);
    read(s, "jitter_spread", c.spec.jitter_spread);
    read(s, "novel_offset", c.spec.novel_offset);
    if (s.contains("scores")) {
      const json& sc = s["scores"];
      reject_unknown(sc, {"foreground_low", "foreground_high", "background_low", "background_high"},
                     "spec.scores");
      read(sc, "foreground_low", c.spec.scores.foreground_low);
      read(sc, "foreground_high", c.spec.scores.foreground_high);
      read(sc, "background_low", c.spec.scores.background_low);
      read(sc, "background_high", c.spec.scores.background_high);
    }
  }
  read(doc, "iterations", c.iterations);
  read(doc, "source_foreground", c.source_foreground);
  read(doc, "source_background", c.source_background);
  read(doc, "source_novel", c.source_novel);
  read(doc, "target_foreground", c.target_foreground);
  read(doc, "target_background", c.target_background);
  read(doc, "eval_foreground", c.eval_foreground);
  read(doc, "eval_background", c.eval_background);
  read(doc, "gamma", c.gamma);
  read(doc, "top_k", c.top_k);
  read(doc, "beta", c.beta);
  read(doc, "fg_threshold", c.fg_threshold);
  read(doc, "learning_rate", c.learning_rate);
  read(doc, "lambda_novel", c.lambda_novel);
  read(doc, "lambda_adaptive", c.lambda_adaptive);
  read(doc, "seed", c.seed);
  read(doc, "eval_every", c.eval_every);
  read(doc, "snapshot_every", c.snapshot_every);
  read(doc, "out_dir", c.out_dir);
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::InvalidConfig, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  const auto& s = c.spec;
  json doc = {
      {"spec",
       {{"num_base_classes", s.num_base_classes},
        {"num_novel_classes", s.num_novel_classes},
        {"dim", s.dim},
        {"mean_radius", s.mean_radius},
        {"class_spread", s.class_spread},
        {"background_spread", s.background_spread},
        {"shift_magnitude", s.shift_magnitude},
        {"jitter_spread", s.jitter_spread},
        {"novel_offset", s.novel_offset},
        {"scores",
         {{"foreground_low", s.scores.foreground_low},
          {"foreground_high", s.scores.foreground_high},
          {"background_low", s.scores.background_low},
          {"background_high", s.scores.background_high}}}}},
      {"iterations", c.iterations},
      {"source_foreground", c.source_foreground},
      {"source_background", c.source_background},
      {"source_novel", c.source_novel},
      {"target_foreground", c.target_foreground},
      {"target_background", c.target_background},
      {"eval_foreground", c.eval_foreground},
      {"eval_background", c.eval_background},
      {"gamma", c.gamma},
      {"top_k", c.top_k},
      {"beta", c.beta},
      {"fg_threshold", c.fg_threshold},
      {"learning_rate", c.learning_rate},
      {"lambda_novel", c.lambda_novel},
      {"lambda_adaptive", c.lambda_adaptive},
      {"seed", c.seed},
      {"eval_every", c.eval_every},
      {"snapshot_every", c.snapshot_every},
      {"out_dir", c.out_dir},
  };
  return doc.dump(2);
}

}  // namespace ckm
