#include "surfmon/config.hpp"

#include <fstream>
#include <set>

#include "surfmon/bridge_client.hpp"
#include "surfmon/error.hpp"

namespace surfmon {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw Error(ErrorKind::Config, "unknown key " + where + key);
  }
}

const json* section(const json& doc, const char* name) {
  const auto it = doc.find(name);
  if (it == doc.end()) return nullptr;
  if (!it->is_object()) throw Error(ErrorKind::Config, std::string(name) + " must be an object");
  return &*it;
}

template <typename T>
void read_number(const json& obj, const char* key, const std::string& where, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) throw Error(ErrorKind::Config, where + key + " must be an integer");
  } else {
    if (!it->is_number()) throw Error(ErrorKind::Config, where + key + " must be a number");
  }
  out = it->get<T>();
}

std::string read_string(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw Error(ErrorKind::Config, where + key + " must be a string");
  return v.get<std::string>();
}

}  // namespace

void PipelineConfig::validate() const {
  try {
    window.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  segmenter.validate();
  thresholds.validate();
  cluster.validate();
  if (decision_threshold && !(*decision_threshold >= 0.0)) {
    throw Error(ErrorKind::Config, "decision_threshold must be >= 0");
  }
  if (!(ewma.lambda > 0.0 && ewma.lambda < 1.0)) throw Error(ErrorKind::Config, "ewma.lambda must lie in (0, 1)");
  if (!(ewma.quantile > 0.0 && ewma.quantile < 1.0)) throw Error(ErrorKind::Config, "ewma.quantile must lie in (0, 1)");
  if (segmenter_timeout_ms < 1) throw Error(ErrorKind::Config, "segmenter.timeout_ms must be >= 1");
}

AnalysisParams PipelineConfig::analysis_params(double threshold) const {
  return {window, thresholds, cluster, threshold, normalize_brightness};
}

PipelineConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
  reject_unknown(doc, "", {"window", "segmenter", "thresholds", "cluster", "decision_threshold", "ewma", "preprocess"});
  PipelineConfig c;

  if (const json* w = section(doc, "window")) {
    reject_unknown(*w, "window.", {"width", "height", "step_w", "step_h", "edge_complete"});
    read_number(*w, "width", "window.", c.window.window_width);
    read_number(*w, "height", "window.", c.window.window_height);
    read_number(*w, "step_w", "window.", c.window.width_step);
    read_number(*w, "step_h", "window.", c.window.height_step);
    if (w->contains("edge_complete")) c.window.edge_complete = w->at("edge_complete").get<bool>();
  }

  if (const json* s = section(doc, "segmenter")) {
    reject_unknown(*s, "segmenter.", {"backend", "threshold", "polarity", "connectivity", "fixture_path", "endpoint",
                                      "options", "emit_rle", "timeout_ms"});
    auto& seg = c.segmenter;
    if (s->contains("backend")) {
      const std::string b = read_string(*s, "backend", "segmenter.");
      if (b == "reference") seg.backend = BackendKind::Reference;
      else if (b == "scripted") seg.backend = BackendKind::Scripted;
      else if (b == "external") seg.backend = BackendKind::External;
      else throw Error(ErrorKind::Config, "segmenter.backend must be reference, scripted or external");
    }
    if (const auto t = s->find("threshold"); t != s->end()) {
      if (t->is_string() && t->get<std::string>() == "otsu") seg.threshold = IntensityThreshold::automatic();
      else if (t->is_number_integer()) seg.threshold = IntensityThreshold::fixed(t->get<int>());
      else throw Error(ErrorKind::Config, "segmenter.threshold must be an integer or \"otsu\"");
    }
    if (s->contains("polarity")) {
      const std::string p = read_string(*s, "polarity", "segmenter.");
      if (p == "dark_foreground") seg.polarity = Polarity::DarkForeground;
      else if (p == "light_foreground") seg.polarity = Polarity::LightForeground;
      else throw Error(ErrorKind::Config, "segmenter.polarity must be dark_foreground or light_foreground");
    }
    read_number(*s, "connectivity", "segmenter.", seg.connectivity);
    if (s->contains("fixture_path")) {
      std::filesystem::path p = read_string(*s, "fixture_path", "segmenter.");
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      seg.fixture_path = p.string();
    }
    if (s->contains("endpoint")) seg.endpoint = read_string(*s, "endpoint", "segmenter.");
    if (s->contains("options")) {
      if (!s->at("options").is_object()) throw Error(ErrorKind::Config, "segmenter.options must be an object");
      seg.options = s->at("options");
    }
    if (s->contains("emit_rle")) seg.emit_rle = s->at("emit_rle").get<bool>();
    read_number(*s, "timeout_ms", "segmenter.", c.segmenter_timeout_ms);
  }

  if (const json* t = section(doc, "thresholds")) {
    reject_unknown(*t, "thresholds.", {"lower", "upper"});
    read_number(*t, "lower", "thresholds.", c.thresholds.lower);
    read_number(*t, "upper", "thresholds.", c.thresholds.upper);
  }

  if (const json* k = section(doc, "cluster")) {
    reject_unknown(*k, "cluster.", {"tolerance", "area_mode"});
    read_number(*k, "tolerance", "cluster.", c.cluster.tolerance);
    if (k->contains("area_mode")) {
      const std::string m = read_string(*k, "area_mode", "cluster.");
      if (m == "bbox") c.cluster.area_mode = AreaMode::BBox;
      else if (m == "pixel_count") c.cluster.area_mode = AreaMode::PixelCount;
      else throw Error(ErrorKind::Config, "cluster.area_mode must be bbox or pixel_count");
    }
  }

  if (const auto d = doc.find("decision_threshold"); d != doc.end()) {
    if (d->is_string() && d->get<std::string>() == "calibrated") c.decision_threshold.reset();
    else if (d->is_number()) c.decision_threshold = d->get<double>();
    else throw Error(ErrorKind::Config, "decision_threshold must be a number or \"calibrated\"");
  }

  if (const json* e = section(doc, "ewma")) {
    reject_unknown(*e, "ewma.", {"lambda", "quantile"});
    read_number(*e, "lambda", "ewma.", c.ewma.lambda);
    read_number(*e, "quantile", "ewma.", c.ewma.quantile);
  }

  if (const json* p = section(doc, "preprocess")) {
    reject_unknown(*p, "preprocess.", {"normalize_brightness"});
    if (p->contains("normalize_brightness")) c.normalize_brightness = p->at("normalize_brightness").get<bool>();
  }

  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
    return config_from_json(doc, path.parent_path());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, path.string() + ": " + e.what());
  }
}

json to_json(const PipelineConfig& c) {
  const auto& seg = c.segmenter;
  json s{{"backend", seg.backend == BackendKind::Reference  ? "reference"
                     : seg.backend == BackendKind::Scripted ? "scripted"
                                                            : "external"},
         {"polarity", seg.polarity == Polarity::DarkForeground ? "dark_foreground" : "light_foreground"},
         {"connectivity", seg.connectivity},
         {"emit_rle", seg.emit_rle},
         {"timeout_ms", c.segmenter_timeout_ms}};
  s["threshold"] = seg.threshold.otsu ? json("otsu") : json(seg.threshold.value);
  if (!seg.fixture_path.empty()) s["fixture_path"] = seg.fixture_path;
  if (!seg.endpoint.empty()) s["endpoint"] = seg.endpoint;
  if (!seg.options.empty()) s["options"] = seg.options;

  json doc{{"window",
            {{"width", c.window.window_width},
             {"height", c.window.window_height},
             {"step_w", c.window.width_step},
             {"step_h", c.window.height_step},
             {"edge_complete", c.window.edge_complete}}},
           {"segmenter", std::move(s)},
           {"thresholds", {{"lower", c.thresholds.lower}, {"upper", c.thresholds.upper}}},
           {"cluster",
            {{"tolerance", c.cluster.tolerance},
             {"area_mode", c.cluster.area_mode == AreaMode::BBox ? "bbox" : "pixel_count"}}},
           {"ewma", {{"lambda", c.ewma.lambda}, {"quantile", c.ewma.quantile}}},
           {"preprocess", {{"normalize_brightness", c.normalize_brightness}}}};
  doc["decision_threshold"] = c.decision_threshold ? json(*c.decision_threshold) : json("calibrated");
  return doc;
}

std::unique_ptr<Segmenter> make_segmenter(const PipelineConfig& config) {
  config.segmenter.validate();
  if (config.segmenter.backend == BackendKind::External) {
    return make_bridge_client(config.segmenter.endpoint, config.segmenter.options,
                              std::chrono::milliseconds(config.segmenter_timeout_ms));
  }
  return make_segmenter(config.segmenter);
}

}  // namespace surfmon
