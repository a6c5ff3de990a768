// Copyright 2026 The Mapforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mapforge/io.hpp"

#include <fstream>
#include <sstream>

namespace mapforge::io
{
using nlohmann::json;

namespace
{

double number_field(const json & j, const char * name)
{
  if (!j.contains(name) || !j.at(name).is_number()) {
    throw IoError(std::string("missing or non-numeric field '") + name + "'");
  }
  return j.at(name).get<double>();
}

std::string string_field(const json & j, const char * name)
{
  if (!j.contains(name) || !j.at(name).is_string() || j.at(name).get<std::string>().empty()) {
    throw IoError(std::string("missing or empty string field '") + name + "'");
  }
  return j.at(name).get<std::string>();
}

PredictedElement prediction_from_json(const json & j)
{
  PredictedElement p;
  p.element = element_from_json(j);
  p.confidence = j.contains("confidence") ? number_field(j, "confidence") : 1.0;
  if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
    throw IoError("prediction confidence must lie in [0, 1]");
  }
  if (j.contains("scores")) {
    const auto & s = j.at("scores");
    if (!s.is_array() || s.size() != kNumClasses) {
      throw IoError("prediction 'scores' must hold one value per class");
    }
    std::array<double, kNumClasses> scores{};
    for (std::size_t i = 0; i < kNumClasses; ++i) {
      scores[i] = s.at(i).get<double>();
    }
    p.scores = scores;
  }
  return p;
}

json prediction_to_json(const PredictedElement & p)
{
  json j = element_to_json(p.element);
  j["confidence"] = p.confidence;
  if (p.scores) {
    j["scores"] = *p.scores;
  }
  return j;
}

json variant_json(const assign::PointOrderVariant & v)
{
  return json{{"reversed", v.reversed}, {"shift", v.shift}};
}

}  // namespace

std::array<double, kNumClasses> PredictedElement::class_scores() const
{
  if (scores) {
    return *scores;
  }
  std::array<double, kNumClasses> out{};
  out[class_index(element.label)] = confidence;
  return out;
}

json element_to_json(const MapElement & e)
{
  json pts = json::array();
  for (const auto & p : e.points) {
    pts.push_back(json::array({p.x, p.y}));
  }
  return json{{"class", std::string(to_string(e.label))}, {"closed", e.closed}, {"points", std::move(pts)}};
}

MapElement element_from_json(const json & j)
{
  if (!j.is_object()) {
    throw IoError("map element must be a JSON object");
  }
  const std::string name = string_field(j, "class");
  const auto label = parse_class_label(name);
  if (!label) {
    throw IoError("unknown class '" + name + "'");
  }
  MapElement e;
  e.label = *label;
  e.closed = is_closed_class(*label);
  if (j.contains("closed")) {
    if (!j.at("closed").is_boolean() || j.at("closed").get<bool>() != e.closed) {
      throw IoError("field 'closed' contradicts class '" + name + "'");
    }
  }
  if (!j.contains("points") || !j.at("points").is_array()) {
    throw IoError("map element needs a 'points' array");
  }
  for (const auto & p : j.at("points")) {
    if (!p.is_array() || p.size() != 2 || !p.at(0).is_number() || !p.at(1).is_number()) {
      throw IoError("each point must be a [x, y] pair of numbers");
    }
    e.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  try {
    e.validate();
  } catch (const GeometryError & err) {
    throw IoError(err.what());
  }
  return e;
}

json scene_to_json(const SceneRecord & s)
{
  json elements = json::array();
  for (const auto & e : s.elements) {
    elements.push_back(element_to_json(e));
  }
  json j{
    {"scene_id", s.scene_id},
    {"frame_id", s.frame_id},
    {"ego_pose", {{"x", s.ego_pose.x}, {"y", s.ego_pose.y}, {"yaw", s.ego_pose.yaw}}},
    {"elements", std::move(elements)}};
  if (s.predictions) {
    json preds = json::array();
    for (const auto & p : *s.predictions) {
      preds.push_back(prediction_to_json(p));
    }
    j["predictions"] = std::move(preds);
  }
  return j;
}

SceneRecord scene_from_json(const json & j)
{
  if (!j.is_object()) {
    throw IoError("scene record must be a JSON object");
  }
  SceneRecord s;
  s.scene_id = string_field(j, "scene_id");
  s.frame_id = string_field(j, "frame_id");
  if (j.contains("ego_pose")) {
    const auto & pose = j.at("ego_pose");
    s.ego_pose = {number_field(pose, "x"), number_field(pose, "y"), number_field(pose, "yaw")};
  }
  if (j.contains("elements")) {
    if (!j.at("elements").is_array()) {
      throw IoError("'elements' must be an array");
    }
    for (const auto & e : j.at("elements")) {
      s.elements.push_back(element_from_json(e));
    }
  }
  if (j.contains("predictions")) {
    if (!j.at("predictions").is_array()) {
      throw IoError("'predictions' must be an array");
    }
    std::vector<PredictedElement> preds;
    for (const auto & p : j.at("predictions")) {
      preds.push_back(prediction_from_json(p));
    }
    s.predictions = std::move(preds);
  }
  return s;
}

std::vector<SceneRecord> parse_scenes(std::istream & in, const std::string & source_name)
{
  std::vector<SceneRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      out.push_back(scene_from_json(json::parse(line)));
    } catch (const std::exception & err) {
      throw IoError(source_name + ":" + std::to_string(line_no) + ": " + err.what());
    }
  }
  return out;
}

std::vector<SceneRecord> read_scenes(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return parse_scenes(in, path.string());
}

std::string dump_compact(const json & j) { return j.dump(); }

void write_jsonl(const std::filesystem::path & path, const std::vector<json> & lines)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  for (const auto & line : lines) {
    out << dump_compact(line) << '\n';
  }
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

json denoise_groups_to_json(const SceneRecord & frame, const std::vector<ppdn::DenoiseGroup> & groups)
{
  json jgroups = json::array();
  for (const auto & g : groups) {
    json items = json::array();
    for (const auto & item : g.items) {
      items.push_back(json{
        {"gt_index", item.gt_index},
        {"element", element_to_json(item.noised)},
        {"applied",
         {{"theta", item.applied.theta},
          {"dx", item.applied.dx},
          {"dy", item.applied.dy},
          {"sx", item.applied.sx},
          {"sy", item.applied.sy},
          {"c", item.applied.c},
          {"curvature_applied", item.applied.curvature_applied}}}});
    }
    jgroups.push_back(json{{"group_index", g.group_index}, {"items", std::move(items)}});
  }
  return json{{"scene_id", frame.scene_id}, {"frame_id", frame.frame_id}, {"groups", std::move(jgroups)}};
}

json assignment_to_json(const SceneRecord & frame, const assign::Assignment & a)
{
  json pairs = json::array();
  for (const auto & p : a.pairs) {
    pairs.push_back(json{
      {"pred_index", p.pred_index},
      {"gt_index", p.gt_index},
      {"cost", p.cost},
      {"point_cost", p.point_cost},
      {"best_variant", variant_json(p.best_variant)}});
  }
  return json{
    {"scene_id", frame.scene_id},
    {"frame_id", frame.frame_id},
    {"pairs", std::move(pairs)},
    {"unmatched_preds", a.unmatched_preds},
    {"unmatched_gts", a.unmatched_gts}};
}

json report_to_json(const eval::APReport & report)
{
  json classes = json::object();
  json empty_classes = json::array();
  for (const auto label : report.spec.classes) {
    const auto & cr = report.per_class.at(label);
    classes[std::string(to_string(label))] =
      json{{"thresholds", cr.thresholds}, {"ap", cr.ap}, {"class_ap", cr.class_ap}};
    if (cr.empty_convention) {
      empty_classes.push_back(std::string(to_string(label)));
    }
  }
  json class_names = json::array();
  for (const auto label : report.spec.classes) {
    class_names.push_back(std::string(to_string(label)));
  }
  json spec{
    {"thresholds", report.spec.thresholds},
    {"n_points", report.spec.n_points},
    {"classes", std::move(class_names)},
    {"conventions",
     {{"distance", "chamfer"},
      {"matching", "greedy by confidence, lowest chamfer distance below threshold"},
      {"ap_integration", "all-point precision envelope"},
      {"default_thresholds_are_convention", true},
      {"empty_class_ap_is_one", std::move(empty_classes)}}}};
  return json{{"classes", std::move(classes)}, {"map", report.map_ap}, {"spec", std::move(spec)}};
}

json mask_header_to_json(const raster::BevGrid & grid, const raster::RasterSpec & spec)
{
  json classes = json::array();
  for (const auto label : kAllClasses) {
    classes.push_back(std::string(to_string(label)));
  }
  return json{
    {"height", grid.height},
    {"width", grid.width},
    {"resolution", grid.resolution},
    {"range",
     {{"x_min", grid.range.x_min}, {"x_max", grid.range.x_max}, {"y_min", grid.range.y_min}, {"y_max", grid.range.y_max}}},
    {"classes", std::move(classes)},
    {"line_half_width", spec.line_half_width},
    {"fill_polygons", spec.fill_polygons},
    {"dtype", "uint8"},
    {"layout", "class,row,col"}};
}

void write_mask(
  const std::filesystem::path & dir, const std::string & stem, const raster::BevGrid & grid,
  const raster::RasterSpec & spec)
{
  {
    std::ofstream header(dir / (stem + ".json"), std::ios::binary | std::ios::trunc);
    if (!header) {
      throw IoError("cannot write " + (dir / (stem + ".json")).string());
    }
    header << mask_header_to_json(grid, spec).dump(2) << '\n';
  }
  std::ofstream bin(dir / (stem + ".bin"), std::ios::binary | std::ios::trunc);
  if (!bin) {
    throw IoError("cannot write " + (dir / (stem + ".bin")).string());
  }
  bin.write(reinterpret_cast<const char *>(grid.data.data()), static_cast<std::streamsize>(grid.data.size()));
  if (!bin) {
    throw IoError("failed writing " + (dir / (stem + ".bin")).string());
  }
}

std::vector<double> parse_number_list(const std::string & text)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception &) {
      throw IoError("not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw IoError("not a number: '" + item + "'");
    }
    out.push_back(value);
  }
  return out;
}

PerceptionRange parse_range(const std::string & text)
{
  const auto v = parse_number_list(text);
  if (v.size() != 4) {
    throw IoError("range must be x_min,x_max,y_min,y_max");
  }
  PerceptionRange r{v[0], v[1], v[2], v[3]};
  try {
    r.validate();
  } catch (const GeometryError & err) {
    throw IoError(err.what());
  }
  return r;
}

std::vector<ClassLabel> parse_class_list(const std::string & text)
{
  std::vector<ClassLabel> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto label = parse_class_label(item);
    if (!label) {
      throw IoError("unknown class '" + item + "'");
    }
    out.push_back(*label);
  }
  return out;
}

}  // namespace mapforge::io
