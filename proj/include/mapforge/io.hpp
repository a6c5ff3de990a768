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

#ifndef MAPFORGE__IO_HPP_
#define MAPFORGE__IO_HPP_

#include "mapforge/assign.hpp"
#include "mapforge/map_core.hpp"
#include "mapforge/map_eval.hpp"
#include "mapforge/ppdn.hpp"
#include "mapforge/raster.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mapforge::io
{

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct PredictedElement
{
  MapElement element;
  double confidence{1.0};
  /// Per-class scores for matching; absent means one-hot on the element's
  /// class with value `confidence`.
  std::optional<std::array<double, kNumClasses>> scores;

  std::array<double, kNumClasses> class_scores() const;
};

/// One frame of a scene file (one JSON object per line).
struct SceneRecord
{
  std::string scene_id;
  std::string frame_id;
  EgoPose ego_pose;
  std::vector<MapElement> elements;
  std::optional<std::vector<PredictedElement>> predictions;

  std::string key() const { return scene_id + "/" + frame_id; }
};

nlohmann::json element_to_json(const MapElement & e);
MapElement element_from_json(const nlohmann::json & j);

nlohmann::json scene_to_json(const SceneRecord & s);
SceneRecord scene_from_json(const nlohmann::json & j);

/// Reads a JSONL scene file; errors name the offending line.
std::vector<SceneRecord> read_scenes(const std::filesystem::path & path);
std::vector<SceneRecord> parse_scenes(std::istream & in, const std::string & source_name);

/// Writes one compact JSON document per line.
void write_jsonl(const std::filesystem::path & path, const std::vector<nlohmann::json> & lines);

/// Compact serialization; doubles round-trip exactly.
std::string dump_compact(const nlohmann::json & j);

nlohmann::json denoise_groups_to_json(const SceneRecord & frame, const std::vector<ppdn::DenoiseGroup> & groups);
nlohmann::json assignment_to_json(const SceneRecord & frame, const assign::Assignment & a);

/// {"classes": {name: {"thresholds", "ap", "class_ap"}}, "map", "spec"}.
nlohmann::json report_to_json(const eval::APReport & report);

/// Sidecar header {height, width, resolution, range, classes, ...}.
nlohmann::json mask_header_to_json(const raster::BevGrid & grid, const raster::RasterSpec & spec);

/// Writes {stem}.json and {stem}.bin (class-major, row-major bytes).
void write_mask(
  const std::filesystem::path & dir, const std::string & stem, const raster::BevGrid & grid,
  const raster::RasterSpec & spec);

/// Parses "a,b,c" into doubles.
std::vector<double> parse_number_list(const std::string & text);
/// Parses "-15,15,-30,30" into a range.
PerceptionRange parse_range(const std::string & text);
std::vector<ClassLabel> parse_class_list(const std::string & text);

}  // namespace mapforge::io

#endif  // MAPFORGE__IO_HPP_
