#pragma once

#include "dsg/esdf.hpp"
#include "dsg/json_util.hpp"
#include "dsg/metrics.hpp"
#include "dsg/objects.hpp"
#include "dsg/scene_graph.hpp"
#include "dsg/topology.hpp"
#include "dsg/tracking.hpp"
#include "dsg/tsdf.hpp"
#include "dsg/world.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsg {

struct PipelineConfig {
  double voxel_size = 0.05;
  double truncation = 0.2;
  double esdf_max_distance = 2.0;
  bool masking = true;
  bool masking_ablation = true;     // also fuse without masks to report both RMSEs
  double reference_spacing = 0.025; // ground-truth surface sampling
  SensorConfig sensor;
  double cluster_threshold = 0.1;
  std::size_t min_object_points = 100;
  double registration_beta = 0.1;
  HarrisConfig harris;
  double structure_threshold = 0.1;
  PlaceConfig places;
  double section_offset = 0.3;  // below the detected ceiling
  double room_cutoff = 0.2;
  std::size_t room_min_cells = 100;
  NoiseModel noise;
  std::uint64_t detection_seed = 1;
  TrackerConfig tracker;
  std::size_t min_track_states = 5;
};

[[nodiscard]] Json config_to_json(const PipelineConfig& cfg);
/// Defaults overridden by `overrides`; unknown keys raise ParseError.
[[nodiscard]] PipelineConfig config_from_json(const Json& overrides);

/// Failure inside one pipeline stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  [[nodiscard]] const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// TSDF over the world bounds with every scan fused. Without masking the
/// agent hits are fused like static surfaces.
[[nodiscard]] TsdfLayer fuse_scans(const WorldSpec& world, std::span<const Scan> scans,
                                   double voxel_size, double truncation, bool masking);

struct RoomSegmentation {
  PlaceGraph places;
  double ceiling = 0.0;
  EsdfSection section;
  RoomPartition partition;
  PlaceLabels labels;
};

[[nodiscard]] RoomSegmentation segment_places_and_rooms(const EsdfGrid& esdf, const Mesh& mesh,
                                                        const PipelineConfig& cfg);

struct PipelineResult {
  SceneGraph graph;
  Json report;
  RoomSegmentation rooms;
};

/// Renders, fuses and parses the world into a scene graph and a metrics
/// report. Deterministic apart from the "runtimes" entry of the report.
[[nodiscard]] PipelineResult run_pipeline(const WorldSpec& world, const PipelineConfig& cfg = {});

}  // namespace dsg
