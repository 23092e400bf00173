#pragma once

#include "dsg/esdf.hpp"
#include "dsg/json_util.hpp"
#include "dsg/scene_graph.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dsg {

// --- places ----------------------------------------------------------------

struct PlaceConfig {
  double min_clearance = 0.3;
  double spacing = 0.5;
  double edge_radius = 1.5;  // 3 x spacing
};

struct PlaceNode {
  Vec3 position = Vec3::Zero();
  double clearance = 0.0;
};

struct PlaceGraph {
  std::vector<PlaceNode> nodes;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // first < second, sorted
};

/// Whether every voxel touched by the segment [a, b] keeps an ESDF value of
/// at least `clearance`.
[[nodiscard]] bool segment_clear(const EsdfGrid& esdf, const Vec3& a, const Vec3& b,
                                 double clearance);

/// Greedy sparse sampling of the free space: voxels with clearance above
/// the minimum, visited by decreasing clearance (ties by voxel index), are
/// kept unless a kept node lies closer than `spacing`. Edges join nodes
/// within `edge_radius` whose straight segment stays clear.
[[nodiscard]] PlaceGraph extract_places(const EsdfGrid& esdf, const PlaceConfig& cfg = {});

// --- structures ------------------------------------------------------------

/// One structure node per wall / floor / ceiling / pillar vertex cluster.
[[nodiscard]] std::vector<StructureAttr> extract_structures(const Mesh& mesh,
                                                            double threshold = 0.1);

// --- rooms -----------------------------------------------------------------

/// Median height of ceiling-labeled vertices. Throws std::runtime_error if
/// the mesh has none.
[[nodiscard]] double detect_ceiling(const Mesh& mesh);

struct EsdfSection {
  double z_cut = 0.0;
  int layer = 0;  // voxel layer the values were read from
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell = 0.05;
  int nx = 0;
  int ny = 0;
  std::vector<float> values;  // row-major, y outer

  [[nodiscard]] float at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * nx + x];
  }
  /// Cell containing (x, y), or nullopt outside the section.
  [[nodiscard]] std::optional<std::pair<int, int>> cell_of(double x, double y) const;
};

/// ESDF values of the voxel layer containing z_cut. Throws
/// std::out_of_range when z_cut is outside the grid.
[[nodiscard]] EsdfSection esdf_section(const EsdfGrid& esdf, double z_cut);

struct RoomPartition {
  int nx = 0;
  int ny = 0;
  std::vector<std::uint32_t> labels;  // 0 = unassigned, rooms 1..count
  std::uint32_t count = 0;

  [[nodiscard]] std::uint32_t at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * nx + x];
  }
};

/// 4-connected components of the cells above `cutoff`; components smaller
/// than `min_cells` are dropped. Ids are assigned in scan order.
[[nodiscard]] RoomPartition segment_rooms(const EsdfSection& section, double cutoff = 0.2,
                                          std::size_t min_cells = 100);

struct PlaceLabels {
  std::vector<std::uint32_t> labels;  // 0 = unlabeled
  std::size_t passes = 0;
  std::size_t unlabeled = 0;
};

/// Section lookup first, then repeated synchronous majority votes over
/// labeled graph neighbours (ties to the smallest id) until nothing changes.
[[nodiscard]] PlaceLabels label_places(const PlaceGraph& places, const EsdfSection& section,
                                       const RoomPartition& partition);

/// Room ids adjacent through inter-room place edges, as sorted pairs.
[[nodiscard]] std::vector<std::pair<std::uint32_t, std::uint32_t>> room_adjacency(
    const PlaceGraph& places, std::span<const std::uint32_t> labels);

struct RoomsLayer {
  std::vector<NodeId> rooms;  // indexed by room label - 1 (invalid if empty room)
  NodeId building;
};

/// Adds one room node per non-empty label, place-in-room edges, room
/// adjacency edges and a single building node with room-in-building edges.
/// `place_ids[i]` is the graph node of place i; unlabeled places are skipped.
RoomsLayer build_rooms_layer(SceneGraph& graph, const PlaceGraph& places,
                             std::span<const NodeId> place_ids,
                             std::span<const std::uint32_t> labels, std::uint32_t room_count);

/// Debug image of a section: values x100, clamped to [0, 255], y flipped so
/// that north is up.
void write_section_pgm(const std::filesystem::path& path, const EsdfSection& section);

[[nodiscard]] Json place_graph_to_json(const PlaceGraph& places,
                                       std::span<const std::uint32_t> labels);
[[nodiscard]] Json partition_to_json(const EsdfSection& section, const RoomPartition& partition);

}  // namespace dsg
