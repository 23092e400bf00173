#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dsg {

/// Semantic class id, shared by voxel labels, mesh vertices and nodes.
using ClassId = std::uint16_t;

namespace classes {
inline constexpr ClassId kUnknown = 0;
inline constexpr ClassId kFloor = 1;
inline constexpr ClassId kCeiling = 2;
inline constexpr ClassId kWall = 3;
inline constexpr ClassId kPillar = 4;
inline constexpr ClassId kChair = 5;
inline constexpr ClassId kTable = 6;
inline constexpr ClassId kSofa = 7;
inline constexpr ClassId kCabinet = 8;
inline constexpr ClassId kDesk = 9;
inline constexpr ClassId kHuman = 10;
inline constexpr ClassId kRobot = 11;
inline constexpr ClassId kRoom = 12;
inline constexpr ClassId kBuilding = 13;
}  // namespace classes

/// Number of classes tracked per voxel (room/building are node-only).
inline constexpr std::size_t kNumVoxelClasses = 12;

[[nodiscard]] std::string_view class_name(ClassId id);
[[nodiscard]] std::optional<ClassId> class_from_name(std::string_view name);

[[nodiscard]] inline bool is_structure_class(ClassId id) {
  return id == classes::kFloor || id == classes::kCeiling || id == classes::kWall ||
         id == classes::kPillar;
}
[[nodiscard]] inline bool is_agent_class(ClassId id) {
  return id == classes::kHuman || id == classes::kRobot;
}
[[nodiscard]] inline bool is_object_class(ClassId id) {
  return id >= classes::kChair && id <= classes::kDesk;
}

}  // namespace dsg
