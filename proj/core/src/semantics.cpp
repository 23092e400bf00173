#include "dsg/semantics.hpp"

#include <array>

namespace dsg {
namespace {

constexpr std::array<std::string_view, 14> kNames = {
    "unknown", "floor", "ceiling", "wall", "pillar", "chair", "table",
    "sofa",    "cabinet", "desk",  "human", "robot", "room", "building"};

}  // namespace

std::string_view class_name(ClassId id) {
  if (id < kNames.size()) {
    return kNames[id];
  }
  return "unknown";
}

std::optional<ClassId> class_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) {
      return static_cast<ClassId>(i);
    }
  }
  return std::nullopt;
}

}  // namespace dsg
