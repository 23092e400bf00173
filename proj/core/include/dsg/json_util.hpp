#pragma once

#include "dsg/agent_track.hpp"
#include "dsg/geometry.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

namespace dsg {

using Json = nlohmann::json;

/// Malformed or incompatible input file / stream.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json vec3_to_json(const Vec3& v);
Vec3 vec3_from_json(const Json& j);
/// Quaternions are written as [w, x, y, z].
Json quat_to_json(const Quat& q);
Quat quat_from_json(const Json& j);
/// {"p": [x,y,z], "q": [w,x,y,z]}
Json pose_to_json(const Pose& p);
Pose pose_from_json(const Json& j);
/// {"min": [...], "max": [...]}
Json aabb_to_json(const Aabb& b);
Aabb aabb_from_json(const Json& j);

Json track_to_json(const AgentTrack& track);
AgentTrack track_from_json(const Json& j);

/// Fetches a required member, raising ParseError when absent.
const Json& require(const Json& j, const char* key);

}  // namespace dsg
