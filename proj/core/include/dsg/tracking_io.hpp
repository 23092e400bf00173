#pragma once

#include "dsg/json_util.hpp"
#include "dsg/tracking.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace dsg {

/// {t, class, torso:{p,q}, joints:[[x,y,z]...], bbox:[x0,y0,x1,y1], image:[w,h]}
Json detection_to_json(const Detection& det);
Detection detection_from_json(const Json& j);

void write_detections(std::ostream& out, std::span<const Detection> detections);
std::vector<Detection> read_detections(std::istream& in);

/// Per-track report with the raw (detected) and smoothed states side by side.
Json track_report(const AgentTrack& track, std::span<const TrackState> smoothed);

}  // namespace dsg
