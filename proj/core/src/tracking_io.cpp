#include "dsg/tracking_io.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace dsg {

Json detection_to_json(const Detection& det) {
  Json joints = Json::array();
  for (const auto& p : det.joints) {
    joints.push_back(vec3_to_json(p));
  }
  return Json{{"t", det.t},
              {"class", agent_class_name(det.cls)},
              {"torso", pose_to_json(det.torso)},
              {"joints", std::move(joints)},
              {"bbox", {det.bbox.x0, det.bbox.y0, det.bbox.x1, det.bbox.y1}},
              {"image", {det.image_width, det.image_height}}};
}

Detection detection_from_json(const Json& j) {
  try {
    Detection det;
    det.t = require(j, "t").get<double>();
    const auto cls = require(j, "class").get<std::string>();
    if (cls == "human") {
      det.cls = AgentClass::kHuman;
    } else if (cls == "robot") {
      det.cls = AgentClass::kRobot;
    } else {
      throw ParseError("unknown agent class '" + cls + "'");
    }
    det.torso = pose_from_json(require(j, "torso"));
    for (const auto& p : require(j, "joints")) {
      det.joints.push_back(vec3_from_json(p));
    }
    const auto bbox = require(j, "bbox").get<std::vector<double>>();
    const auto image = require(j, "image").get<std::vector<int>>();
    if (bbox.size() != 4 || image.size() != 2) {
      throw ParseError("bbox needs 4 values and image 2");
    }
    det.bbox = {bbox[0], bbox[1], bbox[2], bbox[3]};
    det.image_width = image[0];
    det.image_height = image[1];
    return det;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed detection: ") + e.what());
  }
}

void write_detections(std::ostream& out, std::span<const Detection> detections) {
  for (const auto& d : detections) {
    out << detection_to_json(d).dump() << '\n';
  }
}

std::vector<Detection> read_detections(std::istream& in) {
  std::vector<Detection> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    try {
      out.push_back(detection_from_json(Json::parse(line)));
    } catch (const Json::parse_error& e) {
      throw ParseError("detection stream line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

Json track_report(const AgentTrack& track, std::span<const TrackState> smoothed) {
  Json raw = Json::array();
  for (const auto& f : track.priors) {
    Json js = pose_to_json(f.measurement);
    js["t"] = f.t;
    raw.push_back(std::move(js));
  }
  Json out = Json::array();
  for (const auto& s : smoothed) {
    Json js = pose_to_json(s.pose);
    js["t"] = s.t;
    out.push_back(std::move(js));
  }
  return Json{{"id", track.id},
              {"class", agent_class_name(track.cls)},
              {"raw", std::move(raw)},
              {"smoothed", std::move(out)}};
}

}  // namespace dsg
