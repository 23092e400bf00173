#include "dsg/objects.hpp"
#include "dsg/topology.hpp"

namespace dsg {

std::vector<StructureAttr> extract_structures(const Mesh& mesh, double threshold) {
  std::vector<StructureAttr> out;
  for (const ClassId cls : {classes::kFloor, classes::kCeiling, classes::kWall, classes::kPillar}) {
    std::vector<Vec3> pts;
    for (const auto& v : mesh.vertices) {
      if (v.label == cls) {
        pts.push_back(v.position);
      }
    }
    for (const auto& cluster : euclidean_cluster(pts, threshold, cls)) {
      const ObjectAttr fit = fit_centroid_aabb(cluster);
      StructureAttr s;
      s.pose = fit.pose;
      s.aabb = fit.aabb;
      s.cls = cls;
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace dsg
