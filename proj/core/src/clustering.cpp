#include "dsg/objects.hpp"
#include "dsg/point_index.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace dsg {

namespace {

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
    }
  }
};

}  // namespace

std::vector<std::vector<std::size_t>> euclidean_components(std::span<const Vec3> points,
                                                           double threshold) {
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("cluster threshold must be positive");
  }
  for (const auto& p : points) {
    if (!p.allFinite()) {
      throw std::invalid_argument("cannot cluster non-finite points");
    }
  }
  const PointIndex index(points, threshold);
  DisjointSet sets(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (const std::size_t j : index.radius(points[i], threshold)) {
      if (j > i) {
        sets.unite(i, j);
      }
    }
  }
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> slot(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t root = sets.find(i);
    if (root == i) {
      slot[i] = out.size();
      out.emplace_back();
    }
    out[slot[root]].push_back(i);
  }
  return out;
}

std::vector<PointCluster> euclidean_cluster(std::span<const Vec3> points, double threshold,
                                            ClassId cls) {
  std::vector<PointCluster> out;
  for (const auto& comp : euclidean_components(points, threshold)) {
    PointCluster c;
    c.cls = cls;
    c.points.reserve(comp.size());
    for (const std::size_t i : comp) {
      c.points.push_back(points[i]);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<PointCluster> segment_objects(const Mesh& mesh, double threshold,
                                          std::size_t min_points) {
  std::map<ClassId, std::vector<std::uint32_t>> by_class;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (is_object_class(mesh.vertices[i].label)) {
      by_class[mesh.vertices[i].label].push_back(static_cast<std::uint32_t>(i));
    }
  }
  std::vector<PointCluster> out;
  for (const auto& [cls, members] : by_class) {
    std::vector<Vec3> pts;
    pts.reserve(members.size());
    for (const auto v : members) {
      pts.push_back(mesh.vertices[v].position);
    }
    for (const auto& comp : euclidean_components(pts, threshold)) {
      if (comp.size() < min_points) {
        continue;
      }
      PointCluster c;
      c.cls = cls;
      for (const std::size_t i : comp) {
        c.points.push_back(pts[i]);
        c.vertices.push_back(members[i]);
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

ObjectAttr fit_centroid_aabb(const PointCluster& cluster) {
  if (cluster.points.empty()) {
    throw std::invalid_argument("cannot fit an empty cluster");
  }
  ObjectAttr o;
  Vec3 sum = Vec3::Zero();
  for (const auto& p : cluster.points) {
    sum += p;
    o.aabb.extend(p);
  }
  o.pose = Pose(sum / static_cast<double>(cluster.points.size()));
  o.cls = cluster.cls;
  return o;
}

}  // namespace dsg
