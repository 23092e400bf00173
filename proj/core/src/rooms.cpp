#include "dsg/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace dsg {

double detect_ceiling(const Mesh& mesh) {
  std::vector<double> z;
  for (const auto& v : mesh.vertices) {
    if (v.label == classes::kCeiling) {
      z.push_back(v.position.z());
    }
  }
  if (z.empty()) {
    throw std::runtime_error("no ceiling-labeled surface to detect the ceiling from");
  }
  const auto mid = z.begin() + static_cast<std::ptrdiff_t>(z.size() / 2);
  std::nth_element(z.begin(), mid, z.end());
  if (z.size() % 2 == 1) {
    return *mid;
  }
  const double upper = *mid;
  const double lower = *std::max_element(z.begin(), mid);
  return 0.5 * (lower + upper);
}

std::optional<std::pair<int, int>> EsdfSection::cell_of(double x, double y) const {
  const int ix = static_cast<int>(std::floor((x - origin_x) / cell));
  const int iy = static_cast<int>(std::floor((y - origin_y) / cell));
  if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) {
    return std::nullopt;
  }
  return std::make_pair(ix, iy);
}

EsdfSection esdf_section(const EsdfGrid& esdf, double z_cut) {
  const VoxelGrid& grid = esdf.grid();
  const int layer =
      static_cast<int>(std::floor((z_cut - grid.origin().z()) / grid.voxel_size() + 1e-6));
  if (layer < 0 || layer >= grid.dims().z()) {
    throw std::out_of_range("section height outside the grid");
  }
  EsdfSection s;
  s.z_cut = z_cut;
  s.layer = layer;
  s.origin_x = grid.origin().x();
  s.origin_y = grid.origin().y();
  s.cell = grid.voxel_size();
  s.nx = grid.dims().x();
  s.ny = grid.dims().y();
  s.values.resize(static_cast<std::size_t>(s.nx) * s.ny);
  for (int y = 0; y < s.ny; ++y) {
    for (int x = 0; x < s.nx; ++x) {
      s.values[static_cast<std::size_t>(y) * s.nx + x] = esdf.at(GridIndex{x, y, layer});
    }
  }
  return s;
}

RoomPartition segment_rooms(const EsdfSection& section, double cutoff, std::size_t min_cells) {
  RoomPartition p;
  p.nx = section.nx;
  p.ny = section.ny;
  const std::size_t n = static_cast<std::size_t>(p.nx) * p.ny;
  p.labels.assign(n, 0);
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> members;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start] != 0 || !(section.values[start] > cutoff)) {
      continue;
    }
    members.clear();
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      members.push_back(c);
      const int x = static_cast<int>(c % p.nx);
      const int y = static_cast<int>(c / p.nx);
      const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& q : nbr) {
        if (q[0] < 0 || q[1] < 0 || q[0] >= p.nx || q[1] >= p.ny) {
          continue;
        }
        const std::size_t l = static_cast<std::size_t>(q[1]) * p.nx + q[0];
        if (seen[l] == 0 && section.values[l] > cutoff) {
          seen[l] = 1;
          stack.push_back(l);
        }
      }
    }
    if (members.size() < min_cells) {
      continue;
    }
    ++p.count;
    for (const auto c : members) {
      p.labels[c] = p.count;
    }
  }
  return p;
}

PlaceLabels label_places(const PlaceGraph& places, const EsdfSection& section,
                         const RoomPartition& partition) {
  const std::size_t n = places.nodes.size();
  PlaceLabels out;
  out.labels.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p = places.nodes[i].position;
    if (const auto cell = section.cell_of(p.x(), p.y())) {
      out.labels[i] = partition.at(cell->first, cell->second);
    }
  }
  std::vector<std::vector<std::uint32_t>> nbr(n);
  for (const auto& [a, b] : places.edges) {
    nbr[a].push_back(b);
    nbr[b].push_back(a);
  }
  std::map<std::uint32_t, std::size_t> votes;
  while (true) {
    std::vector<std::uint32_t> next = out.labels;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.labels[i] != 0) {
        continue;
      }
      votes.clear();
      for (const auto j : nbr[i]) {
        if (out.labels[j] != 0) {
          ++votes[out.labels[j]];
        }
      }
      std::uint32_t best = 0;
      std::size_t best_votes = 0;
      for (const auto& [label, count] : votes) {
        if (count > best_votes) {
          best = label;
          best_votes = count;
        }
      }
      if (best != 0) {
        next[i] = best;
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
    ++out.passes;
    out.labels.swap(next);
  }
  out.unlabeled = static_cast<std::size_t>(std::count(out.labels.begin(), out.labels.end(), 0U));
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> room_adjacency(
    const PlaceGraph& places, std::span<const std::uint32_t> labels) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const auto& [a, b] : places.edges) {
    const std::uint32_t la = labels[a];
    const std::uint32_t lb = labels[b];
    if (la != 0 && lb != 0 && la != lb) {
      out.emplace_back(std::min(la, lb), std::max(la, lb));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RoomsLayer build_rooms_layer(SceneGraph& graph, const PlaceGraph& places,
                             std::span<const NodeId> place_ids,
                             std::span<const std::uint32_t> labels, std::uint32_t room_count) {
  if (place_ids.size() != places.nodes.size() || labels.size() != places.nodes.size()) {
    throw std::invalid_argument("place ids and labels must match the place graph");
  }
  RoomsLayer out;
  out.rooms.assign(room_count, NodeId{});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::uint32_t l = labels[i];
    if (l == 0 || l > room_count) {
      continue;
    }
    if (!out.rooms[l - 1].valid()) {
      out.rooms[l - 1] = graph.add_node(Layer::kRooms, RoomAttr{});
    }
    graph.add_edge(place_ids[i], out.rooms[l - 1], Relation::kPlaceInRoom);
  }
  for (const auto& [a, b] : room_adjacency(places, labels)) {
    if (a <= room_count && b <= room_count) {
      graph.add_edge(out.rooms[a - 1], out.rooms[b - 1], Relation::kRoomAdjacent);
    }
  }
  out.building = graph.add_node(Layer::kBuilding, BuildingAttr{});
  for (const NodeId room : out.rooms) {
    if (room.valid()) {
      graph.add_edge(room, out.building, Relation::kRoomInBuilding);
    }
  }
  refresh_room_boxes(graph);
  return out;
}

void write_section_pgm(const std::filesystem::path& path, const EsdfSection& section) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "P5\n" << section.nx << ' ' << section.ny << "\n255\n";
  for (int y = section.ny - 1; y >= 0; --y) {
    for (int x = 0; x < section.nx; ++x) {
      const double v = std::clamp(std::round(section.at(x, y) * 100.0), 0.0, 255.0);
      out.put(static_cast<char>(static_cast<std::uint8_t>(v)));
    }
  }
}

Json place_graph_to_json(const PlaceGraph& places, std::span<const std::uint32_t> labels) {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < places.nodes.size(); ++i) {
    Json j{{"position", vec3_to_json(places.nodes[i].position)},
           {"clearance", places.nodes[i].clearance}};
    if (i < labels.size()) {
      j["room"] = labels[i];
    }
    nodes.push_back(std::move(j));
  }
  Json edges = Json::array();
  for (const auto& [a, b] : places.edges) {
    edges.push_back({a, b});
  }
  return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

Json partition_to_json(const EsdfSection& section, const RoomPartition& partition) {
  return Json{{"z_cut", section.z_cut},
              {"origin", {section.origin_x, section.origin_y}},
              {"cell", section.cell},
              {"nx", partition.nx},
              {"ny", partition.ny},
              {"rooms", partition.count},
              {"labels", partition.labels}};
}

}  // namespace dsg
