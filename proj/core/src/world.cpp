#include "dsg/world.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace dsg {

const CadShape* WorldSpec::find_cad(const std::string& id) const {
  for (const auto& c : cad) {
    if (c.model.id == id) {
      return &c;
    }
  }
  return nullptr;
}

std::optional<std::uint32_t> WorldSpec::room_at(double x, double y) const {
  for (const auto& r : rooms) {
    if (r.rect.contains(x, y)) {
      return r.id;
    }
  }
  return std::nullopt;
}

Aabb WorldSpec::bounds() const {
  const double h = 0.5 * wall_thickness;
  return {{extent.x0 - h, extent.y0 - h, -slab_thickness},
          {extent.x1 + h, extent.y1 + h, ceiling_z + slab_thickness}};
}

namespace {

constexpr double kEps = 1e-9;
constexpr double kDoorMargin = 1.0;     // door center to shared-wall ends
constexpr double kWalkClearance = 1.15; // walkers keep this far from wall lines

double quantize(double v, double q) { return std::round(v / q) * q; }

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::vector<Rect> split_rooms(Rng& rng, const WorldConfig& cfg) {
  std::vector<Rect> rects{{0.0, 0.0, cfg.extent_x, cfg.extent_y}};
  while (rects.size() < cfg.rooms) {
    std::vector<std::size_t> order(rects.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rects[a].area() > rects[b].area(); });
    bool done = false;
    for (const std::size_t i : order) {
      const Rect r = rects[i];
      const bool along_x = r.width() >= r.depth();
      for (const bool ax : {along_x, !along_x}) {
        const double lo = ax ? r.x0 : r.y0;
        const double hi = ax ? r.x1 : r.y1;
        const auto k0 = static_cast<long>(std::ceil((lo + cfg.min_room_side) / cfg.split_quantum - kEps));
        const auto k1 = static_cast<long>(std::floor((hi - cfg.min_room_side) / cfg.split_quantum + kEps));
        if (k1 < k0) {
          continue;
        }
        const long k = k0 + static_cast<long>(pick(rng, static_cast<std::size_t>(k1 - k0 + 1)));
        const double s = static_cast<double>(k) * cfg.split_quantum;
        Rect a = r;
        Rect b = r;
        if (ax) {
          a.x1 = s;
          b.x0 = s;
        } else {
          a.y1 = s;
          b.y0 = s;
        }
        rects[i] = a;
        rects.push_back(b);
        done = true;
        break;
      }
      if (done) {
        break;
      }
    }
    if (!done) {
      throw std::invalid_argument("extent too small for the requested number of rooms");
    }
  }
  return rects;
}

struct SharedWall {
  std::uint32_t a;
  std::uint32_t b;
  int axis;
  double wall;
  double lo;
  double hi;
};

std::vector<SharedWall> shared_walls(const std::vector<RoomSpec>& rooms, double min_span) {
  std::vector<SharedWall> out;
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    for (std::size_t j = i + 1; j < rooms.size(); ++j) {
      const Rect& p = rooms[i].rect;
      const Rect& q = rooms[j].rect;
      for (int axis = 0; axis < 2; ++axis) {
        const double p_lo = axis == 0 ? p.x0 : p.y0;
        const double p_hi = axis == 0 ? p.x1 : p.y1;
        const double q_lo = axis == 0 ? q.x0 : q.y0;
        const double q_hi = axis == 0 ? q.x1 : q.y1;
        double wall = 0.0;
        if (std::abs(p_hi - q_lo) < kEps) {
          wall = p_hi;
        } else if (std::abs(q_hi - p_lo) < kEps) {
          wall = p_lo;
        } else {
          continue;
        }
        const double lo = std::max(axis == 0 ? p.y0 : p.x0, axis == 0 ? q.y0 : q.x0);
        const double hi = std::min(axis == 0 ? p.y1 : p.x1, axis == 0 ? q.y1 : q.x1);
        if (hi - lo >= min_span) {
          out.push_back({rooms[i].id, rooms[j].id, axis, wall, lo, hi});
        }
      }
    }
  }
  return out;
}

std::vector<DoorSpec> spanning_doors(Rng& rng, const std::vector<RoomSpec>& rooms,
                                     const WorldConfig& cfg) {
  auto walls = shared_walls(rooms, cfg.door_width + 2.0 * kDoorMargin);
  std::shuffle(walls.begin(), walls.end(), rng);
  std::vector<std::uint32_t> parent(rooms.size());
  std::iota(parent.begin(), parent.end(), 0U);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      x = parent[x] = parent[parent[x]];
    }
    return x;
  };
  std::vector<DoorSpec> doors;
  for (const auto& w : walls) {
    const auto ra = find(w.a);
    const auto rb = find(w.b);
    if (ra == rb) {
      continue;
    }
    parent[std::max(ra, rb)] = std::min(ra, rb);
    DoorSpec d;
    d.room_a = w.a;
    d.room_b = w.b;
    d.axis = w.axis;
    d.wall = w.wall;
    d.width = cfg.door_width;
    d.height = cfg.door_height;
    const double lo = w.lo + kDoorMargin + 0.5 * d.width;
    const double hi = w.hi - kDoorMargin - 0.5 * d.width;
    d.center = quantize(uniform(rng, lo, hi), 0.05);
    doors.push_back(d);
  }
  if (doors.size() + 1 != rooms.size()) {
    return {};
  }
  return doors;
}

Vec3 door_point(const DoorSpec& d, double offset, double z) {
  return d.axis == 0 ? Vec3(d.wall + offset, d.center, z) : Vec3(d.center, d.wall + offset, z);
}

// Point in front of a door on the side of `room`.
Vec3 door_front(const DoorSpec& d, const RoomSpec& room, double z) {
  const Vec3 c = room.rect.center();
  const double side = (d.axis == 0 ? c.x() : c.y()) > d.wall ? 1.0 : -1.0;
  return door_point(d, side * kWalkClearance, z);
}

Rect walk_zone(const Rect& r) {
  return {r.x0 + kWalkClearance, r.y0 + kWalkClearance, r.x1 - kWalkClearance,
          r.y1 - kWalkClearance};
}

struct RoomGraph {
  std::vector<std::vector<std::pair<std::uint32_t, std::size_t>>> adj;  // (room, door)
};

RoomGraph room_graph(const WorldSpec& w) {
  RoomGraph g;
  g.adj.resize(w.rooms.size());
  for (std::size_t i = 0; i < w.doors.size(); ++i) {
    g.adj[w.doors[i].room_a].emplace_back(w.doors[i].room_b, i);
    g.adj[w.doors[i].room_b].emplace_back(w.doors[i].room_a, i);
  }
  for (auto& a : g.adj) {
    std::sort(a.begin(), a.end());
  }
  return g;
}

// Waypoints from `from_room` to `to_room` through the door tree, ending at
// the target room's center.
std::vector<Vec3> route(const WorldSpec& w, const RoomGraph& g, std::uint32_t from_room,
                        std::uint32_t to_room, double z) {
  std::vector<std::int64_t> prev_door(w.rooms.size(), -1);
  std::vector<std::int64_t> prev_room(w.rooms.size(), -1);
  std::vector<bool> seen(w.rooms.size(), false);
  std::queue<std::uint32_t> q;
  q.push(from_room);
  seen[from_room] = true;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (const auto& [v, door] : g.adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        prev_room[v] = u;
        prev_door[v] = static_cast<std::int64_t>(door);
        q.push(v);
      }
    }
  }
  std::vector<std::pair<std::uint32_t, std::size_t>> hops;  // (entered room, door)
  for (auto r = to_room; r != from_room; r = static_cast<std::uint32_t>(prev_room[r])) {
    hops.emplace_back(r, static_cast<std::size_t>(prev_door[r]));
  }
  std::reverse(hops.begin(), hops.end());
  std::vector<Vec3> pts;
  std::uint32_t cur = from_room;
  for (const auto& [next, door] : hops) {
    const DoorSpec& d = w.doors[door];
    pts.push_back(w.rooms[cur].rect.center(z));
    pts.push_back(door_front(d, w.rooms[cur], z));
    pts.push_back(door_point(d, 0.0, z));
    pts.push_back(door_front(d, w.rooms[next], z));
    cur = next;
  }
  pts.push_back(w.rooms[to_room].rect.center(z));
  return pts;
}

// Samples a polyline walked at constant speed; yaw follows the motion.
std::vector<TrackState> walk(const std::vector<Vec3>& pts, double speed, double duration,
                             double rate) {
  std::vector<double> cum{0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    cum.push_back(cum.back() + (pts[i] - pts[i - 1]).norm());
  }
  const double total = cum.back();
  const auto frames = static_cast<std::size_t>(std::floor(duration * rate + kEps)) + 1;
  std::vector<TrackState> out;
  double yaw = 0.0;
  std::size_t seg = 0;
  for (std::size_t k = 0; k < frames; ++k) {
    const double t = static_cast<double>(k) / rate;
    double s = speed * t;
    if (total > 0.0) {
      // ping-pong once the end is reached
      const double period = 2.0 * total;
      s = std::fmod(s, period);
      if (s > total) {
        s = period - s;
      }
    } else {
      s = 0.0;
    }
    seg = 0;
    while (seg + 2 < cum.size() && cum[seg + 1] < s) {
      ++seg;
    }
    Vec3 p = pts.front();
    if (pts.size() > 1) {
      const double len = cum[seg + 1] - cum[seg];
      const double u = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
      p = pts[seg] + u * (pts[seg + 1] - pts[seg]);
      const Vec3 d = pts[seg + 1] - pts[seg];
      if (d.head<2>().norm() > kEps) {
        yaw = std::atan2(d.y(), d.x());
      }
    }
    out.push_back({t, Pose::from_yaw(yaw, p)});
  }
  return out;
}

struct ClassShape {
  ClassId cls;
  Vec3 size;  // width along wall, depth, height
};

const ClassShape kShapes[] = {
    {classes::kChair, {0.5, 0.5, 0.9}},   {classes::kTable, {1.2, 0.6, 0.75}},
    {classes::kSofa, {1.6, 0.6, 0.85}},   {classes::kCabinet, {0.8, 0.45, 1.8}},
    {classes::kDesk, {1.2, 0.6, 0.75}},
};

Aabb footprint(const WorldSpec& w, const ObjectSpec& o) {
  Aabb local;
  if (o.cad_id) {
    for (const auto& part : w.find_cad(*o.cad_id)->parts) {
      local.extend(part);
    }
  } else {
    local = {-0.5 * o.extents, 0.5 * o.extents};
  }
  Aabb box;
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner((c & 1) != 0 ? local.max.x() : local.min.x(),
                      (c & 2) != 0 ? local.max.y() : local.min.y(),
                      (c & 4) != 0 ? local.max.z() : local.min.z());
    box.extend(o.pose.transform(corner));
  }
  return box;
}

void place_objects(Rng& rng, WorldSpec& w, const WorldConfig& cfg) {
  const double half = 0.5 * w.wall_thickness;
  std::vector<Aabb> keep_out;
  for (const auto& d : w.doors) {
    const double lo = d.center - 0.5 * d.width - 0.3;
    const double hi = d.center + 0.5 * d.width + 0.3;
    if (d.axis == 0) {
      keep_out.push_back({{d.wall - 1.3, lo, -1.0}, {d.wall + 1.3, hi, 10.0}});
    } else {
      keep_out.push_back({{lo, d.wall - 1.3, -1.0}, {hi, d.wall + 1.3, 10.0}});
    }
  }
  std::vector<Aabb> placed;
  std::uint32_t next_id = 0;
  for (const auto& room : w.rooms) {
    const std::size_t count = 1 + pick(rng, cfg.max_objects_per_room);
    for (std::size_t n = 0; n < count; ++n) {
      const ClassShape& shape = kShapes[pick(rng, std::size(kShapes))];
      const bool cad = shape.cls == classes::kChair && uniform(rng, 0.0, 1.0) < cfg.cad_probability;
      for (int attempt = 0; attempt < 40; ++attempt) {
        ObjectSpec o;
        o.id = next_id;
        o.cls = shape.cls;
        o.room = room.id;
        const double scale = cad ? 1.0 : uniform(rng, 0.9, 1.1);
        o.extents = cad ? Vec3::Zero() : Vec3(shape.size * scale);
        if (cad) {
          o.cad_id = w.cad.front().model.id;
        }
        const Vec3 size = cad ? shape.size : o.extents;
        const int side = static_cast<int>(pick(rng, 4));  // -x, +x, -y, +y walls
        const double gap = uniform(rng, 0.05, 0.15);
        const double jitter = cad ? uniform(rng, -0.25, 0.25) : 0.0;
        const double depth_center = half + gap + 0.5 * size.y();
        const Rect& r = room.rect;
        double along = 0.0;
        Vec3 c;
        double yaw = 0.0;  // local +y points at the wall
        if (side < 2) {
          along = uniform(rng, r.y0 + half + 0.5 * size.x() + 0.1, r.y1 - half - 0.5 * size.x() - 0.1);
          c = {side == 0 ? r.x0 + depth_center : r.x1 - depth_center, along, 0.5 * size.z()};
          yaw = side == 0 ? std::numbers::pi / 2.0 : -std::numbers::pi / 2.0;
        } else {
          along = uniform(rng, r.x0 + half + 0.5 * size.x() + 0.1, r.x1 - half - 0.5 * size.x() - 0.1);
          c = {along, side == 2 ? r.y0 + depth_center : r.y1 - depth_center, 0.5 * size.z()};
          yaw = side == 2 ? std::numbers::pi : 0.0;
        }
        c.x() = quantize(c.x(), 0.01);
        c.y() = quantize(c.y(), 0.01);
        o.pose = Pose::from_yaw(yaw + jitter, c);
        const Aabb box = footprint(w, o);
        const Rect inner{r.x0 + half, r.y0 + half, r.x1 - half, r.y1 - half};
        bool ok = box.min.x() >= inner.x0 && box.max.x() <= inner.x1 && box.min.y() >= inner.y0 &&
                  box.max.y() <= inner.y1;
        // stay inside the wall band so walkers never meet objects
        const Rect walk = walk_zone(r);
        const Aabb walk_box{{walk.x0 - 0.25, walk.y0 - 0.25, -1.0},
                            {walk.x1 + 0.25, walk.y1 + 0.25, 10.0}};
        ok = ok && !box.intersects(walk_box);
        for (const auto& k : keep_out) {
          ok = ok && !box.intersects(k);
        }
        for (const auto& p : placed) {
          ok = ok && !box.inflated(0.1).intersects(p);
        }
        if (ok) {
          placed.push_back(box);
          w.objects.push_back(o);
          ++next_id;
          break;
        }
      }
    }
  }
}

}  // namespace

CadShape make_cad_chair(double spacing) {
  CadShape shape;
  shape.model.id = "chair-a";
  shape.model.cls = classes::kChair;
  const double leg = 0.08;
  shape.parts = {
      {{-0.25, -0.25, 0.0}, {0.25, 0.25, 0.08}},     // seat
      {{-0.25, 0.17, 0.08}, {0.25, 0.25, 0.45}},     // backrest
      {{-0.25, -0.25, -0.45}, {-0.25 + leg, -0.25 + leg, 0.0}},
      {{0.25 - leg, -0.25, -0.45}, {0.25, -0.25 + leg, 0.0}},
      {{-0.25, 0.25 - leg, -0.45}, {-0.25 + leg, 0.25, 0.0}},
      {{0.25 - leg, 0.25 - leg, -0.45}, {0.25, 0.25, 0.0}},
  };
  for (std::size_t i = 0; i < shape.parts.size(); ++i) {
    const Aabb& b = shape.parts[i];
    for (int axis = 0; axis < 3; ++axis) {
      const int u = (axis + 1) % 3;
      const int v = (axis + 2) % 3;
      const int nu = std::max(1, static_cast<int>(std::ceil(b.extent()[u] / spacing)));
      const int nv = std::max(1, static_cast<int>(std::ceil(b.extent()[v] / spacing)));
      for (const double face : {b.min[axis], b.max[axis]}) {
        for (int iu = 0; iu <= nu; ++iu) {
          for (int iv = 0; iv <= nv; ++iv) {
            Vec3 p;
            p[axis] = face;
            p[u] = b.min[u] + b.extent()[u] * iu / nu;
            p[v] = b.min[v] + b.extent()[v] * iv / nv;
            bool hidden = false;
            for (std::size_t j = 0; j < shape.parts.size() && !hidden; ++j) {
              hidden = j != i && shape.parts[j].contains(p, 1e-9);
            }
            if (!hidden) {
              shape.model.points.push_back(p);
            }
          }
        }
      }
    }
  }
  // faces share their border samples
  std::sort(shape.model.points.begin(), shape.model.points.end(), [](const Vec3& a, const Vec3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  });
  shape.model.points.erase(std::unique(shape.model.points.begin(), shape.model.points.end()),
                           shape.model.points.end());
  return shape;
}

WorldSpec generate_world(std::uint64_t seed, const WorldConfig& cfg) {
  if (cfg.rooms < 1) {
    throw std::invalid_argument("a world needs at least one room");
  }
  if (!(cfg.door_height < cfg.ceiling_z)) {
    throw std::invalid_argument("doors must be lower than the ceiling");
  }
  Rng rng(seed);
  WorldSpec w;
  w.seed = seed;
  w.extent = {0.0, 0.0, cfg.extent_x, cfg.extent_y};
  w.ceiling_z = cfg.ceiling_z;
  w.rate = cfg.rate;
  w.cad.push_back(make_cad_chair());

  for (int attempt = 0;; ++attempt) {
    if (attempt == 100) {
      throw std::invalid_argument("could not connect the rooms with doors");
    }
    const auto rects = split_rooms(rng, cfg);
    w.rooms.clear();
    for (std::size_t i = 0; i < rects.size(); ++i) {
      w.rooms.push_back({static_cast<std::uint32_t>(i), rects[i]});
    }
    w.doors = spanning_doors(rng, w.rooms, cfg);
    if (!w.doors.empty() || w.rooms.size() == 1) {
      break;
    }
  }

  place_objects(rng, w, cfg);

  const RoomGraph graph = room_graph(w);
  // robot: depth-first tour through every room
  std::vector<Vec3> tour{w.rooms[0].rect.center(cfg.sensor_height)};
  // sweep the long axis of a room so far corners come into range
  auto sweep = [&](std::uint32_t room) {
    const Rect z = walk_zone(w.rooms[room].rect);
    const Vec3 c = w.rooms[room].rect.center(cfg.sensor_height);
    if (z.width() >= z.depth()) {
      tour.emplace_back(z.x0, c.y(), c.z());
      tour.emplace_back(z.x1, c.y(), c.z());
    } else {
      tour.emplace_back(c.x(), z.y0, c.z());
      tour.emplace_back(c.x(), z.y1, c.z());
    }
    tour.push_back(c);
  };
  std::vector<bool> seen(w.rooms.size(), false);
  std::size_t visited = 0;
  auto dfs = [&](auto&& self, std::uint32_t room) -> void {
    seen[room] = true;
    ++visited;
    sweep(room);
    for (const auto& [next, door] : graph.adj[room]) {
      if (seen[next]) {
        continue;
      }
      const DoorSpec& d = w.doors[door];
      tour.push_back(door_front(d, w.rooms[room], cfg.sensor_height));
      tour.push_back(door_point(d, 0.0, cfg.sensor_height));
      tour.push_back(door_front(d, w.rooms[next], cfg.sensor_height));
      tour.push_back(w.rooms[next].rect.center(cfg.sensor_height));
      self(self, next);
      if (visited == w.rooms.size()) {
        return;
      }
      tour.push_back(door_front(d, w.rooms[next], cfg.sensor_height));
      tour.push_back(door_point(d, 0.0, cfg.sensor_height));
      tour.push_back(door_front(d, w.rooms[room], cfg.sensor_height));
      tour.push_back(w.rooms[room].rect.center(cfg.sensor_height));
    }
  };
  dfs(dfs, 0);
  double tour_length = 0.0;
  for (std::size_t i = 1; i < tour.size(); ++i) {
    tour_length += (tour[i] - tour[i - 1]).norm();
  }
  w.duration = cfg.duration > 0.0 ? cfg.duration : tour_length / cfg.robot_speed;
  w.robot = walk(tour, std::max(cfg.robot_speed, tour_length / w.duration), w.duration, cfg.rate);

  constexpr double kAgentRate = 20.0;
  constexpr double kTorsoHeight = 1.0;
  for (std::size_t a = 0; a < cfg.agents; ++a) {
    AgentSpec agent;
    agent.id = a + 1;
    agent.cls = AgentClass::kHuman;
    const double speed = uniform(rng, cfg.agent_speed_min, cfg.agent_speed_max);
    auto waypoint = [&](std::uint32_t room) {
      const Rect z = walk_zone(w.rooms[room].rect);
      return Vec3(quantize(uniform(rng, z.x0, z.x1), 0.01), quantize(uniform(rng, z.y0, z.y1), 0.01),
                  kTorsoHeight);
    };
    auto room = static_cast<std::uint32_t>(pick(rng, w.rooms.size()));
    std::vector<Vec3> pts{waypoint(room)};
    double length = 0.0;
    while (length < speed * w.duration + 1.0) {
      const auto target = static_cast<std::uint32_t>(pick(rng, w.rooms.size()));
      auto leg = route(w, graph, room, target, kTorsoHeight);
      leg.push_back(waypoint(target));
      for (const auto& p : leg) {
        length += (p - pts.back()).norm();
        pts.push_back(p);
      }
      room = target;
    }
    agent.trajectory = walk(pts, speed, w.duration, kAgentRate);
    w.agents.push_back(std::move(agent));
  }
  return w;
}

std::vector<Solid> world_solids(const WorldSpec& w) {
  std::vector<Solid> out;
  const double half = 0.5 * w.wall_thickness;
  const Rect& e = w.extent;
  out.push_back({{{e.x0 - half, e.y0 - half, -w.slab_thickness}, {e.x1 + half, e.y1 + half, 0.0}},
                 {}, classes::kFloor, -1});
  out.push_back({{{e.x0 - half, e.y0 - half, w.ceiling_z},
                  {e.x1 + half, e.y1 + half, w.ceiling_z + w.slab_thickness}},
                 {}, classes::kCeiling, -1});

  // wall lines: union of room edges per line, minus door openings
  std::map<std::pair<int, long>, std::vector<std::pair<double, double>>> lines;
  auto key = [](int axis, double c) { return std::make_pair(axis, std::lround(c * 1000.0)); };
  for (const auto& room : w.rooms) {
    const Rect& r = room.rect;
    lines[key(0, r.x0)].emplace_back(r.y0, r.y1);
    lines[key(0, r.x1)].emplace_back(r.y0, r.y1);
    lines[key(1, r.y0)].emplace_back(r.x0, r.x1);
    lines[key(1, r.y1)].emplace_back(r.x0, r.x1);
  }
  for (auto& [k, spans] : lines) {
    const int axis = k.first;
    const double c = static_cast<double>(k.second) / 1000.0;
    std::sort(spans.begin(), spans.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& s : spans) {
      if (!merged.empty() && s.first <= merged.back().second + kEps) {
        merged.back().second = std::max(merged.back().second, s.second);
      } else {
        merged.push_back(s);
      }
    }
    std::vector<std::tuple<double, double, double>> openings;  // lo, hi, door height
    for (const auto& d : w.doors) {
      if (d.axis == axis && std::abs(d.wall - c) < kEps) {
        openings.emplace_back(d.center - 0.5 * d.width, d.center + 0.5 * d.width, d.height);
      }
    }
    std::sort(openings.begin(), openings.end());
    auto wall_box = [&](double lo, double hi, double z0, double z1) {
      return axis == 0 ? Aabb({c - half, lo, z0}, {c + half, hi, z1})
                       : Aabb({lo, c - half, z0}, {hi, c + half, z1});
    };
    for (const auto& [lo, hi] : merged) {
      double start = lo - half;
      for (const auto& [o0, o1, height] : openings) {
        if (o1 <= lo || o0 >= hi) {
          continue;
        }
        if (o0 > start) {
          out.push_back({wall_box(start, o0, 0.0, w.ceiling_z), {}, classes::kWall, -1});
        }
        out.push_back({wall_box(o0, o1, height, w.ceiling_z), {}, classes::kWall, -1});
        start = o1;
      }
      out.push_back({wall_box(start, hi + half, 0.0, w.ceiling_z), {}, classes::kWall, -1});
    }
  }
  for (const auto& o : w.objects) {
    if (o.cad_id) {
      const CadShape* cad = w.find_cad(*o.cad_id);
      if (cad == nullptr) {
        throw std::invalid_argument("object references unknown CAD model " + *o.cad_id);
      }
      for (const auto& part : cad->parts) {
        out.push_back({part, o.pose, o.cls, static_cast<std::int64_t>(o.id)});
      }
    } else {
      out.push_back({{-0.5 * o.extents, 0.5 * o.extents}, o.pose, o.cls,
                     static_cast<std::int64_t>(o.id)});
    }
  }
  return out;
}

Pose agent_pose(const AgentSpec& agent, double t) {
  const auto& tr = agent.trajectory;
  if (tr.empty()) {
    return {};
  }
  if (t <= tr.front().t) {
    return tr.front().pose;
  }
  if (t >= tr.back().t) {
    return tr.back().pose;
  }
  const auto it = std::lower_bound(tr.begin(), tr.end(), t,
                                   [](const TrackState& s, double v) { return s.t < v; });
  if (it->t == t) {
    return it->pose;
  }
  const TrackState& a = *(it - 1);
  return interpolate(a.pose, it->pose, (t - a.t) / (it->t - a.t));
}

Capsule agent_capsule(const Pose& torso) {
  const Vec3& p = torso.translation;
  return {{p.x(), p.y(), p.z() - 0.65}, {p.x(), p.y(), p.z() + 0.55}, 0.25};
}

Skeleton agent_skeleton(const Pose& torso) {
  // body frame: x forward, y left, z up, origin at the torso
  static const std::array<Vec3, kNumJoints> kJoints = {{
      {0.0, 0.0, -0.05},   {0.0, 0.09, -0.12},  {0.0, -0.09, -0.12}, {0.0, 0.0, 0.08},
      {0.01, 0.10, -0.52}, {0.01, -0.10, -0.52}, {0.0, 0.0, 0.22},   {0.0, 0.10, -0.92},
      {0.0, -0.10, -0.92}, {0.0, 0.0, 0.30},    {0.12, 0.11, -0.97}, {0.12, -0.11, -0.97},
      {0.0, 0.0, 0.45},    {0.0, 0.08, 0.38},   {0.0, -0.08, 0.38},  {0.0, 0.0, 0.58},
      {0.0, 0.19, 0.40},   {0.0, -0.19, 0.40},  {0.0, 0.22, 0.12},   {0.0, -0.22, 0.12},
      {0.03, 0.23, -0.12}, {0.03, -0.23, -0.12}, {0.05, 0.23, -0.20},
  }};
  Skeleton out;
  out.reserve(kNumJoints);
  for (const auto& j : kJoints) {
    out.push_back(torso.transform(j));
  }
  return out;
}

}  // namespace dsg
