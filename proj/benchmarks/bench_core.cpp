#include "dsg/esdf.hpp"
#include "dsg/objects.hpp"
#include "dsg/pose_graph.hpp"
#include "dsg/query.hpp"
#include "dsg/tsdf.hpp"
#include "dsg/world.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace dsg;

namespace {

const WorldSpec& bench_world() {
  static const WorldSpec world = [] {
    WorldConfig cfg;
    cfg.rooms = 4;
    cfg.extent_x = 12.0;
    cfg.extent_y = 10.0;
    cfg.duration = 4.0;
    return generate_world(3, cfg);
  }();
  return world;
}

void BM_IntegrateScan(benchmark::State& state) {
  const WorldSpec& world = bench_world();
  const auto scans = render_scans(world);
  const VoxelGrid grid = VoxelGrid::covering(world.bounds().min, world.bounds().max, 0.05);
  std::size_t rays = 0;
  for (auto _ : state) {
    TsdfLayer tsdf(grid, 0.2);
    for (const auto& scan : scans) {
      integrate_scan(tsdf, scan);
      rays += scan.rays.size();
    }
    benchmark::DoNotOptimize(tsdf.size());
  }
  state.counters["rays/s"] = benchmark::Counter(static_cast<double>(rays),
                                                benchmark::Counter::kIsRate);
}
BENCHMARK(BM_IntegrateScan)->Unit(benchmark::kMillisecond);

void BM_Esdf(benchmark::State& state) {
  const auto side = static_cast<int>(state.range(0));
  const VoxelGrid grid(Vec3::Zero(), 0.05, Eigen::Vector3i(side, side, side / 2));
  std::mt19937 rng(1);
  std::bernoulli_distribution occupied(0.02);
  std::vector<std::uint8_t> occ(grid.size());
  for (auto& o : occ) {
    o = occupied(rng) ? 1 : 0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_esdf(grid, occ, 2.0).values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_Esdf)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_EuclideanClustering(benchmark::State& state) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::vector<Vec3> pts(static_cast<std::size_t>(state.range(0)));
  for (auto& p : pts) {
    p = Vec3(u(rng), u(rng), 0.2 * u(rng));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(euclidean_components(pts, 0.1).size());
  }
}
BENCHMARK(BM_EuclideanClustering)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

SceneGraph object_graph(int rooms, int objects_per_room) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  SceneGraph g;
  const NodeId building = g.add_node(BuildingAttr{});
  for (int r = 0; r < rooms; ++r) {
    const NodeId room = g.add_node(RoomAttr{});
    g.add_edge(room, building, Relation::kRoomInBuilding);
    const Vec3 origin(5.0 * r, 0.0, 0.0);
    const NodeId place = g.add_node(PlaceAttr{origin + Vec3(2, 2, 1), 0.5, std::nullopt});
    g.add_edge(place, room, Relation::kPlaceInRoom);
    for (int o = 0; o < objects_per_room; ++o) {
      const Vec3 c = origin + Vec3(u(rng), u(rng), 0.5);
      const NodeId obj = g.add_node(
          ObjectAttr{Pose(c), Aabb(c - Vec3::Constant(0.2), c + Vec3::Constant(0.2)),
                     classes::kChair, std::nullopt});
      g.add_edge(obj, place, Relation::kProximal);
    }
  }
  refresh_room_boxes(g);
  return g;
}

void BM_BvhQuery(benchmark::State& state) {
  const SceneGraph g = object_graph(20, static_cast<int>(state.range(0)));
  const Bvh bvh = build_bvh(g);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> x(0.0, 100.0);
  for (auto _ : state) {
    const Vec3 lo(x(rng), 1.0, 0.0);
    benchmark::DoNotOptimize(bvh.query(Aabb(lo, lo + Vec3(1.0, 1.0, 1.0))).size());
  }
}
BENCHMARK(BM_BvhQuery)->Arg(10)->Arg(100);

void BM_CollisionScan(benchmark::State& state) {
  const SceneGraph g = object_graph(20, static_cast<int>(state.range(0)));
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> x(0.0, 100.0);
  for (auto _ : state) {
    const Vec3 lo(x(rng), 1.0, 0.0);
    benchmark::DoNotOptimize(collision_scan(g, Aabb(lo, lo + Vec3(1.0, 1.0, 1.0))).size());
  }
}
BENCHMARK(BM_CollisionScan)->Arg(10)->Arg(100);

void BM_OptimizeTrack(benchmark::State& state) {
  std::mt19937 rng(5);
  std::normal_distribution<double> noise(0.0, 0.05);
  AgentTrack track;
  for (int i = 0; i < state.range(0); ++i) {
    Detection det;
    det.t = 0.2 * i;
    det.torso = Pose::from_yaw(0.01 * i, Vec3(0.1 * i + noise(rng), noise(rng), 1.0));
    append_measurement(track, det, 1.0, 4.0);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_track(track).states.size());
  }
}
BENCHMARK(BM_OptimizeTrack)->Arg(100)->Arg(300)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
