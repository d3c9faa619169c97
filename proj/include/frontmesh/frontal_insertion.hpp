#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "frontmesh/direction_field.hpp"
#include "frontmesh/hilbert.hpp"
#include "frontmesh/mesh_core.hpp"
#include "frontmesh/size_field.hpp"

namespace frontmesh {

/// A point of the output set, located on the base mesh.
struct GeneratedPoint {
  SurfacePoint location;
  Vec3 position;
  double h = 0.0;      // target size where the point was created
  int generation = 0;  // 0 for seeds, parent + 1 otherwise
};

/// Accepted points bucketed by the base triangle that contains them.
///
/// One writer at a time (callers serialise insert); any number of concurrent
/// readers. Storage is chunked so references stay valid while it grows, and
/// each bucket is a singly linked list, newest first, published with a
/// release store on the bucket head.
class PointRegistry {
 public:
  explicit PointRegistry(Index num_triangles)
      : heads_(std::make_unique<std::atomic<std::int32_t>[]>(static_cast<std::size_t>(num_triangles))),
        num_triangles_(num_triangles),
        blocks_(kMaxBlocks) {
    for (Index t = 0; t < num_triangles; ++t) heads_[static_cast<std::size_t>(t)].store(-1, std::memory_order_relaxed);
  }

  std::uint32_t size() const { return size_.load(std::memory_order_acquire); }
  Index num_triangles() const { return num_triangles_; }

  const GeneratedPoint& point(std::uint32_t i) const { return slot(i).point; }

  std::uint32_t insert(const GeneratedPoint& p) {
    check_triangle(p.location.triangle);
    const std::uint32_t i = size_.load(std::memory_order_relaxed);
    const std::size_t b = i >> kBlockBits;
    if (b >= kMaxBlocks) throw AlgorithmError("point registry capacity exceeded");
    if (!blocks_[b]) blocks_[b] = std::make_unique<Slot[]>(kBlockSize);
    Slot& s = blocks_[b][i & (kBlockSize - 1)];
    auto& head = heads_[static_cast<std::size_t>(p.location.triangle)];
    s.point = p;
    s.next = head.load(std::memory_order_relaxed);
    head.store(static_cast<std::int32_t>(i), std::memory_order_release);
    size_.store(i + 1, std::memory_order_release);
    return i;
  }

  /// Calls f(index, point) for every point in triangle t with index >=
  /// newer_than, newest first.
  template <class F>
  void for_each_in(Index t, F&& f, std::uint32_t newer_than = 0) const {
    std::int32_t i = heads_[static_cast<std::size_t>(t)].load(std::memory_order_acquire);
    while (i >= 0 && static_cast<std::uint32_t>(i) >= newer_than) {
      const Slot& s = slot(static_cast<std::uint32_t>(i));
      if (!f(static_cast<std::uint32_t>(i), s.point)) return;
      i = s.next;
    }
  }

  std::vector<std::uint32_t> bucket(Index t) const {
    check_triangle(t);
    std::vector<std::uint32_t> out;
    for_each_in(t, [&](std::uint32_t i, const GeneratedPoint&) {
      out.push_back(i);
      return true;
    });
    return out;
  }

  std::vector<GeneratedPoint> points() const {
    std::vector<GeneratedPoint> out;
    const std::uint32_t n = size();
    out.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) out.push_back(point(i));
    return out;
  }

 private:
  static constexpr int kBlockBits = 12;
  static constexpr std::size_t kBlockSize = std::size_t{1} << kBlockBits;
  static constexpr std::size_t kMaxBlocks = std::size_t{1} << 19;

  struct Slot {
    GeneratedPoint point;
    std::int32_t next = -1;
  };

  const Slot& slot(std::uint32_t i) const { return blocks_[i >> kBlockBits][i & (kBlockSize - 1)]; }
  void check_triangle(Index t) const {
    if (t < 0 || t >= num_triangles_) throw MeshError("invalid triangle index " + std::to_string(t));
  }

  std::unique_ptr<std::atomic<std::int32_t>[]> heads_;
  Index num_triangles_ = 0;
  std::vector<std::unique_ptr<Slot[]>> blocks_;
  std::atomic<std::uint32_t> size_{0};
};

enum class SeedOrdering { Topological, Hilbert };

/// One seed per boundary vertex, loop by loop or along a Hilbert curve.
/// Closed surfaces get a single seed at vertex 0.
inline std::vector<GeneratedPoint> seed_boundary(const SurfaceMesh& mesh, const SizeField& size,
                                                 SeedOrdering ordering = SeedOrdering::Topological) {
  std::vector<Index> vertices;
  for (const BoundaryLoop& loop : boundary_loops(mesh))
    vertices.insert(vertices.end(), loop.vertices.begin(), loop.vertices.end());
  if (vertices.empty() && mesh.num_vertices() > 0) vertices.push_back(0);

  if (ordering == SeedOrdering::Hilbert) {
    const Vec3 lo = mesh.bbox_min(), hi = mesh.bbox_max();
    std::vector<std::pair<std::uint64_t, Index>> keyed;
    keyed.reserve(vertices.size());
    for (Index v : vertices) keyed.emplace_back(hilbert_index(mesh.vertex(v), lo, hi), v);
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t k = 0; k < keyed.size(); ++k) vertices[k] = keyed[k].second;
  }

  std::vector<GeneratedPoint> seeds;
  seeds.reserve(vertices.size());
  for (Index v : vertices) {
    GeneratedPoint g;
    g.location = mesh.vertex_point(v);
    g.position = mesh.vertex(v);
    g.h = size.eval(mesh, g.location);
    seeds.push_back(g);
  }
  return seeds;
}

enum class WalkStatus { Found, HitBoundary, StepLimit, NoIntersection };

struct WalkResult {
  WalkStatus status = WalkStatus::NoIntersection;
  SurfacePoint point;
  Vec3 position;
  int visited = 0;  // triangles visited, including the first

  bool ok() const { return status == WalkStatus::Found; }
};

/// Intersects the surface with the circle of radius h centred at `origin`
/// lying in the plane spanned by `direction` and `normal`, keeping the hit
/// on the `direction` side. Walks across edge-adjacent triangles starting
/// from origin.triangle.
inline WalkResult intersect_walk(const SurfaceMesh& mesh, const SurfacePoint& origin, const Vec3& normal,
                                 const Vec3& direction, double h, int max_steps = 1000) {
  check_triangle_index(mesh, origin.triangle);
  if (!(h > 0.0)) throw ConfigError("walk radius must be positive");
  if (std::fabs(norm(direction) - 1.0) > 1e-10) throw ConfigError("walk direction must be a unit vector");
  const Vec3 o = position_of(mesh, origin);
  const Vec3 m = normalized(cross(direction, normal));
  if (norm2(m) == 0.0) throw ConfigError("walk direction is parallel to the normal");

  constexpr double inside = -1e-12;
  WalkResult r;
  Index t = origin.triangle;
  for (int step = 1; step <= max_steps; ++step) {
    r.visited = step;
    const Vec3 nt = mesh.area_vector(t);
    Vec3 line = cross(m, nt);
    const double ll = norm2(line);
    if (!(ll > 1e-30 * norm2(nt))) {
      r.status = WalkStatus::NoIntersection;
      return r;
    }
    // Closest point of the plane-plane line to the origin, then the forward
    // root of the circle on that line.
    const Vec3 y0 = (dot(nt, mesh.corner(t, 0) - o) / ll) * cross(line, m);
    line = line / std::sqrt(ll);
    if (dot(line, direction) < 0.0) line = -line;
    const double disc = h * h - norm2(y0);
    const Vec3 target = disc >= 0.0 ? o + y0 + std::sqrt(disc) * line : o + y0;
    const Bary b = barycentric(mesh, t, target);

    if (b[0] >= inside && b[1] >= inside && b[2] >= inside) {
      if (disc < 0.0) {
        r.status = WalkStatus::NoIntersection;
        return r;
      }
      Bary c{std::fmax(b[0], 0.0), std::fmax(b[1], 0.0), std::fmax(b[2], 0.0)};
      const double s = c[0] + c[1] + c[2];
      for (double& x : c) x /= s;
      r.status = WalkStatus::Found;
      r.point = {t, c};
      r.position = position_of(mesh, r.point);
      return r;
    }

    // Cross the edge opposite the most negative coordinate, skipping
    // boundary edges while another negative edge is available.
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int c) { return b[static_cast<std::size_t>(a)] < b[static_cast<std::size_t>(c)]; });
    Index next = kNoNeighbor;
    for (int e : order) {
      if (!(b[static_cast<std::size_t>(e)] < inside)) break;
      next = mesh.neighbor(t, e);
      if (next != kNoNeighbor) break;
    }
    if (next == kNoNeighbor) {
      r.status = WalkStatus::HitBoundary;
      return r;
    }
    t = next;
  }
  r.status = WalkStatus::StepLimit;
  return r;
}

/// Convenience overload using the face normal of the origin triangle.
inline WalkResult intersect_walk(const SurfaceMesh& mesh, const SurfacePoint& origin, const Vec3& direction, double h,
                                 int max_steps = 1000) {
  check_triangle_index(mesh, origin.triangle);
  return intersect_walk(mesh, origin, mesh.face_normal(origin.triangle), direction, h, max_steps);
}

enum class FilterNorm { Linf, L2 };
enum class LinfAxes { Global, CrossFrame };

inline FilterNorm default_norm(int order) { return order == 6 ? FilterNorm::L2 : FilterNorm::Linf; }

/// Distance used by the exclusion test. With `axes` non-null the L-infinity
/// norm is measured along those three orthonormal axes instead of x, y, z.
inline double filter_distance(const Vec3& a, const Vec3& b, FilterNorm norm_kind, const TangentFrame* axes = nullptr) {
  const Vec3 d = a - b;
  if (norm_kind == FilterNorm::L2) return norm(d);
  if (!axes) return norm_inf(d);
  return std::fmax(std::fabs(dot(d, axes->t1)), std::fmax(std::fabs(dot(d, axes->t2)), std::fabs(dot(d, axes->n))));
}

/// Radius of the Euclidean ball that must be searched so that every point
/// closer than alpha * h in the filter norm is found.
inline double collection_radius(double h, double alpha, FilterNorm norm_kind) {
  if (norm_kind == FilterNorm::L2) return h * std::fmax(1.0, alpha);
  return h * std::fmax(1.0, alpha * std::sqrt(3.0));
}

namespace detail {

// Squared distance from p to triangle abc (closest-feature classification).
inline double point_triangle_distance2(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return norm2(ap);
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return norm2(bp);
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return norm2(ap - (d1 / (d1 - d3)) * ab);
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return norm2(cp);
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return norm2(ap - (d2 / (d2 - d6)) * ac);
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return norm2(bp - ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b));
  const double denom = 1.0 / (va + vb + vc);
  return norm2(ap - (vb * denom) * ab - (vc * denom) * ac);
}

}  // namespace detail

/// Per-thread scratch for exclusion-zone collection.
class ZoneScratch {
 public:
  std::vector<Index> triangles;

  void collect(const SurfaceMesh& mesh, const Vec3& x, Index start, double radius) {
    if (mark_.size() != static_cast<std::size_t>(mesh.num_triangles())) {
      mark_.assign(static_cast<std::size_t>(mesh.num_triangles()), 0);
      epoch_ = 0;
    }
    if (++epoch_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      epoch_ = 1;
    }
    const double r2 = radius * radius;
    triangles.clear();
    triangles.push_back(start);
    mark_[static_cast<std::size_t>(start)] = epoch_;
    for (std::size_t head = 0; head < triangles.size(); ++head) {
      for (Index nb : mesh.neighbors(triangles[head])) {
        if (nb == kNoNeighbor || mark_[static_cast<std::size_t>(nb)] == epoch_) continue;
        mark_[static_cast<std::size_t>(nb)] = epoch_;
        if (detail::point_triangle_distance2(x, mesh.corner(nb, 0), mesh.corner(nb, 1), mesh.corner(nb, 2)) <= r2)
          triangles.push_back(nb);
      }
    }
  }

 private:
  std::vector<std::uint32_t> mark_;
  std::uint32_t epoch_ = 0;
};

struct FilterParams {
  double alpha = 0.75;
  FilterNorm norm = FilterNorm::Linf;
  LinfAxes axes = LinfAxes::Global;
};

struct FilterResult {
  bool accepted = true;
  std::optional<std::uint32_t> blocker;
};

/// Tests registered points in the triangles already gathered in `zone`,
/// considering only indices >= newer_than.
inline FilterResult filter_against_zone(const GeneratedPoint& candidate, const PointRegistry& registry,
                                        const ZoneScratch& zone, const FilterParams& params,
                                        const TangentFrame* axes = nullptr, std::uint32_t newer_than = 0) {
  const double limit = params.alpha * candidate.h;
  FilterResult r;
  for (Index t : zone.triangles) {
    registry.for_each_in(
        t,
        [&](std::uint32_t i, const GeneratedPoint& p) {
          if (filter_distance(candidate.position, p.position, params.norm, axes) <= limit) {
            r.accepted = false;
            r.blocker = i;
            return false;
          }
          return true;
        },
        newer_than);
    if (!r.accepted) break;
  }
  return r;
}

inline FilterResult filter_candidate(const GeneratedPoint& candidate, const PointRegistry& registry,
                                     const SurfaceMesh& mesh, const FilterParams& params, ZoneScratch& zone,
                                     const TangentFrame* axes = nullptr) {
  check_triangle_index(mesh, candidate.location.triangle);
  zone.collect(mesh, candidate.position, candidate.location.triangle,
               collection_radius(candidate.h, params.alpha, params.norm));
  return filter_against_zone(candidate, registry, zone, params, axes);
}

inline FilterResult filter_candidate(const GeneratedPoint& candidate, const PointRegistry& registry,
                                     const SurfaceMesh& mesh, double alpha, FilterNorm norm_kind) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  ZoneScratch zone;
  return filter_candidate(candidate, registry, mesh, FilterParams{alpha, norm_kind, LinfAxes::Global}, zone);
}

struct InsertionOptions {
  double alpha = 0.75;
  std::optional<FilterNorm> norm;  // default follows the field order
  LinfAxes linf_axes = LinfAxes::Global;
  SeedOrdering seed_ordering = SeedOrdering::Topological;
  int workers = 1;
  int max_walk_steps = 1000;
};

struct InsertionStats {
  std::size_t seeds = 0;
  std::size_t points = 0;
  std::size_t candidates = 0;  // walks attempted
  std::size_t walks_found = 0;
  std::size_t walks_hit_boundary = 0;
  std::size_t walks_step_limit = 0;
  std::size_t walks_no_intersection = 0;
  std::size_t triangles_visited = 0;  // summed over successful walks
  std::size_t rejected = 0;           // successful walks refused by the filter
  std::size_t rejected_in_commit = 0;
  double seconds = 0.0;

  double mean_walk_length() const {
    return walks_found ? static_cast<double>(triangles_visited) / static_cast<double>(walks_found) : 0.0;
  }
  double rejection_rate() const {
    return walks_found ? static_cast<double>(rejected) / static_cast<double>(walks_found) : 0.0;
  }

  InsertionStats& operator+=(const InsertionStats& o) {
    candidates += o.candidates;
    walks_found += o.walks_found;
    walks_hit_boundary += o.walks_hit_boundary;
    walks_step_limit += o.walks_step_limit;
    walks_no_intersection += o.walks_no_intersection;
    triangles_visited += o.triangles_visited;
    rejected += o.rejected;
    rejected_in_commit += o.rejected_in_commit;
    return *this;
  }
};

struct InsertionResult {
  std::vector<GeneratedPoint> points;  // seeds first, then in acceptance order
  InsertionStats stats;
};

/// Frontal point generation. Seeds are split into `workers` contiguous FIFO
/// queues; each worker pops the front of its queue (or steals from another
/// when empty), spawns one candidate per field direction and appends accepted
/// candidates to the back of its own queue. Acceptance re-checks points
/// inserted since the local test under a global lock.
inline InsertionResult generate_points(const SurfaceMesh& mesh, const DirectionField& field, const SizeField& size,
                                       const InsertionOptions& options = {}) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (options.workers < 1) throw ConfigError("workers must be at least 1");
  if (options.max_walk_steps < 1) throw ConfigError("walk step cap must be at least 1");
  if (field.theta().size() != static_cast<std::size_t>(mesh.num_vertices()))
    throw ConfigError("direction field does not match the mesh");
  if (mesh.empty()) throw MeshError("empty mesh");

  const auto start = std::chrono::steady_clock::now();
  const FilterParams params{options.alpha, options.norm.value_or(default_norm(field.order())), options.linf_axes};
  const bool frame_axes = params.norm == FilterNorm::Linf && params.axes == LinfAxes::CrossFrame;

  PointRegistry registry(mesh.num_triangles());
  const std::vector<GeneratedPoint> seeds = seed_boundary(mesh, size, options.seed_ordering);
  for (const GeneratedPoint& s : seeds) registry.insert(s);

  struct Queue {
    std::mutex mutex;
    std::deque<std::uint32_t> items;
  };
  const auto nw = static_cast<std::size_t>(options.workers);
  std::vector<Queue> queues(nw);
  for (std::size_t k = 0; k < seeds.size(); ++k)
    queues[k * nw / seeds.size()].items.push_back(static_cast<std::uint32_t>(k));

  std::atomic<std::int64_t> pending{static_cast<std::int64_t>(seeds.size())};
  std::atomic<bool> abort{false};
  std::mutex commit;
  std::vector<InsertionStats> stats(nw);
  std::vector<std::exception_ptr> errors(nw);

  auto pop = [&](std::size_t w) -> std::optional<std::uint32_t> {
    for (std::size_t k = 0; k < nw; ++k) {
      Queue& q = queues[(w + k) % nw];
      std::lock_guard lock(q.mutex);
      if (!q.items.empty()) {
        const std::uint32_t i = q.items.front();
        q.items.pop_front();
        return i;
      }
    }
    return std::nullopt;
  };

  auto worker = [&](std::size_t w) {
    try {
      ZoneScratch zone;
      InsertionStats& st = stats[w];
      while (!abort.load(std::memory_order_relaxed)) {
        const std::optional<std::uint32_t> idx = pop(w);
        if (!idx) {
          if (pending.load(std::memory_order_acquire) == 0) break;
          std::this_thread::yield();
          continue;
        }
        const GeneratedPoint origin = registry.point(*idx);
        const Directions dirs = sample_directions(field, mesh, origin.location);
        for (const Vec3& d : dirs.view()) {
          ++st.candidates;
          const WalkResult walk = intersect_walk(mesh, origin.location, dirs.normal, d, origin.h, options.max_walk_steps);
          switch (walk.status) {
            case WalkStatus::Found: break;
            case WalkStatus::HitBoundary: ++st.walks_hit_boundary; continue;
            case WalkStatus::StepLimit: ++st.walks_step_limit; continue;
            case WalkStatus::NoIntersection: ++st.walks_no_intersection; continue;
          }
          ++st.walks_found;
          st.triangles_visited += static_cast<std::size_t>(walk.visited);

          GeneratedPoint cand;
          cand.location = walk.point;
          cand.position = walk.position;
          cand.h = size.eval(mesh, walk.point);
          cand.generation = origin.generation + 1;

          std::optional<TangentFrame> axes;
          if (frame_axes) {
            const Directions cd = sample_directions(field, mesh, cand.location);
            axes = TangentFrame{cd.dirs[0], cross(cd.normal, cd.dirs[0]), cd.normal};
          }
          const std::uint32_t seen = registry.size();
          if (!filter_candidate(cand, registry, mesh, params, zone, axes ? &*axes : nullptr).accepted) {
            ++st.rejected;
            continue;
          }
          std::uint32_t inserted = 0;
          {
            std::lock_guard lock(commit);
            if (!filter_against_zone(cand, registry, zone, params, axes ? &*axes : nullptr, seen).accepted) {
              ++st.rejected;
              ++st.rejected_in_commit;
              continue;
            }
            inserted = registry.insert(cand);
          }
          pending.fetch_add(1, std::memory_order_relaxed);
          std::lock_guard lock(queues[w].mutex);
          queues[w].items.push_back(inserted);
        }
        pending.fetch_sub(1, std::memory_order_release);
      }
    } catch (...) {
      errors[w] = std::current_exception();
      abort.store(true);
    }
  };

  if (nw == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(nw);
    for (std::size_t w = 0; w < nw; ++w) threads.emplace_back(worker, w);
    for (std::thread& t : threads) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  InsertionResult result;
  result.points = registry.points();
  for (const InsertionStats& s : stats) result.stats += s;
  result.stats.seeds = seeds.size();
  result.stats.points = result.points.size();
  result.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace frontmesh
