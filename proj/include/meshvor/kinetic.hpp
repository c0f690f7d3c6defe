#pragma once

// Removal phase: input weights grow with t, Steiner and box vertices keep
// weight zero. Every interior edge carries a certificate (the time its
// quadrilateral becomes cocircular under power distance); events are popped
// in time order and resolved by (2,2) or (3,1) flips.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "meshvor/complex.hpp"
#include "meshvor/errors.hpp"
#include "meshvor/kernel.hpp"
#include "meshvor/simplex_set.hpp"
#include "meshvor/stats.hpp"

namespace meshvor {

struct FlipEvent {
  ExactScalar time;
  EdgeKey edge;
  std::array<TriangleRef, 2> tri{kNoTriangle, kNoTriangle};
  std::array<std::uint64_t, 2> stamp{0, 0};
  std::uint64_t seq = 0;  // insertion order; final tiebreak only
};

/// Min-heap on (time, edge key, seq).
class FlipHeap {
 public:
  void push(FlipEvent e) {
    e.seq = next_seq_++;
    heap_.push(std::move(e));
    peak_ = std::max<std::uint64_t>(peak_, heap_.size());
  }
  const FlipEvent& top() const { return heap_.top(); }
  FlipEvent pop() {
    FlipEvent e = heap_.top();
    heap_.pop();
    return e;
  }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  std::uint64_t peak() const { return peak_; }

 private:
  struct Later {
    bool operator()(const FlipEvent& a, const FlipEvent& b) const {
      if (const int c = cmp(a.time, b.time); c != 0) return c > 0;
      if (a.edge != b.edge) return b.edge < a.edge;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<FlipEvent, std::vector<FlipEvent>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t peak_ = 0;
};

enum class StepOutcome : std::uint8_t { PerformedFlip22, PerformedFlip31, Stale, Exhausted };

inline const char* to_string(StepOutcome s) {
  switch (s) {
    case StepOutcome::PerformedFlip22: return "flip22";
    case StepOutcome::PerformedFlip31: return "flip31";
    case StepOutcome::Stale: return "stale";
    case StepOutcome::Exhausted: return "exhausted";
  }
  return "?";
}

/// One performed flip. For flip22, `vertices` is (old a, old b, new c, new d):
/// edge ab replaced by cd. For flip31, it is (removed, ring...).
struct TraceRecord {
  ExactScalar time;
  StepOutcome kind = StepOutcome::PerformedFlip22;
  std::array<std::uint32_t, 4> vertices{};
};

class KineticState {
 public:
  using TraceSink = std::function<void(const TraceRecord&)>;
  /// Called before the first flip at a time strictly later than the previous
  /// flip (or than 0): the complex is valid on the open interval (from, to).
  using IntervalHook = std::function<void(const KineticState&, const ExactScalar& from, const ExactScalar& to)>;

  explicit KineticState(Triangulation t) : t_(std::move(t)) {}

  const Triangulation& triangulation() const { return t_; }
  Triangulation& triangulation_for_testing() { return t_; }
  const ExactScalar& now() const { return t_now_; }
  const FlipHeap& heap() const { return heap_; }
  const RunStats& stats() const { return stats_; }
  RunStats& stats() { return stats_; }

  void set_trace(TraceSink sink) { trace_ = std::move(sink); }
  void set_interval_hook(IntervalHook hook) { interval_hook_ = std::move(hook); }

  /// The event for an interior edge, if its quadrilateral turns illegal at
  /// or after t_now. The determinant D(t) = slope t + offset is positive
  /// while the edge is legal; only a negative slope can make it illegal.
  std::optional<FlipEvent> certificate(EdgeRef e) {
    if (!t_.is_interior(e)) throw PreconditionError("certificate: hull edge");
    ++stats_.potential_flips_seen;
    const Triangle& t0 = t_.triangle(e.tri);
    const TriangleRef r1 = t0.nbr[e.index];
    const Triangle& t1 = t_.triangle(r1);
    const int j = t_.mirror_index(e.tri, e.index);
    const VertexId c = t0.v[e.index], a = t0.v[next3(e.index)], b = t0.v[prev3(e.index)], d = t1.v[j];
    const PowerDeterminant det = power_determinant(
        {t_.site(a).labeled(), t_.site(b).labeled(), t_.site(c).labeled(), t_.site(d).labeled()});
    if (det.slope.sign() >= 0) return std::nullopt;
    ExactScalar root = det.offset.to_rational() / det.slope.to_rational();
    root = -root;
    if (root < t_now_) {
      ++stats_.late_certificates;
      root = t_now_;
    }
    FlipEvent ev;
    ev.time = std::move(root);
    ev.edge = EdgeKey::of(a, b);
    ev.tri = {e.tri, r1};
    ev.stamp = {t0.stamp, t1.stamp};
    return ev;
  }

  /// Certificates for every interior edge at t = 0.
  void seed() {
    if (seeded_) throw PreconditionError("seed: already seeded");
    seeded_ = true;
    vertices_at_seed_ = t_.live_vertex_count();
    for (const EdgeRef e : t_.interior_edge_refs()) schedule(e);
  }

  StepOutcome step() {
    if (heap_.empty()) return StepOutcome::Exhausted;
    const FlipEvent ev = heap_.pop();
    const auto [r0, r1] = ev.tri;
    if (!t_.is_live(r0) || !t_.is_live(r1) || t_.triangle(r0).stamp != ev.stamp[0] ||
        t_.triangle(r1).stamp != ev.stamp[1]) {
      ++stats_.stale_pops;
      return StepOutcome::Stale;
    }
    const Triangle& t0 = t_.triangle(r0);
    int k = -1;
    for (int i = 0; i < 3; ++i) {
      if (t0.nbr[i] == r1 && EdgeKey::of(t0.v[next3(i)], t0.v[prev3(i)]) == ev.edge) k = i;
    }
    if (k < 0) {
      ++stats_.stale_pops;
      return StepOutcome::Stale;
    }
    const EdgeRef e{r0, k};
    const int j = t_.mirror_index(r0, k);
    const VertexId c = t0.v[k], a = t0.v[next3(k)], b = t0.v[prev3(k)], d = t_.triangle(r1).v[j];
    const Point pa = t_.point(a), pb = t_.point(b), pc = t_.point(c), pd = t_.point(d);
    const Sign at_a = orient2d(pc, pd, pa);
    const Sign at_b = orient2d(pd, pc, pb);

    if (at_a == Sign::Negative && at_b == Sign::Negative) {
      advance(ev.time);
      const EdgeRef ne = t_.flip22(e);
      ++stats_.flips_22;
      emit({ev.time, StepOutcome::PerformedFlip22, {index_of(a), index_of(b), index_of(c), index_of(d)}});
      const TriangleRef u = t_.triangle(ne.tri).nbr[ne.index];
      schedule(ne);
      recertify_others(ne.tri, ne.index);
      for (int i = 0; i < 3; ++i) {
        if (t_.triangle(u).nbr[i] != ne.tri) schedule_if_interior({u, i});
      }
      return StepOutcome::PerformedFlip22;
    }
    // a or b on the segment cd: flipping ab leaves it with degree 3 on a
    // flat triangle, so the removal goes straight through.
    const bool flat_a = at_a == Sign::Zero && at_b == Sign::Negative;
    const bool flat_b = at_b == Sign::Zero && at_a == Sign::Negative;
    if (flat_a || flat_b) {
      const VertexId v = flat_a ? a : b;
      if (!t_.is_hull_vertex(v) && t_.vertex_degree(v) == 4) {
        advance(ev.time);
        std::vector<VertexId> ring = t_.neighbors(v);
        const auto out = t_.flip42(e);
        ++stats_.flips_22;
        ++stats_.flips_31;
        emit({ev.time, StepOutcome::PerformedFlip22, {index_of(a), index_of(b), index_of(c), index_of(d)}});
        std::erase(ring, flat_a ? b : a);
        emit({ev.time, StepOutcome::PerformedFlip31, {index_of(v), index_of(ring[0]), index_of(ring[1]), index_of(ring[2])}});
        for (int i = 0; i < 3; ++i) schedule_if_interior({out[0], i});
        for (int i = 0; i < 3; ++i) {
          if (t_.triangle(out[1]).nbr[i] != out[0]) schedule_if_interior({out[1], i});
        }
        return StepOutcome::PerformedFlip31;
      }
    }
    // Reflex quadrilateral: the reflex vertex must have degree 3.
    std::optional<VertexId> reflex;
    if (at_a == Sign::Positive) reflex = a;
    if (at_b == Sign::Positive) reflex = b;
    if (reflex && !t_.is_hull_vertex(*reflex) && t_.vertex_degree(*reflex) == 3) {
      const VertexId v = *reflex;
      const std::vector<VertexId> ring = t_.neighbors(v);
      advance(ev.time);
      const TriangleRef r = t_.flip31(v);
      ++stats_.flips_31;
      emit({ev.time, StepOutcome::PerformedFlip31, {index_of(v), index_of(ring[0]), index_of(ring[1]), index_of(ring[2])}});
      for (int i = 0; i < 3; ++i) schedule_if_interior({r, i});
      return StepOutcome::PerformedFlip31;
    }
    ++stats_.degenerate_pops;
    ++stats_.stale_pops;
    return StepOutcome::Stale;
  }

  /// Steps until the heap is exhausted, then checks that every surviving
  /// non-input vertex lies on the hull.
  const RunStats& run() {
    if (!seeded_) throw PreconditionError("run: state not seeded");
    while (step() != StepOutcome::Exhausted) {
    }
    stats_.heap_peak = heap_.peak();
    if (t_.live_vertex_count() > vertices_at_seed_) throw KineticError("run: vertex count increased");
    if (const auto v = interior_scaffolding_vertex()) {
      throw KineticError("run: non-input vertex " + std::to_string(index_of(*v)) + " (" +
                         to_string(t_.vertex(*v).kind) + ") is interior after the last event at t = " +
                         to_exact_string(t_now_));
    }
    return stats_;
  }

  /// A live non-input vertex that is not on the hull, if any.
  std::optional<VertexId> interior_scaffolding_vertex() const {
    for (const VertexId v : t_.live_vertices()) {
      if (t_.vertex(v).kind != WeightClass::Input && !t_.is_hull_vertex(v)) return v;
    }
    return std::nullopt;
  }

  /// Drops every non-input vertex with its incident simplices. Input
  /// vertices are relabeled by rank of id (the input index in a pipeline run).
  SimplexSet postprocess() {
    if (const auto v = interior_scaffolding_vertex()) {
      throw KineticError("postprocess: non-input vertex " + std::to_string(index_of(*v)) + " is interior");
    }
    const SimplexSet all = t_.simplices();
    std::vector<std::uint32_t> rank(t_.vertex_slots(), kNotInput);
    std::uint32_t next = 0;
    for (std::uint32_t v = 0; v < t_.vertex_slots(); ++v) {
      if (t_.vertex(VertexId{v}).kind == WeightClass::Input) rank[v] = next++;
    }
    auto input = [&](std::uint32_t v) { return rank[v] != kNotInput; };
    SimplexSet out;
    for (const auto v : all.vertices) {
      if (input(v)) out.vertices.push_back(rank[v]);
    }
    for (const auto& e : all.edges) {
      if (input(e[0]) && input(e[1])) out.edges.push_back(SimplexSet::make_edge(rank[e[0]], rank[e[1]]));
    }
    for (const auto& t : all.triangles) {
      if (input(t[0]) && input(t[1]) && input(t[2])) {
        out.triangles.push_back(SimplexSet::make_triangle(rank[t[0]], rank[t[1]], rank[t[2]]));
      }
    }
    std::sort(out.vertices.begin(), out.vertices.end());
    std::sort(out.edges.begin(), out.edges.end());
    std::sort(out.triangles.begin(), out.triangles.end());
    stats_.scaffolding_count = all.size() - out.size();
    return out;
  }

 private:
  static constexpr std::uint32_t kNotInput = 0xffffffffu;

  void schedule(EdgeRef e) {
    if (auto ev = certificate(e)) {
      heap_.push(std::move(*ev));
      ++stats_.events_scheduled;
    }
  }
  void schedule_if_interior(EdgeRef e) {
    if (t_.is_interior(e)) schedule(e);
  }
  void recertify_others(TriangleRef r, int skip) {
    for (int i = 0; i < 3; ++i) {
      if (i != skip) schedule_if_interior({r, i});
    }
  }

  void advance(const ExactScalar& t) {
    if (t < t_now_) throw KineticError("step: event time " + to_exact_string(t) + " precedes t_now");
    if (t > last_flip_time_) {
      if (interval_hook_) interval_hook_(*this, last_flip_time_, t);
      last_flip_time_ = t;
    }
    t_now_ = t;
  }

  void emit(const TraceRecord& r) {
    if (trace_) trace_(r);
  }

  Triangulation t_;
  ExactScalar t_now_ = 0;
  ExactScalar last_flip_time_ = 0;
  FlipHeap heap_;
  RunStats stats_;
  std::size_t vertices_at_seed_ = 0;
  bool seeded_ = false;
  TraceSink trace_;
  IntervalHook interval_hook_;
};

}  // namespace meshvor
