#include "mcroi/cover.hpp"

#include <algorithm>
#include <chrono>\n#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "mcroi/error.hpp"

namespace mcroi {

namespace {

struct Bits {
  std::vector<uint64_t> w;

  explicit Bits(int nbits = 0) : w((static_cast<size_t>(nbits) + 63) / 64, 0) {}

  void set(int i) { w[static_cast<size_t>(i) >> 6] |= 1ULL << (i & 63); }
  bool test(int i) const {
    return (w[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1ULL;
  }
  void or_with(const Bits& o) {
    for (size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
  }
  bool subset_of(const Bits& o) const {
    for (size_t i = 0; i < w.size(); ++i) {
      if (w[i] & ~o.w[i]) return false;
    }
    return true;
  }
  bool intersects(const Bits& o) const {
    for (size_t i = 0; i < w.size(); ++i) {
      if (w[i] & o.w[i]) return true;
    }
    return false;
  }
  int count() const {
    int c = 0;
    for (uint64_t x : w) c += __builtin_popcountll(x);
    return c;
  }
  int count_outside(const Bits& o) const {  // |this \ o|
    int c = 0;
    for (size_t i = 0; i < w.size(); ++i) c += __builtin_popcountll(w[i] & ~o.w[i]);
    return c;
  }
  bool operator==(const Bits& o) const { return w == o.w; }

  // true when, at the smallest differing tile id, this set contains it;
  // for equal-size sets this is lexicographic order of the sorted id lists
  bool lex_less(const Bits& o) const {
    for (size_t i = 0; i < w.size(); ++i) {
      uint64_t diff = w[i] ^ o.w[i];
      if (diff) {
        uint64_t low = diff & (~diff + 1);
        return (w[i] & low) != 0;
      }
    }
    return false;
  }
};

struct BitsHash {
  size_t operator()(const Bits& b) const {
    uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (uint64_t x : b.w) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<size_t>(h);
  }
};

struct DenseDemand {
  int order_key_frame = 0;
  int64_t order_key_object = 0;
  int dup = 0;
  std::vector<Bits> alts;        // alternative tile sets, dense ids
  Bits footprint;                // union of all alternatives

  DenseDemand() : footprint(0) {}
};

// dense encoding of an instance over only the tiles that occur in alternatives
struct DenseInstance {
  std::vector<TileRef> tiles;    // dense id -> TileRef, sorted ascending
  std::vector<DenseDemand> demands;
  int num_tiles() const { return static_cast<int>(tiles.size()); }
};

DenseInstance densify(const CoverInstance& instance) {
  DenseInstance d;
  std::vector<TileRef> all;
  for (const auto& dem : instance.demands) {
    for (const auto& alt : dem.alternatives) {
      all.insert(all.end(), alt.begin(), alt.end());
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  d.tiles = std::move(all);

  std::map<TileRef, int> id_of;
  for (int i = 0; i < d.num_tiles(); ++i) id_of[d.tiles[i]] = i;

  for (const auto& dem : instance.demands) {
    if (dem.alternatives.empty()) {
      throw Error(ErrorKind::InvalidInput, "demand with no alternatives");
    }
    DenseDemand dd;
    dd.order_key_frame = dem.frame_index;
    dd.order_key_object = dem.object_id;
    dd.dup = dem.dup_index;
    dd.footprint = Bits(d.num_tiles());
    for (const auto& alt : dem.alternatives) {
      Bits b(d.num_tiles());
      for (const TileRef& t : alt) b.set(id_of.at(t));
      dd.footprint.or_with(b);
      dd.alts.push_back(std::move(b));
    }
    d.demands.push_back(std::move(dd));
  }
  return d;
}

Solution to_solution(const DenseInstance& dense, const CoverInstance& instance,
                     const Bits& chosen, SolveStatus status, int64_t nodes) {
  Solution sol;
  sol.status = status;
  sol.nodes_explored = nodes;
  std::map<int, RoiMask> masks;
  for (const TileRef& t : instance.universe) {
    auto [it, inserted] = masks.try_emplace(t.camera_id);
    if (inserted) it->second.camera_id = t.camera_id;
  }
  for (int i = 0; i < dense.num_tiles(); ++i) {
    if (chosen.test(i)) {
      const TileRef& t = dense.tiles[i];
      auto [it, inserted] = masks.try_emplace(t.camera_id);
      if (inserted) it->second.camera_id = t.camera_id;
      it->second.tiles.insert(t.tile_index);
      sol.objective++;
    }
  }
  sol.masks = std::move(masks);
  return sol;
}

bool demand_satisfied(const DenseDemand& d, const Bits& chosen) {
  for (const Bits& alt : d.alts) {
    if (alt.subset_of(chosen)) return true;
  }
  return false;
}

Bits greedy_select(const DenseInstance& dense) {
  const int n = dense.num_tiles();
  Bits chosen(n);
  std::vector<char> sat(dense.demands.size(), 0);
  for (;;) {
    bool any_unsat = false;
    // settle demands already covered by the committed tiles
    for (size_t i = 0; i < dense.demands.size(); ++i) {
      if (!sat[i] && demand_satisfied(dense.demands[i], chosen)) sat[i] = 1;
      if (!sat[i]) any_unsat = true;
    }
    if (!any_unsat) break;

    int best_cost = -1;
    size_t best_demand = 0;
    const Bits* best_alt = nullptr;
    for (size_t i = 0; i < dense.demands.size(); ++i) {
      if (sat[i]) continue;
      const DenseDemand& d = dense.demands[i];
      int cheapest = -1;
      const Bits* cheapest_alt = nullptr;
      for (const Bits& alt : d.alts) {  // alternative order: ascending camera
        int cost = alt.count_outside(chosen);
        if (cheapest < 0 || cost < cheapest) {
          cheapest = cost;
          cheapest_alt = &alt;
        }
      }
      // ties resolved by demand order: (frame, object, dup), i.e. index order
      if (best_cost < 0 || cheapest < best_cost) {
        best_cost = cheapest;
        best_demand = i;
        best_alt = cheapest_alt;
      }
    }
    chosen.or_with(*best_alt);
    sat[best_demand] = 1;
  }
  return chosen;
}

struct ExactSearch {
  const DenseInstance& dense;
  const std::vector<int>& active;  // demand indices this search owns
  std::chrono::steady_clock::time_point deadline;
  bool timed_out = false;
  int64_t nodes = 0;

  Bits incumbent;
  int incumbent_size = 0;

  std::unordered_set<Bits, BitsHash> visited;
  static constexpr size_t kMemoCap = 1u << 21;

  ExactSearch(const DenseInstance& d, const std::vector<int>& demand_indices)
      : dense(d), active(demand_indices), incumbent(0) {}

  // lex-smallest conceivable completion of `chosen` with `extra` more tiles
  // drawn from `pool`; used to prune equal-objective subtrees that cannot
  // beat the incumbent's tie-break
  bool lex_bound_beats_incumbent(const Bits& chosen, const Bits& pool, int extra) const {
    Bits best = chosen;
    int taken = 0;
    for (size_t w = 0; w < pool.w.size() && taken < extra; ++w) {
      uint64_t bits = pool.w[w];
      while (bits && taken < extra) {
        uint64_t low = bits & (~bits + 1);
        best.w[w] |= low;
        bits ^= low;
        taken++;
      }
    }
    if (taken < extra) return false;  // pool exhausted: no completion exists
    return best.lex_less(incumbent);
  }

  // lower bound: committed tiles plus the cheapest marginal cost of a
  // greedily chosen set of demands whose remaining footprints are disjoint
  int lower_bound(const Bits& chosen, const std::vector<char>& sat) const {
    struct Entry {
      int cost;
      int order;
    };
    std::vector<Entry> entries;
    for (size_t k = 0; k < active.size(); ++k) {
      if (sat[k]) continue;
      int cheapest = -1;
      for (const Bits& alt : dense.demands[active[k]].alts) {
        int cost = alt.count_outside(chosen);
        if (cheapest < 0 || cost < cheapest) cheapest = cost;
      }
      entries.push_back({cheapest, static_cast<int>(k)});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      if (a.cost != b.cost) return a.cost > b.cost;
      return a.order < b.order;
    });
    Bits used(dense.num_tiles());
    int bound = chosen.count();
    for (const Entry& e : entries) {
      Bits remaining = dense.demands[active[e.order]].footprint;
      for (size_t k = 0; k < remaining.w.size(); ++k) remaining.w[k] &= ~chosen.w[k];
      if (!remaining.intersects(used)) {
        used.or_with(remaining);
        bound += e.cost;
      }
    }
    return bound;
  }

  void search(Bits chosen, std::vector<char> sat) {
    if (timed_out) return;
    if ((++nodes & 1023) == 0 &&
        std::chrono::steady_clock::now() > deadline) {
      timed_out = true;
      return;
    }

    for (size_t k = 0; k < active.size(); ++k) {
      if (!sat[k] && demand_satisfied(dense.demands[active[k]], chosen)) sat[k] = 1;
    }

    // most-constrained branching: fewest alternatives, then largest cheapest
    // marginal cost, then index; a pure function of the state
    int next = -1;
    int next_alts = 0, next_cost = 0;
    for (size_t k = 0; k < active.size(); ++k) {
      if (sat[k]) continue;
      const DenseDemand& d = dense.demands[active[k]];
      int cheapest = -1;
      for (const Bits& alt : d.alts) {
        int cost = alt.count_outside(chosen);
        if (cheapest < 0 || cost < cheapest) cheapest = cost;
      }
      int alts = static_cast<int>(d.alts.size());
      if (next < 0 || alts < next_alts || (alts == next_alts && cheapest > next_cost)) {
        next = static_cast<int>(k);
        next_alts = alts;
        next_cost = cheapest;
      }
    }
    if (next < 0) {
      int size = chosen.count();
      if (size < incumbent_size ||
          (size == incumbent_size && chosen.lex_less(incumbent))) {
        incumbent = chosen;
        incumbent_size = size;
      }
      return;
    }

    // strictly worse subtrees are cut; equal-objective subtrees are cut only
    // when even their lex-best completion loses the tie-break
    int bound = lower_bound(chosen, sat);
    if (bound > incumbent_size) return;
    if (bound == incumbent_size) {
      Bits pool(dense.num_tiles());
      for (size_t k = 0; k < active.size(); ++k) {
        if (!sat[k]) pool.or_with(dense.demands[active[k]].footprint);
      }
      for (size_t w = 0; w < pool.w.size(); ++w) pool.w[w] &= ~chosen.w[w];
      if (!lex_bound_beats_incumbent(chosen, pool, incumbent_size - chosen.count())) {
        return;
      }
    }

    if (visited.size() < kMemoCap) {
      auto [it, inserted] = visited.insert(chosen);
      (void)it;
      if (!inserted) return;  // same tile set reached before: same subtree
    }

    const DenseDemand& d = dense.demands[active[next]];
    std::vector<std::pair<int, int>> alt_order;  // (marginal cost, alt index)
    for (size_t a = 0; a < d.alts.size(); ++a) {
      alt_order.emplace_back(d.alts[a].count_outside(chosen), static_cast<int>(a));
    }
    std::sort(alt_order.begin(), alt_order.end());
    for (const auto& [cost, a] : alt_order) {
      (void)cost;
      Bits child = chosen;
      child.or_with(d.alts[a]);
      search(std::move(child), sat);
      if (timed_out) return;
    }
  }
};

}  // namespace

CoverInstance build_cover_instance(const AssociationTable& table,
                                   const std::map<int, TileGrid>& grids) {
  CoverInstance instance;
  for (const auto& [camera_id, grid] : grids) {
    for (int i = 1; i <= grid.tile_count(); ++i) {
      instance.universe.push_back(TileRef{camera_id, i});
    }
  }

  // canonical alternative list -> already emitted?
  std::unordered_set<std::string> seen;
  for (const auto& [frame, objects] : table.frames) {
    for (const TableObject& obj : objects) {
      ObjectDemand demand;
      demand.frame_index = frame;
      demand.object_id = obj.object_id;
      demand.dup_index = obj.dup_index;
      for (const auto& [camera_id, tiles] : obj.regions) {
        auto grid_it = grids.find(camera_id);
        if (grid_it == grids.end()) {
          throw Error(ErrorKind::InvalidInput,
                      "region references camera " + std::to_string(camera_id) +
                          " with no grid");
        }
        std::vector<TileRef> alt;
        alt.reserve(tiles.size());
        for (int tile : tiles) {
          if (!grid_it->second.valid_index(tile)) {
            throw Error(ErrorKind::InvalidInput,
                        "region tile " + std::to_string(tile) +
                            " out of grid bounds for camera " +
                            std::to_string(camera_id));
          }
          alt.push_back(TileRef{camera_id, tile});
        }
        std::sort(alt.begin(), alt.end());
        demand.alternatives.push_back(std::move(alt));
      }

      // dominance: drop any alternative that strictly contains another,
      // and collapse duplicates
      std::sort(demand.alternatives.begin(), demand.alternatives.end(),
                [](const auto& a, const auto& b) {
                  if (a.size() != b.size()) return a.size() < b.size();
                  return a < b;
                });
      std::vector<std::vector<TileRef>> kept;
      for (auto& alt : demand.alternatives) {
        bool dominated = false;
        for (const auto& k : kept) {
          if (std::includes(alt.begin(), alt.end(), k.begin(), k.end())) {
            dominated = true;  // k covers whenever alt does, with fewer tiles
            break;
          }
        }
        if (!dominated) kept.push_back(std::move(alt));
      }
      demand.alternatives = std::move(kept);

      std::string key;
      for (const auto& alt : demand.alternatives) {
        for (const TileRef& t : alt) {
          key += std::to_string(t.camera_id) + ':' + std::to_string(t.tile_index) + ',';
        }
        key += ';';
      }
      if (seen.insert(key).second) {
        instance.demands.push_back(std::move(demand));
      }
    }
  }
  return instance;
}

Solution solve_greedy(const CoverInstance& instance) {
  DenseInstance dense = densify(instance);
  Bits chosen = greedy_select(dense);
  return to_solution(dense, instance, chosen, SolveStatus::FeasibleGreedy, 0);
}

Solution solve_exact(const CoverInstance& instance, double time_budget_s) {
  DenseInstance dense = densify(instance);
  const int n = dense.num_tiles();

  // mandatory tiles: a demand with a single alternative forces it
  Bits forced(n);
  for (const DenseDemand& d : dense.demands) {
    if (d.alts.size() == 1) forced.or_with(d.alts[0]);
  }
  std::vector<int> open;
  for (size_t i = 0; i < dense.demands.size(); ++i) {
    if (!demand_satisfied(dense.demands[i], forced)) open.push_back(static_cast<int>(i));
  }

  // connected components over the remaining footprints (minus forced tiles):
  // disjoint pools solve independently, and both the objective and the
  // lexicographic tie-break add up across them
  std::vector<Bits> rest;
  rest.reserve(open.size());
  for (int idx : open) {
    Bits f = dense.demands[idx].footprint;
    for (size_t w = 0; w < f.w.size(); ++w) f.w[w] &= ~forced.w[w];
    rest.push_back(std::move(f));
  }
  std::vector<int> parent(open.size());
  for (size_t i = 0; i < open.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (size_t i = 0; i < open.size(); ++i) {
    for (size_t j = i + 1; j < open.size(); ++j) {
      if (rest[i].intersects(rest[j])) {
        int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::map<int, std::vector<int>> components;  // root -> demand indices
  for (size_t i = 0; i < open.size(); ++i) {
    components[find(static_cast<int>(i))].push_back(open[i]);
  }

  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(time_budget_s));
  Bits greedy_full = greedy_select(dense);

  Bits chosen = forced;
  bool timed_out = false;
  int64_t nodes = 0;
  for (const auto& [root, members] : components) {
    (void)root;
    // pool of this component, for carving its share of the greedy solution
    Bits pool(n);
    for (int idx : members) pool.or_with(dense.demands[idx].footprint);

    ExactSearch search(dense, members);
    search.deadline = deadline;
    search.incumbent = forced;
    for (size_t w = 0; w < pool.w.size(); ++w) {
      search.incumbent.w[w] |= greedy_full.w[w] & pool.w[w];
    }
    search.incumbent_size = search.incumbent.count();
    if (!timed_out) {
      std::vector<char> sat(members.size(), 0);
      search.search(forced, sat);
      nodes += search.nodes;
      if (search.timed_out) timed_out = true;
    }
    for (size_t w = 0; w < chosen.w.size(); ++w) {
      chosen.w[w] |= search.incumbent.w[w] & pool.w[w];
    }
  }

  SolveStatus status = timed_out ? SolveStatus::TimeLimited : SolveStatus::Optimal;
  return to_solution(dense, instance, chosen, status, nodes);
}

std::vector<ObjectDemand> verify_cover(const CoverInstance& instance,
                                       const std::map<int, RoiMask>& masks) {
  std::vector<ObjectDemand> violated;
  for (const ObjectDemand& demand : instance.demands) {
    bool ok = false;
    for (const auto& alt : demand.alternatives) {
      bool contained = true;
      for (const TileRef& t : alt) {
        auto it = masks.find(t.camera_id);
        if (it == masks.end() || !it->second.tiles.count(t.tile_index)) {
          contained = false;
          break;
        }
      }
      if (contained) {
        ok = true;
        break;
      }
    }
    if (!ok) violated.push_back(demand);
  }
  return violated;
}

}  // namespace mcroi
