#include "deligne/artin_complex.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace deligne {

namespace {

// --- shared caches ----------------------------------------------------------
//
// Vertex identification and witness searches repeatedly enumerate the same
// parabolic balls and Coxeter subgroups; both are deterministic, so they are
// cached per (ambient group, generator subset, radius).

using BallKey = std::tuple<int, int, GenSet, GenSet, int>;
using GroupKey = std::tuple<int, int, GenSet>;

std::mutex g_cache_mu;
std::map<BallKey, std::shared_ptr<const std::vector<GarsideElem>>> g_ball_cache;
std::map<GroupKey, std::shared_ptr<const std::vector<CoxElem>>> g_group_cache;

BallKey ball_key(const GarsideCtxPtr& c, GenSet sub, int radius) {
  return {int(c->ctype().family), c->ctype().rank, c->gens(), sub, radius};
}

// Ball of the parabolic generated by `sub`, promoted into the ambient
// context.  An empty subset yields just the identity.
const std::vector<GarsideElem>& promoted_ball(const GarsideCtxPtr& c,
                                              GenSet sub, int radius) {
  BallKey key = ball_key(c, sub, radius);
  std::lock_guard<std::mutex> lock(g_cache_mu);
  auto it = g_ball_cache.find(key);
  if (it != g_ball_cache.end()) return *it->second;

  auto out = std::make_shared<std::vector<GarsideElem>>();
  if (sub == 0) {
    out->push_back(GarsideElem::identity(c));
  } else {
    GarsideCtxPtr subctx = GarsideContext::make(c->ctype(), sub);
    for (const GarsideElem& a : enumerate_ball(subctx, radius)) {
      out->push_back(promote(a, c));
    }
  }
  g_ball_cache.emplace(std::move(key), out);
  return *out;
}

const std::vector<CoxElem>& cached_subgroup(CoxeterType t, GenSet sub) {
  GroupKey key{int(t.family), t.rank, sub};
  std::lock_guard<std::mutex> lock(g_cache_mu);
  auto it = g_group_cache.find(key);
  if (it != g_group_cache.end()) return *it->second;
  auto out =
      std::make_shared<std::vector<CoxElem>>(enumerate_subgroup(t, sub));
  g_group_cache.emplace(std::move(key), out);
  return *out;
}

// Inverses of cached_subgroup(t, sub), in matching order.
const std::vector<CoxElem>& cached_subgroup_inverses(CoxeterType t,
                                                     GenSet sub) {
  static std::mutex mu;
  static std::map<GroupKey, std::shared_ptr<const std::vector<CoxElem>>> cache;
  GroupKey key{int(t.family), t.rank, sub};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto out = std::make_shared<std::vector<CoxElem>>();
  for (const CoxElem& u : cached_subgroup(t, sub)) out->push_back(inverse(u));
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(std::move(key), std::move(out));
  return *it->second;
}

void require_same_group(const GarsideCtxPtr& a, const GarsideCtxPtr& b,
                        const char* where) {
  if (!a->same_group(*b)) {
    throw TypeMismatch(std::string(where) + ": ambient groups differ");
  }
}

std::vector<int> genset_to_list(GenSet set) {
  std::vector<int> out;
  for (int s = 1; s <= kMaxRank; ++s) {
    if (gen_in(set, s)) out.push_back(s);
  }
  return out;
}

// Adjacency predicate used by center searches: equal vertices count as
// adjacent (a vertex lies in its own star); distinct same-type vertices
// never span an edge; otherwise search for a chamber witness.
bool adjacent_or_equal(const VertexCoset& a, const VertexCoset& b,
                       int radius) {
  if (a.vtype == b.vtype) return vertex_equal(a, b);
  if (!shadows_intersect(a, b)) return false;
  return adjacent_witness(a, b, radius).has_value();
}

}  // namespace

// --- vertices ---------------------------------------------------------------

GenSet hat_type(const GarsideCtxPtr& c, int s) {
  if (!gen_in(c->gens(), s)) {
    throw UnknownGenerator("hat_type: generator " + std::to_string(s) +
                           " is not in the context");
  }
  return c->gens() & ~gen_bit(s);
}

VertexCoset vertex_of(const GarsideElem& chamber, int s) {
  hat_type(chamber.ctx, s);  // validates
  return VertexCoset{chamber, s};
}

bool vertex_equal(const VertexCoset& v, const VertexCoset& w) {
  require_same_group(v.rep.ctx, w.rep.ctx, "vertex_equal");
  if (v.vtype != w.vtype) return false;
  GarsideElem diff = multiply(inverse(w.rep), v.rep);
  return parabolic_membership(diff, hat_type(v.rep.ctx, v.vtype));
}

std::string vertex_shadow_key(const VertexCoset& v) {
  GenSet hat = hat_type(v.rep.ctx, v.vtype);
  CoxElem head = parabolic_decompose(cox_image(v.rep), hat).first;
  return "t" + std::to_string(v.vtype) + "|" + elem_to_string(head);
}

namespace {

// Well-founded descent order for coset normalization: total word weight in
// {Delta, Delta^-1, simples} first, so only finitely many coset elements sit
// below any given one and greedy descent terminates at a local minimum.
bool desc_order_less(const GarsideElem& a, const GarsideElem& b) {
  long wa = std::abs(long(a.inf)) + long(a.factors.size());
  long wb = std::abs(long(b.inf)) + long(b.factors.size());
  if (wa != wb) return wa < wb;
  return ball_order_less(a, b);
}

}  // namespace

std::string vertex_norm_key(const VertexCoset& v, int norm_radius) {
  GenSet hat = hat_type(v.rep.ctx, v.vtype);
  const std::vector<GarsideElem>& ball =
      promoted_ball(v.rep.ctx, hat, norm_radius);
  // Greedy descent through radius-bounded steps to a locally minimal coset
  // representative.  Any endpoint is sound (the key names a coset element);
  // descent just makes unrelated representatives agree far more often.
  GarsideElem cur = v.rep;
  bool improved = true;
  while (improved) {
    improved = false;
    for (const GarsideElem& a : ball) {
      GarsideElem cand = multiply(cur, a);
      if (desc_order_less(cand, cur)) {
        cur = std::move(cand);
        improved = true;
      }
    }
  }
  return "t" + std::to_string(v.vtype) + "|" + garside_to_string(cur);
}

bool shadows_intersect(const VertexCoset& v, const VertexCoset& w) {
  require_same_group(v.rep.ctx, w.rep.ctx, "shadows_intersect");
  GenSet vhat = hat_type(v.rep.ctx, v.vtype);
  GenSet what = hat_type(w.rep.ctx, w.vtype);
  // The image cosets meet iff pi(w)^-1 pi(v) lies in W_what * W_vhat.
  CoxElem g = compose(inverse(cox_image(w.rep)), cox_image(v.rep));
  CoxeterType t = v.rep.ctx->ctype();
  for (const CoxElem& uinv : cached_subgroup_inverses(t, what)) {
    if (in_parabolic(compose(uinv, g), vhat)) return true;
  }
  return false;
}

std::optional<GarsideElem> adjacent_witness(const VertexCoset& v,
                                            const VertexCoset& w, int radius) {
  require_same_group(v.rep.ctx, w.rep.ctx, "adjacent_witness");
  if (v.vtype == w.vtype) {
    throw SameType("adjacent_witness: both vertices have type " +
                   std::to_string(v.vtype));
  }
  GenSet vhat = hat_type(v.rep.ctx, v.vtype);
  GenSet what = hat_type(w.rep.ctx, w.vtype);
  // A chamber in both cosets is w.rep * a with a in A_what and
  // a^-1 (w.rep^-1 v.rep) in A_vhat.
  GarsideElem g = multiply(inverse(w.rep), v.rep);
  std::optional<GarsideElem> a =
      product_membership_witness(g, what, vhat, radius);
  if (!a) return std::nullopt;
  return multiply(w.rep, *a);
}

// --- hexagons ---------------------------------------------------------------

Hexagon hexagon_from_words(GarsideCtxPtr c, const std::array<int, 6>& types,
                           const std::array<GarsideElem, 6>& words) {
  for (int i = 0; i < 6; ++i) {
    hat_type(c, types[i]);  // validates the generator
    if (types[i] == types[(i + 1) % 6]) {
      throw TypePatternMismatch(
          "hexagon_from_words: consecutive vertex types at positions " +
          std::to_string(i) + "," + std::to_string((i + 1) % 6) + " coincide");
    }
  }
  for (int i = 0; i < 6; ++i) {
    require_same_group(words[i].ctx, c, "hexagon_from_words");
    if (!parabolic_membership(words[i], hat_type(c, types[i]))) {
      throw NotInParabolic("hexagon_from_words: word " + std::to_string(i) +
                               " does not lie in the parabolic omitting " +
                               gen_name(c->ctype(), types[i]),
                           i);
    }
  }

  Hexagon h;
  h.ctx = c;
  h.types = types;
  GarsideElem prefix = GarsideElem::identity(c);
  for (int i = 0; i < 6; ++i) {
    h.vertices[i] = vertex_of(prefix, types[i]);
    h.words[i] = words[i];
    prefix = multiply(prefix, words[i]);
    h.witnesses[i] = prefix;
  }
  if (!prefix.is_identity()) {
    throw NotClosed("hexagon_from_words: the six words do not multiply to "
                    "the identity");
  }
  return h;
}

bool hexagons_equal(const Hexagon& a, const Hexagon& b) {
  for (int i = 0; i < 6; ++i) {
    if (!vertex_equal(a.vertices[i], b.vertices[i])) return false;
  }
  return true;
}

// --- Coxeter shadow ---------------------------------------------------------

std::string shadow_shape_name(ShadowShape s) {
  switch (s) {
    case ShadowShape::SingleEdge: return "single-edge";
    case ShadowShape::TwoEdges: return "two-edges";
    case ShadowShape::Tripod: return "tripod";
    case ShadowShape::ThreeEdgePath: return "three-edge-path";
    case ShadowShape::FourFiveEdges: return "four-five-edges";
    case ShadowShape::SixCycle: return "six-cycle";
    case ShadowShape::Other: return "other";
  }
  return "other";
}

CoxeterShadow coxeter_shadow(const Hexagon& h) {
  CoxeterShadow sh;
  GarsideElem prefix = GarsideElem::identity(h.ctx);
  for (int i = 0; i < 6; ++i) {
    GenSet hat = hat_type(h.ctx, h.types[i]);
    sh.corner_reps[i] = parabolic_decompose(cox_image(prefix), hat).first;
    sh.corner_types[i] = h.types[i];
    prefix = multiply(prefix, h.words[i]);
  }

  // Identify corners (distinct types always give distinct cosets).
  std::array<int, 6> corner_id{};
  std::vector<std::pair<int, std::uint64_t>> seen;
  for (int i = 0; i < 6; ++i) {
    std::pair<int, std::uint64_t> tag{sh.corner_types[i],
                                      sh.corner_reps[i].key()};
    auto it = std::find(seen.begin(), seen.end(), tag);
    if (it == seen.end()) {
      corner_id[i] = int(seen.size());
      seen.push_back(tag);
    } else {
      corner_id[i] = int(it - seen.begin());
    }
  }
  sh.distinct_vertices = int(seen.size());

  std::set<std::pair<int, int>> edges;
  for (int i = 0; i < 6; ++i) {
    int a = corner_id[i], b = corner_id[(i + 1) % 6];
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  sh.distinct_edges = int(edges.size());

  std::vector<int> degree(seen.size(), 0);
  for (const auto& [a, b] : edges) {
    ++degree[size_t(a)];
    ++degree[size_t(b)];
  }
  int max_degree = *std::max_element(degree.begin(), degree.end());

  int e = sh.distinct_edges;
  int vcount = sh.distinct_vertices;
  if (e == 1) {
    sh.shape = ShadowShape::SingleEdge;
  } else if (e == 2) {
    sh.shape = ShadowShape::TwoEdges;
  } else if (e == 3) {
    if (max_degree == 3) {
      sh.shape = ShadowShape::Tripod;
    } else if (vcount == 4) {
      sh.shape = ShadowShape::ThreeEdgePath;
    } else {
      sh.shape = ShadowShape::Other;  // a 3-cycle image
    }
  } else if (e == 4 || e == 5) {
    sh.shape = ShadowShape::FourFiveEdges;
  } else if (e == 6 && vcount == 6) {
    sh.shape = ShadowShape::SixCycle;
  } else {
    sh.shape = ShadowShape::Other;
  }
  return sh;
}

// --- center searches --------------------------------------------------------

std::optional<VertexCoset> search_center(const std::vector<VertexCoset>& cycle,
                                         int ctype, int radius) {
  if (cycle.empty()) throw ConfigError("search_center: empty cycle");
  const GarsideCtxPtr& ctx = cycle[0].rep.ctx;
  for (const VertexCoset& x : cycle) {
    require_same_group(x.rep.ctx, ctx, "search_center");
  }
  hat_type(ctx, ctype);  // validates

  const VertexCoset& base = cycle[0];
  const std::vector<GarsideElem>& ball =
      promoted_ball(ctx, hat_type(ctx, base.vtype), radius);

  std::unordered_set<std::string> tried;
  for (const GarsideElem& a : ball) {
    VertexCoset z = vertex_of(multiply(base.rep, a), ctype);
    bool ok = true;
    // Cheap exact prescreen first: shadows of adjacent cosets must meet.
    for (const VertexCoset& x : cycle) {
      if (z.vtype != x.vtype && !shadows_intersect(z, x)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    // Coset-level deduplication only for candidates surviving the prescreen.
    if (!tried.insert(vertex_norm_key(z, 1)).second) continue;
    for (const VertexCoset& x : cycle) {
      if (!adjacent_or_equal(z, x, radius)) {
        ok = false;
        break;
      }
    }
    if (ok) return z;
  }
  return std::nullopt;
}

std::optional<std::pair<VertexCoset, int>> search_quasi_center(
    const Hexagon& h, int radius) {
  for (int parity = 0; parity < 2; ++parity) {
    std::vector<VertexCoset> targets{h.vertices[size_t(parity)],
                                     h.vertices[size_t(parity + 2)],
                                     h.vertices[size_t(parity + 4)]};
    for (int s : genset_to_list(h.ctx->gens())) {
      std::optional<VertexCoset> z = search_center(targets, s, radius);
      if (z) return std::make_pair(*z, parity);
    }
  }
  return std::nullopt;
}

// --- type order and zigzags -------------------------------------------------

bool type_order_comparable(int i, int j) {
  if (i == j) return true;
  return !((i == 1 && j == 2) || (i == 2 && j == 1));
}

bool type_order_less(int i, int j) {
  return type_order_comparable(i, j) && i < j && !(i == 1 && j == 2);
}

ZigzagReport classify_zigzag(const Hexagon& h) {
  if (h.ctx->ctype().family != Family::D) {
    throw HypothesisViolation("classify_zigzag: requires a type-D group");
  }
  ZigzagReport r;
  r.admissible = true;
  for (int i = 0; i < 6; ++i) {
    if (!type_order_comparable(h.types[i], h.types[(i + 1) % 6])) {
      r.admissible = false;
    }
  }
  if (!r.admissible) return r;
  for (int i = 0; i < 6; ++i) {
    int prev = h.types[(i + 5) % 6];
    int next = h.types[(i + 1) % 6];
    int cur = h.types[i];
    if (type_order_less(prev, cur) && type_order_less(next, cur)) {
      r.local_max.push_back(i);
    } else if (type_order_less(cur, prev) && type_order_less(cur, next)) {
      r.local_min.push_back(i);
    }
  }
  r.zigzag = (r.local_max.size() + r.local_min.size() == 6);
  return r;
}

// --- chamber balls ----------------------------------------------------------

bool ChamberBall::adjacent(int i, int j) const {
  const std::vector<int>& row = nbrs[size_t(i)];
  return std::binary_search(row.begin(), row.end(), j);
}

namespace {

void rebuild_edges(ChamberBall& ball) {
  std::vector<std::set<int>> nbr_sets(ball.verts.size());
  for (const std::vector<int>& clique : ball.chamber_vertex) {
    for (std::size_t a = 0; a < clique.size(); ++a) {
      if (clique[a] < 0) continue;
      for (std::size_t b = a + 1; b < clique.size(); ++b) {
        if (clique[b] < 0) continue;
        nbr_sets[size_t(clique[a])].insert(clique[b]);
        nbr_sets[size_t(clique[b])].insert(clique[a]);
      }
    }
  }
  ball.nbrs.assign(ball.verts.size(), {});
  for (std::size_t i = 0; i < nbr_sets.size(); ++i) {
    ball.nbrs[i].assign(nbr_sets[i].begin(), nbr_sets[i].end());
  }
}

}  // namespace

ChamberBall build_ball_complex(GarsideCtxPtr c, int radius, int norm_radius) {
  ChamberBall ball;
  ball.ctx = c;
  ball.norm_radius = norm_radius;
  ball.chambers = enumerate_ball(c, radius);
  ball.type_list = genset_to_list(c->gens());

  // Identify vertex cosets: normalization keys give sound positive hits
  // (equal keys name a common coset element); misses fall back to the exact
  // membership test against classes sharing the Coxeter shadow.
  std::unordered_map<std::string, int> by_norm_key;
  std::unordered_map<std::string, std::vector<int>> by_shadow;

  // Normalization keys are independent per (chamber, type) pair, so they are
  // computed in a parallel phase up front; the merge below then consumes them
  // sequentially, which keeps vertex ids and all downstream output identical
  // to a single-threaded run.
  const std::size_t n_cells = ball.chambers.size() * ball.type_list.size();
  std::vector<std::string> cell_keys(n_cells);
  if (!ball.chambers.empty()) {
    for (int s : ball.type_list) {
      // Warm the per-type parabolic ball caches before fanning out.
      vertex_norm_key(vertex_of(ball.chambers[0], s), norm_radius);
    }
    auto key_range = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t ci = lo; ci < hi; ++ci) {
        for (std::size_t k = 0; k < ball.type_list.size(); ++k) {
          VertexCoset v = vertex_of(ball.chambers[ci], ball.type_list[k]);
          cell_keys[ci * ball.type_list.size() + k] =
              vertex_norm_key(v, norm_radius);
        }
      }
    };
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t n_threads =
        std::min<std::size_t>(hw == 0 ? 1 : hw, std::size_t(8));
    if (n_threads <= 1 || ball.chambers.size() < 1024) {
      key_range(0, ball.chambers.size());
    } else {
      std::vector<std::thread> pool;
      std::size_t chunk = (ball.chambers.size() + n_threads - 1) / n_threads;
      for (std::size_t t = 0; t < n_threads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(lo + chunk, ball.chambers.size());
        if (lo >= hi) break;
        pool.emplace_back(key_range, lo, hi);
      }
      for (std::thread& th : pool) th.join();
    }
  }

  ball.chamber_vertex.reserve(ball.chambers.size());
  for (std::size_t ci = 0; ci < ball.chambers.size(); ++ci) {
    const GarsideElem& chamber = ball.chambers[ci];
    std::vector<int> row;
    row.reserve(ball.type_list.size());
    for (std::size_t k = 0; k < ball.type_list.size(); ++k) {
      int s = ball.type_list[k];
      VertexCoset v = vertex_of(chamber, s);
      std::string& nk = cell_keys[ci * ball.type_list.size() + k];
      auto hit = by_norm_key.find(nk);
      int id;
      if (hit != by_norm_key.end()) {
        id = hit->second;
      } else {
        std::string sk = vertex_shadow_key(v);
        id = -1;
        for (int cand : by_shadow[sk]) {
          if (vertex_equal(ball.verts[size_t(cand)], v)) {
            id = cand;
            break;
          }
        }
        if (id < 0) {
          id = int(ball.verts.size());
          ball.verts.push_back(v);
          by_shadow[sk].push_back(id);
        }
        by_norm_key.emplace(std::move(nk), id);
      }
      row.push_back(id);
    }
    ball.chamber_vertex.push_back(std::move(row));
  }
  rebuild_edges(ball);
  return ball;
}

ChamberBall relative_complex(const ChamberBall& ball, GenSet sprime) {
  if ((sprime & ~ball.ctx->gens()) != 0) {
    throw UnknownGenerator(
        "relative_complex: types outside the ambient context");
  }
  ChamberBall out;
  out.ctx = ball.ctx;
  out.norm_radius = ball.norm_radius;
  out.chambers = ball.chambers;
  out.type_list = genset_to_list(sprime);

  std::vector<int> vert_map(ball.verts.size(), -1);
  for (std::size_t i = 0; i < ball.verts.size(); ++i) {
    if (gen_in(sprime, ball.verts[i].vtype)) {
      vert_map[i] = int(out.verts.size());
      out.verts.push_back(ball.verts[i]);
    }
  }

  std::vector<std::size_t> keep_cols;
  for (std::size_t k = 0; k < ball.type_list.size(); ++k) {
    if (gen_in(sprime, ball.type_list[k])) keep_cols.push_back(k);
  }
  out.chamber_vertex.reserve(ball.chamber_vertex.size());
  for (const std::vector<int>& row : ball.chamber_vertex) {
    std::vector<int> filtered;
    filtered.reserve(keep_cols.size());
    for (std::size_t k : keep_cols) {
      filtered.push_back(row[k] < 0 ? -1 : vert_map[size_t(row[k])]);
    }
    out.chamber_vertex.push_back(std::move(filtered));
  }
  rebuild_edges(out);
  return out;
}

GenSet diagram_subtree(CoxeterType t, GenSet gens) {
  validate_genset(t, gens);
  std::vector<int> nodes = genset_to_list(gens);
  if (nodes.size() <= 1) return gens;

  auto diagram_adjacent = [&](int a, int b) {
    return coxeter_m(t, a, b) == 3;
  };
  // BFS path between two diagram nodes (the diagram is a tree).
  auto path_between = [&](int a, int b) -> GenSet {
    std::vector<int> parent(size_t(t.rank) + 1, 0);
    std::vector<int> queue{a};
    parent[size_t(a)] = a;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      int x = queue[head];
      if (x == b) break;
      for (int y = 1; y <= t.rank; ++y) {
        if (parent[size_t(y)] == 0 && diagram_adjacent(x, y)) {
          parent[size_t(y)] = x;
          queue.push_back(y);
        }
      }
    }
    GenSet path = 0;
    for (int x = b; ; x = parent[size_t(x)]) {
      path |= gen_bit(x);
      if (x == parent[size_t(x)]) break;
    }
    return path;
  };

  GenSet tree = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      tree |= path_between(nodes[i], nodes[j]);
    }
  }
  return tree;
}

// --- four-wheel check -------------------------------------------------------

namespace {

std::string cycle_label(const ChamberBall& ball, int a, int b, int c, int d) {
  auto one = [&](int id) {
    return vertex_norm_key(ball.verts[size_t(id)], ball.norm_radius);
  };
  return "(" + one(a) + " " + one(b) + " " + one(c) + " " + one(d) + ")";
}

}  // namespace

FourWheelReport four_wheel_check(const ChamberBall& ball, int search_radius) {
  const int V = int(ball.verts.size());

  // Diagonal classification is shared across all cycles touching the pair,
  // so results are memoized: value 1 = a beyond-ball adjacency witness was
  // found (the pair is closed, cycles through it are not induced), 0 = open
  // within the search radius.
  std::mutex diag_mu;
  std::unordered_map<long long, char> diag_memo;

  // A diagonal pair is definitively non-adjacent when the two types agree;
  // otherwise non-adjacency within the ball is refined by a bounded witness
  // search (a found witness disqualifies the cycle as non-induced).  The
  // search is staged by radius: witnesses found at a smaller radius are also
  // witnesses at the full one, so early exits never change the outcome.
  auto diagonal_witnessed = [&](int i, int j) {
    const VertexCoset& a = ball.verts[size_t(i)];
    const VertexCoset& b = ball.verts[size_t(j)];
    if (a.vtype == b.vtype) return false;
    long long key = (long long)std::min(i, j) * V + std::max(i, j);
    {
      std::lock_guard<std::mutex> lock(diag_mu);
      auto it = diag_memo.find(key);
      if (it != diag_memo.end()) return it->second != 0;
    }
    bool witnessed = false;
    if (shadows_intersect(a, b)) {
      witnessed = (search_radius > 1 && adjacent_witness(a, b, 1).has_value()) ||
                  adjacent_witness(a, b, search_radius).has_value();
    }
    {
      std::lock_guard<std::mutex> lock(diag_mu);
      diag_memo.emplace(key, witnessed ? 1 : 0);
    }
    return witnessed;
  };

  auto run_vertex = [&](int i, FourWheelReport& report) {
    for (int j = i + 1; j < V; ++j) {
      if (ball.adjacent(i, j)) continue;
      // Common neighbours of the diagonal {i, j}.
      std::vector<int> common;
      std::set_intersection(ball.nbrs[size_t(i)].begin(),
                            ball.nbrs[size_t(i)].end(),
                            ball.nbrs[size_t(j)].begin(),
                            ball.nbrs[size_t(j)].end(),
                            std::back_inserter(common));
      if (common.size() < 2) continue;

      if (diagonal_witnessed(i, j)) {
        ++report.skipped_not_induced;
        continue;
      }

      for (std::size_t a = 0; a < common.size(); ++a) {
        int k = common[a];
        if (k <= i) continue;  // count each cycle once: i is minimal
        for (std::size_t b = a + 1; b < common.size(); ++b) {
          int l = common[b];
          if (ball.adjacent(k, l)) continue;
          if (diagonal_witnessed(k, l)) {
            ++report.skipped_not_induced;
            continue;
          }

          ++report.cycles_checked;
          GenSet span = gen_bit(ball.verts[size_t(i)].vtype) |
                        gen_bit(ball.verts[size_t(k)].vtype) |
                        gen_bit(ball.verts[size_t(j)].vtype) |
                        gen_bit(ball.verts[size_t(l)].vtype);
          GenSet subtree = diagram_subtree(ball.ctx->ctype(), span);
          // Fast path: an in-ball common neighbour of all four vertices is a
          // chamber-witnessed center.
          bool found = false;
          std::vector<int> star, star2;
          std::set_intersection(common.begin(), common.end(),
                                ball.nbrs[size_t(k)].begin(),
                                ball.nbrs[size_t(k)].end(),
                                std::back_inserter(star));
          std::set_intersection(star.begin(), star.end(),
                                ball.nbrs[size_t(l)].begin(),
                                ball.nbrs[size_t(l)].end(),
                                std::back_inserter(star2));
          for (int m : star2) {
            if (gen_in(subtree, ball.verts[size_t(m)].vtype)) {
              found = true;
              break;
            }
          }
          if (!found) {
            std::vector<VertexCoset> cycle{
                ball.verts[size_t(i)], ball.verts[size_t(k)],
                ball.verts[size_t(j)], ball.verts[size_t(l)]};
            // Staged search radius: a center found in a smaller ball remains
            // valid, so widening only converts unresolved into found.
            std::vector<int> stages{1};
            if (search_radius > 1) stages.push_back(search_radius);
            for (int r : stages) {
              for (int s : genset_to_list(subtree)) {
                if (search_center(cycle, s, r)) {
                  found = true;
                  break;
                }
              }
              if (found) break;
            }
          }
          if (found) {
            ++report.centers_found;
          } else {
            report.unresolved.push_back(cycle_label(ball, i, k, j, l));
          }
        }
      }
    }
  };

  // Vertices fan out across worker threads; per-thread tallies are summed and
  // the unresolved list is sorted, so aggregation is order-independent.
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t n_threads = std::min<std::size_t>(hw == 0 ? 1 : hw, 8);
  FourWheelReport report;
  if (n_threads <= 1 || V < 256) {
    for (int i = 0; i < V; ++i) run_vertex(i, report);
  } else {
    std::vector<FourWheelReport> partial(n_threads);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t]() {
        for (int i = next.fetch_add(1); i < V; i = next.fetch_add(1)) {
          run_vertex(i, partial[t]);
        }
      });
    }
    for (std::thread& th : pool) th.join();
    for (const FourWheelReport& p : partial) {
      report.cycles_checked += p.cycles_checked;
      report.centers_found += p.centers_found;
      report.skipped_not_induced += p.skipped_not_induced;
      report.unresolved.insert(report.unresolved.end(), p.unresolved.begin(),
                               p.unresolved.end());
    }
  }
  std::sort(report.unresolved.begin(), report.unresolved.end());
  return report;
}

// --- link check -------------------------------------------------------------

namespace {

// Connected components of the Coxeter diagram restricted to `nodes`;
// returns a component id per generator (or -1).
std::vector<int> diagram_components(CoxeterType t, GenSet nodes) {
  std::vector<int> comp(size_t(t.rank) + 1, -1);
  int next = 0;
  for (int s = 1; s <= t.rank; ++s) {
    if (!gen_in(nodes, s) || comp[size_t(s)] >= 0) continue;
    comp[size_t(s)] = next;
    std::vector<int> queue{s};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (int y = 1; y <= t.rank; ++y) {
        if (gen_in(nodes, y) && comp[size_t(y)] < 0 &&
            coxeter_m(t, queue[head], y) == 3) {
          comp[size_t(y)] = next;
          queue.push_back(y);
        }
      }
    }
    ++next;
  }
  return comp;
}

}  // namespace

LinkReport link_check(const ChamberBall& ball, const VertexCoset& v,
                      int radius, std::size_t pair_cap) {
  require_same_group(ball.ctx, v.rep.ctx, "link_check");
  LinkReport report;

  int vid = -1;
  for (std::size_t i = 0; i < ball.verts.size(); ++i) {
    if (vertex_equal(ball.verts[i], v)) {
      vid = int(i);
      break;
    }
  }
  if (vid < 0) return report;  // vertex outside the ball: empty link

  GenSet rest = hat_type(ball.ctx, v.vtype);
  std::vector<int> comp = diagram_components(ball.ctx->ctype(), rest);
  const std::vector<int>& link = ball.nbrs[size_t(vid)];
  const std::vector<GarsideElem>& chambers =
      promoted_ball(ball.ctx, rest, radius);

  for (std::size_t a = 0; a < link.size() && report.pairs_checked < pair_cap;
       ++a) {
    const VertexCoset& p = ball.verts[size_t(link[a])];
    for (std::size_t b = a + 1;
         b < link.size() && report.pairs_checked < pair_cap; ++b) {
      const VertexCoset& q = ball.verts[size_t(link[b])];
      if (comp[size_t(p.vtype)] == comp[size_t(q.vtype)]) continue;
      ++report.pairs_checked;
      // The join decomposition demands a 2-simplex {v, p, q}: some chamber
      // of v's coset must lie in all three cosets.
      bool found = false;
      for (const GarsideElem& aelem : chambers) {
        GarsideElem f = multiply(v.rep, aelem);
        if (vertex_equal(vertex_of(f, p.vtype), p) &&
            vertex_equal(vertex_of(f, q.vtype), q)) {
          found = true;
          break;
        }
      }
      if (found) {
        ++report.triangles_found;
      } else {
        report.unresolved.push_back(
            vertex_norm_key(p, ball.norm_radius) + " / " +
            vertex_norm_key(q, ball.norm_radius));
      }
    }
  }
  std::sort(report.unresolved.begin(), report.unresolved.end());
  return report;
}

// --- downward flag check ----------------------------------------------------

namespace {

// Vertex of the subdivision: an original coset or the midpoint of an edge
// between the two fork types.
struct SubVertex {
  int orig = -1;                 // original vertex id, or
  int mid_u = -1, mid_v = -1;    // the two endpoint ids (types 1 and 2)
  int witness_chamber = -1;      // a chamber containing the subdivided edge
  bool is_mid() const { return orig < 0; }
};

int sub_level(const ChamberBall& ball, const SubVertex& y) {
  if (y.is_mid()) return 2;
  int t = ball.verts[size_t(y.orig)].vtype;
  return t <= 2 ? 1 : t;
}

}  // namespace

FlagReport subdivide_and_check_downward_flag(const ChamberBall& ball,
                                             int radius,
                                             std::size_t max_triples,
                                             std::uint64_t seed) {
  if (ball.ctx->ctype().family != Family::D) {
    throw HypothesisViolation(
        "subdivide_and_check_downward_flag: requires a type-D group");
  }
  FlagReport report;

  // Subdivided vertex list: originals, then midpoints of (1,2)-edges.
  std::vector<SubVertex> subs;
  subs.reserve(ball.verts.size());
  for (std::size_t i = 0; i < ball.verts.size(); ++i) {
    SubVertex sv;
    sv.orig = int(i);
    subs.push_back(sv);
  }
  // Midpoints, with a witness chamber per subdivided edge; midpoint
  // adjacency lists hold the originals sharing a chamber with the edge.
  std::map<std::pair<int, int>, int> midpoint_of_edge;
  std::vector<std::set<int>> mid_nbrs_sets;
  int col1 = -1, col2 = -1;
  for (std::size_t k = 0; k < ball.type_list.size(); ++k) {
    if (ball.type_list[k] == 1) col1 = int(k);
    if (ball.type_list[k] == 2) col2 = int(k);
  }
  if (col1 >= 0 && col2 >= 0) {
    for (std::size_t ci = 0; ci < ball.chamber_vertex.size(); ++ci) {
      const std::vector<int>& row = ball.chamber_vertex[ci];
      int u = row[size_t(col1)], w = row[size_t(col2)];
      if (u < 0 || w < 0) continue;
      std::pair<int, int> edge{u, w};
      auto it = midpoint_of_edge.find(edge);
      int mid;
      if (it == midpoint_of_edge.end()) {
        mid = int(subs.size());
        midpoint_of_edge.emplace(edge, mid);
        SubVertex sv;
        sv.mid_u = u;
        sv.mid_v = w;
        sv.witness_chamber = int(ci);
        subs.push_back(sv);
        mid_nbrs_sets.emplace_back();
      } else {
        mid = it->second;
      }
      // Every vertex of a chamber containing the edge spans a simplex
      // with it, hence is adjacent to the midpoint.
      for (int z : row) {
        if (z >= 0 && z != u && z != w) {
          mid_nbrs_sets[size_t(mid) - ball.verts.size()].insert(z);
        }
      }
    }
  }
  report.subdivided_vertices = subs.size();
  report.midpoints = subs.size() - ball.verts.size();

  const std::size_t n_orig = ball.verts.size();
  auto fork_pair = [&](int i, int j) {
    int a = ball.verts[size_t(i)].vtype, b = ball.verts[size_t(j)].vtype;
    return (a == 1 && b == 2) || (a == 2 && b == 1);
  };
  // In-ball adjacency of the subdivision: original edges minus subdivided
  // ones, plus midpoint-original incidences.
  auto sub_adjacent = [&](std::size_t a, std::size_t b) {
    if (a == b) return false;
    const SubVertex& x = subs[a];
    const SubVertex& y = subs[b];
    if (x.is_mid() && y.is_mid()) return false;
    if (!x.is_mid() && !y.is_mid()) {
      return ball.adjacent(x.orig, y.orig) && !fork_pair(x.orig, y.orig);
    }
    const SubVertex& mid = x.is_mid() ? x : y;
    const SubVertex& orig = x.is_mid() ? y : x;
    const std::set<int>& nb = mid_nbrs_sets[(x.is_mid() ? a : b) - n_orig];
    return orig.orig == mid.mid_u || orig.orig == mid.mid_v ||
           nb.count(orig.orig) > 0;
  };
  auto sub_below = [&](std::size_t a, std::size_t b) {  // a <= b
    if (a == b) return true;
    return sub_level(ball, subs[a]) < sub_level(ball, subs[b]) &&
           sub_adjacent(a, b);
  };

  // In-ball down-sets.
  std::vector<std::vector<std::size_t>> down(subs.size());
  for (std::size_t y = 0; y < subs.size(); ++y) {
    for (std::size_t z = 0; z < subs.size(); ++z) {
      if (sub_below(z, y)) down[y].push_back(z);
    }
  }

  // Witnessed adjacency between a candidate (original coset or fork-edge
  // midpoint, given by its chamber) and an in-ball subdivision vertex,
  // searched within the given radius.
  GenSet fork_hat = ball.ctx->gens() & ~(gen_bit(1) | gen_bit(2));
  auto witness_below = [&](bool cand_is_mid, const VertexCoset& cand,
                           const GarsideElem& cand_chamber, std::size_t yi,
                           int r) {
    const SubVertex& y = subs[yi];
    int cand_level = cand_is_mid ? 2 : (cand.vtype <= 2 ? 1 : cand.vtype);
    if (!cand_is_mid && !y.is_mid()) {
      const VertexCoset& vy = ball.verts[size_t(y.orig)];
      if (cand.vtype == vy.vtype) return vertex_equal(cand, vy);
      if (cand_level >= sub_level(ball, y)) return false;
      bool fork = (cand.vtype == 1 && vy.vtype == 2) ||
                  (cand.vtype == 2 && vy.vtype == 1);
      if (fork) return false;  // subdivided away
      return adjacent_or_equal(cand, vy, r);
    }
    if (cand_is_mid && y.is_mid()) {
      return vertex_equal(vertex_of(cand_chamber, 1),
                          ball.verts[size_t(y.mid_u)]) &&
             vertex_equal(vertex_of(cand_chamber, 2),
                          ball.verts[size_t(y.mid_v)]);
    }
    if (cand_is_mid) {
      // Midpoint below an original: need a chamber with the candidate's
      // fork edge whose y-type vertex matches y.
      const VertexCoset& vy = ball.verts[size_t(y.orig)];
      if (2 >= sub_level(ball, y)) return false;
      for (const GarsideElem& a : promoted_ball(ball.ctx, fork_hat, r)) {
        GarsideElem f = multiply(cand_chamber, a);
        if (vertex_equal(vertex_of(f, vy.vtype), vy)) return true;
      }
      return false;
    }
    // Original candidate below a midpoint: must share a chamber with the
    // midpoint's fork edge.
    if (cand_level >= 2) return false;
    const GarsideElem& wit = ball.chambers[size_t(y.witness_chamber)];
    for (const GarsideElem& a : promoted_ball(ball.ctx, fork_hat, r)) {
      GarsideElem f = multiply(wit, a);
      if (vertex_equal(vertex_of(f, cand.vtype), cand)) return true;
    }
    return false;
  };

  // Beyond-ball search state, reused across every triple sharing its first
  // member: candidate lower bounds are the vertices and fork midpoints of
  // chambers near that member's coset, enumerated lazily in a fixed order
  // and deduplicated once; per-candidate witness results are memoized.
  const bool has_fork = (col1 >= 0 && col2 >= 0);
  struct BoundCand {
    bool is_mid = false;
    VertexCoset v;
    GarsideElem chamber;
  };
  struct AnchorSearch {
    std::size_t anchor = SIZE_MAX;
    int radius = 0;
    std::vector<GarsideElem> anchors;
    std::size_t next_anchor = 0;
    std::unordered_set<std::string> tried;
    std::vector<BoundCand> cands;
    std::unordered_map<std::uint64_t, char> memo;
  };
  auto reset_search = [&](AnchorSearch& st, std::size_t a, int r) {
    st.anchor = a;
    st.radius = r;
    st.anchors.clear();
    st.next_anchor = 0;
    st.tried.clear();
    st.cands.clear();
    st.memo.clear();
    const SubVertex& y = subs[a];
    if (!y.is_mid()) {
      const VertexCoset& vy = ball.verts[size_t(y.orig)];
      for (const GarsideElem& g :
           promoted_ball(ball.ctx, hat_type(ball.ctx, vy.vtype), r)) {
        st.anchors.push_back(multiply(vy.rep, g));
      }
    } else {
      const GarsideElem& wit = ball.chambers[size_t(y.witness_chamber)];
      for (const GarsideElem& g : promoted_ball(ball.ctx, fork_hat, r)) {
        st.anchors.push_back(multiply(wit, g));
      }
    }
  };
  // Extends the deduplicated candidate list until it has more than `want`
  // entries or the anchor supply is exhausted.
  auto ensure_candidates = [&](AnchorSearch& st, std::size_t want) {
    while (st.cands.size() <= want && st.next_anchor < st.anchors.size()) {
      const GarsideElem& f = st.anchors[st.next_anchor++];
      for (int s : ball.type_list) {
        BoundCand c;
        c.v = vertex_of(f, s);
        if (!st.tried.insert(vertex_norm_key(c.v, 1)).second) continue;
        c.chamber = f;
        st.cands.push_back(std::move(c));
      }
      if (has_fork) {
        VertexCoset mid_anchor = vertex_of(f, 1);
        std::string mid_key = "m|" + vertex_norm_key(mid_anchor, 1) + "|" +
                              vertex_norm_key(vertex_of(f, 2), 1);
        if (st.tried.insert(mid_key).second) {
          BoundCand c;
          c.is_mid = true;
          c.v = std::move(mid_anchor);
          c.chamber = f;
          st.cands.push_back(std::move(c));
        }
      }
    }
    return st.cands.size() > want;
  };
  auto witness_memo = [&](AnchorSearch& st, std::size_t ci, std::size_t yi) {
    std::uint64_t key = std::uint64_t(ci) * subs.size() + yi;
    auto it = st.memo.find(key);
    if (it != st.memo.end()) return it->second != 0;
    const BoundCand& c = st.cands[ci];
    bool ok = witness_below(c.is_mid, c.v, c.chamber, yi, st.radius);
    st.memo.emplace(key, ok ? 1 : 0);
    return ok;
  };
  // Staged per-thread search state: stage 0 scans radius-1 anchors (any
  // bound it finds is valid at the full radius), stage 1 scans the full
  // radius, so staging never changes which triples end up resolved.
  struct SearchPair {
    AnchorSearch narrow, full;
  };
  const int narrow_radius = std::min(radius, 1);
  auto beyond_ball_bound = [&](SearchPair& sp,
                               const std::array<std::size_t, 3>& tri) {
    AnchorSearch* stages[2] = {&sp.narrow, &sp.full};
    int stage_radius[2] = {narrow_radius, radius};
    int n_stages = (radius > narrow_radius) ? 2 : 1;
    if (n_stages == 1) stages[0] = &sp.full, stage_radius[0] = radius;
    for (int si = 0; si < n_stages; ++si) {
      AnchorSearch& st = *stages[si];
      if (st.anchor != tri[0] || st.radius != stage_radius[si]) {
        reset_search(st, tri[0], stage_radius[si]);
      }
      for (std::size_t ci = 0; ensure_candidates(st, ci); ++ci) {
        if (witness_memo(st, ci, tri[0]) && witness_memo(st, ci, tri[1]) &&
            witness_memo(st, ci, tri[2])) {
          return true;
        }
      }
    }
    return false;
  };

  // Handles one candidate triple: counts qualification (pairwise lower
  // bounds in-ball), then looks for a common lower bound in-ball and, failing
  // that, by the bounded search beyond the ball.
  auto pair_has_bound = [&](std::size_t a, std::size_t b) {
    std::vector<std::size_t> inter;
    std::set_intersection(down[a].begin(), down[a].end(), down[b].begin(),
                          down[b].end(), std::back_inserter(inter));
    return !inter.empty();
  };
  auto process_triple = [&](const std::array<std::size_t, 3>& tri,
                            bool prequalified, SearchPair& sp,
                            FlagReport& rep) {
    ++rep.triples_examined;
    if (!prequalified &&
        (!pair_has_bound(tri[0], tri[1]) || !pair_has_bound(tri[0], tri[2]) ||
         !pair_has_bound(tri[1], tri[2]))) {
      return;
    }
    ++rep.qualifying_triples;

    std::vector<std::size_t> inter01, inter;
    std::set_intersection(down[tri[0]].begin(), down[tri[0]].end(),
                          down[tri[1]].begin(), down[tri[1]].end(),
                          std::back_inserter(inter01));
    std::set_intersection(inter01.begin(), inter01.end(),
                          down[tri[2]].begin(), down[tri[2]].end(),
                          std::back_inserter(inter));
    if (!inter.empty()) {
      ++rep.bounds_found;
      return;
    }
    if (beyond_ball_bound(sp, tri)) {
      ++rep.bounds_found;
    } else {
      rep.unresolved.push_back("triple(" + std::to_string(tri[0]) + "," +
                               std::to_string(tri[1]) + "," +
                               std::to_string(tri[2]) + ")");
    }
  };

  if (max_triples == 0) {
    // Exhaustive mode: every qualifying triple is a triangle of the
    // "pair admits a lower bound" graph, whose edges are exactly the pairs
    // lying in a common up-set.
    std::vector<std::vector<std::size_t>> up(subs.size());
    for (std::size_t y = 0; y < subs.size(); ++y) {
      for (std::size_t z : down[y]) up[z].push_back(y);
    }
    std::vector<std::vector<std::size_t>> qual(subs.size());
    for (std::size_t z = 0; z < subs.size(); ++z) {
      for (std::size_t i = 0; i < up[z].size(); ++i) {
        for (std::size_t j = i + 1; j < up[z].size(); ++j) {
          std::size_t a = up[z][i], b = up[z][j];
          if (a > b) std::swap(a, b);
          qual[a].push_back(b);
        }
      }
    }
    for (std::vector<std::size_t>& row : qual) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }

    // Triangles {a < b < c} of the qualification graph, streamed per first
    // member: c runs over the intersection of the rows of a and b.  Work
    // fans out across worker threads keyed by `a`, so each beyond-ball
    // search state stays thread-local; tallies are summed and the
    // unresolved list sorted, making aggregation order-independent.
    auto run_first_member = [&](std::size_t a, SearchPair& sp,
                                FlagReport& rep) {
      const std::vector<std::size_t>& ra = qual[a];
      std::vector<std::size_t> inter01;
      for (std::size_t bi = 0; bi < ra.size(); ++bi) {
        std::size_t b = ra[bi];
        const std::vector<std::size_t>& rb = qual[b];
        // Pairwise bound witnesses for (a, b), hoisted over all c.
        inter01.clear();
        std::set_intersection(down[a].begin(), down[a].end(), down[b].begin(),
                              down[b].end(), std::back_inserter(inter01));
        std::size_t ia = bi + 1, ib = 0;
        while (ia < ra.size() && ib < rb.size()) {
          if (ra[ia] < rb[ib]) {
            ++ia;
          } else if (rb[ib] < ra[ia]) {
            ++ib;
          } else {
            std::size_t c = ra[ia];
            ++ia;
            ++ib;
            ++rep.triples_examined;
            ++rep.qualifying_triples;
            bool in_ball = false;
            for (std::size_t z : inter01) {
              if (std::binary_search(down[c].begin(), down[c].end(), z)) {
                in_ball = true;
                break;
              }
            }
            if (in_ball) {
              ++rep.bounds_found;
              continue;
            }
            std::array<std::size_t, 3> tri{a, b, c};
            if (beyond_ball_bound(sp, tri)) {
              ++rep.bounds_found;
            } else {
              rep.unresolved.push_back(
                  "triple(" + std::to_string(a) + "," + std::to_string(b) +
                  "," + std::to_string(c) + ")");
            }
          }
        }
      }
    };

    unsigned hw = std::thread::hardware_concurrency();
    std::size_t n_threads = std::min<std::size_t>(hw == 0 ? 1 : hw, 8);
    if (n_threads <= 1 || subs.size() < 512) {
      SearchPair sp;
      for (std::size_t a = 0; a < subs.size(); ++a) {
        run_first_member(a, sp, report);
      }
    } else {
      std::vector<FlagReport> partial(n_threads);
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t]() {
          SearchPair sp;
          for (std::size_t a = next.fetch_add(1); a < subs.size();
               a = next.fetch_add(1)) {
            run_first_member(a, sp, partial[t]);
          }
        });
      }
      for (std::thread& th : pool) th.join();
      for (const FlagReport& p : partial) {
        report.triples_examined += p.triples_examined;
        report.qualifying_triples += p.qualifying_triples;
        report.bounds_found += p.bounds_found;
        report.unresolved.insert(report.unresolved.end(), p.unresolved.begin(),
                                 p.unresolved.end());
      }
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, subs.size() - 1);
    std::set<std::array<std::size_t, 3>> seen_triples;
    std::size_t attempts = 0;
    const std::size_t max_attempts = max_triples * 50 + 100;
    SearchPair sp;
    while (seen_triples.size() < max_triples && attempts < max_attempts &&
           subs.size() >= 3) {
      ++attempts;
      std::array<std::size_t, 3> tri{pick(rng), pick(rng), pick(rng)};
      std::sort(tri.begin(), tri.end());
      if (tri[0] == tri[1] || tri[1] == tri[2]) continue;
      if (!seen_triples.insert(tri).second) continue;
      process_triple(tri, false, sp, report);
    }
  }
  std::sort(report.unresolved.begin(), report.unresolved.end());
  return report;
}

// --- tight-hexagon analysis -------------------------------------------------

HexagonAnalysis analyze_tight_hexagon(const Hexagon& h, int t3,
                                      const std::vector<Face>& targets) {
  for (int i = 0; i < 6; ++i) {
    if (h.types[i] != h.types[(i + 2) % 6]) {
      throw TypePatternMismatch(
          "analyze_tight_hexagon: vertex types do not alternate");
    }
  }
  int u = h.types[0], v = h.types[1];
  hat_type(h.ctx, t3);  // validates t3
  CoxeterType t = h.ctx->ctype();
  if (coxeter_m(t, u, v) != 3 || t3 == u || t3 == v) {
    throw TypePatternMismatch(
        "analyze_tight_hexagon: alternating types must braid and differ "
        "from the third type");
  }
  // Identify the middle type: braided with both others.
  int t1, t2;
  if (coxeter_m(t, u, t3) == 3 && coxeter_m(t, v, t3) == 2) {
    t2 = u;
    t1 = v;
  } else if (coxeter_m(t, v, t3) == 3 && coxeter_m(t, u, t3) == 2) {
    t2 = v;
    t1 = u;
  } else {
    throw TypePatternMismatch(
        "analyze_tight_hexagon: the three types do not form a linear "
        "chain with the alternating pair braided");
  }

  HexagonAnalysis out;
  CoxeterShadow sh = coxeter_shadow(h);
  out.shape = sh.shape;
  out.excluded_single_edge = (sh.shape == ShadowShape::SingleEdge);
  out.contradiction_case = (sh.shape == ShadowShape::TwoEdges ||
                            sh.shape == ShadowShape::Tripod);

  // Boundary path in the chamber graph: concatenates reduced words of the
  // edge labels' Coxeter images; segment i starts at the i-th prefix.
  std::array<std::vector<int>, 6> segment_letters;
  std::array<CoxElem, 6> segment_base;
  CoxElem cur = CoxElem::identity(t);
  for (int i = 0; i < 6; ++i) {
    segment_base[size_t(i)] = cur;
    CoxElem w = cox_image(h.words[size_t(i)]);
    segment_letters[size_t(i)] = reduced_word(w);
    cur = compose(cur, w);
  }

  GenSet avoid_a = gen_bit(t1) | gen_bit(t2);
  GenSet avoid_b = gen_bit(t1) | gen_bit(t3);
  for (const Face& F : targets) {
    if (!(F.ctype == t)) {
      throw TypeMismatch("analyze_tight_hexagon: target face has a "
                         "different Coxeter type");
    }
    HexagonTargetResult res;
    res.pattern_ok = true;
    for (int i = 0; i < 6; ++i) {
      SignedWord seg;
      seg.base = segment_base[size_t(i)];
      for (int letter : segment_letters[size_t(i)]) {
        seg.letters.push_back(SignedLetter{letter, +1});
      }
      GenSet supp = word_support(retract_path(seg, F));
      res.segment_supports[size_t(i)] = supp;
      if ((supp & avoid_a) != 0 && (supp & avoid_b) != 0) {
        res.pattern_ok = false;
      }
    }
    out.targets.push_back(res);
  }
  return out;
}

// --- hexagon generators -----------------------------------------------------

std::optional<Hexagon> sample_hexagon(GarsideCtxPtr c,
                                      const std::array<int, 6>& types,
                                      int word_len, std::mt19937_64& rng) {
  std::array<GarsideElem, 6> words{
      GarsideElem::identity(c), GarsideElem::identity(c),
      GarsideElem::identity(c), GarsideElem::identity(c),
      GarsideElem::identity(c), GarsideElem::identity(c)};
  GarsideElem prod = GarsideElem::identity(c);
  for (int i = 0; i < 5; ++i) {
    std::vector<int> pool = genset_to_list(hat_type(c, types[size_t(i)]));
    std::uniform_int_distribution<int> len_dist(0, word_len);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> sign_dist(0, 1);
    std::vector<int> letters;
    int len = len_dist(rng);
    for (int k = 0; k < len; ++k) {
      int letter = pool[pick(rng)];
      letters.push_back(sign_dist(rng) == 0 ? letter : -letter);
    }
    words[size_t(i)] = from_word(c, letters);
    prod = multiply(prod, words[size_t(i)]);
  }
  words[5] = inverse(prod);
  if (!parabolic_membership(words[5], hat_type(c, types[5]))) {
    return std::nullopt;
  }
  return hexagon_from_words(c, types, words);
}

std::optional<Hexagon> make_alternating_hexagon(GarsideCtxPtr c, int k1,
                                                int k2, int k3,
                                                const GarsideElem& u,
                                                const GarsideElem& v) {
  if (c->ctype().family != Family::D || c->ctype().rank < 3) {
    throw HypothesisViolation(
        "make_alternating_hexagon: requires type D of rank >= 3");
  }
  if (c->gens() != all_generators(c->ctype())) {
    throw ConfigError(
        "make_alternating_hexagon: requires the full generator set");
  }
  if (k1 == 0 || k2 == 0 || k3 == 0) {
    throw ConfigError("make_alternating_hexagon: exponents must be nonzero");
  }
  GenSet hat1 = hat_type(c, 1);
  for (const GarsideElem* w : {&u, &v}) {
    require_same_group(w->ctx, c, "make_alternating_hexagon");
    if (!parabolic_membership(*w, hat1)) {
      throw NotInParabolic(
          "make_alternating_hexagon: an even-position word is not in the "
          "parabolic omitting the first generator");
    }
  }

  GarsideElem d1 = from_word(c, {1});
  GarsideElem tail = multiply(
      power(d1, k1),
      multiply(u, multiply(power(d1, k2), multiply(v, power(d1, k3)))));
  GarsideElem w0 = inverse(tail);
  if (!parabolic_membership(w0, hat1)) return std::nullopt;

  std::array<int, 6> types{1, 3, 1, 3, 1, 3};
  std::array<GarsideElem, 6> words{w0,          power(d1, k1), u,
                                   power(d1, k2), v,           power(d1, k3)};
  return hexagon_from_words(c, types, words);
}

}  // namespace deligne
