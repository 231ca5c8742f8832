#include "deligne/coxeter.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <sstream>
#include <unordered_set>

namespace deligne {

namespace {

int sign_of(int v) { return v < 0 ? -1 : 1; }

}  // namespace

int positions(CoxeterType t) {
  return t.family == Family::A ? t.rank + 1 : t.rank;
}

void validate_type(CoxeterType t) {
  int lo = t.family == Family::A ? 1 : 2;
  if (t.rank < lo || t.rank > kMaxRank) {
    throw IndexOutOfRange("rank " + std::to_string(int(t.rank)) +
                          " outside supported range");
  }
}

int coxeter_m(CoxeterType t, int s, int u) {
  if (s < 1 || s > t.rank || u < 1 || u > t.rank) {
    throw UnknownGenerator("coxeter_m: generator index out of range");
  }
  if (s == u) return 1;
  if (s > u) std::swap(s, u);
  if (t.family == Family::A) {
    return u - s == 1 ? 3 : 2;
  }
  // Type D fork: generators 1 and 2 both attach to 3; the chain continues
  // 3 - 4 - ... - n.
  if (s == 1) return u == 3 ? 3 : 2;
  return u - s == 1 ? 3 : 2;
}

std::string gen_name(CoxeterType t, int s) {
  return (t.family == Family::A ? "s" : "d") + std::to_string(s);
}

GenSet all_generators(CoxeterType t) {
  return (GenSet{1} << t.rank) - 1;
}

int genset_size(GenSet set) { return std::popcount(set); }

void validate_genset(CoxeterType t, GenSet set) {
  if ((set & ~all_generators(t)) != 0) {
    throw UnknownGenerator("generator set contains out-of-range bits");
  }
}

std::string genset_name(CoxeterType t, GenSet set) {
  std::string out = "{";
  bool first = true;
  for (int s = 1; s <= t.rank; ++s) {
    if (!gen_in(set, s)) continue;
    if (!first) out += ",";
    out += gen_name(t, s);
    first = false;
  }
  return out + "}";
}

CoxElem CoxElem::identity(CoxeterType t) {
  validate_type(t);
  CoxElem w{t.family, t.rank, std::uint8_t(positions(t)), {}};
  for (int i = 0; i < w.m; ++i) w.img[i] = std::int8_t(i + 1);
  return w;
}

CoxElem CoxElem::generator(CoxeterType t, int s) {
  if (s < 1 || s > t.rank) {
    throw UnknownGenerator("generator index " + std::to_string(s) +
                           " for rank " + std::to_string(int(t.rank)));
  }
  CoxElem w = identity(t);
  if (t.family == Family::A) {
    std::swap(w.img[s - 1], w.img[s]);
  } else if (s == 1) {
    w.img[0] = -2;
    w.img[1] = -1;
  } else {
    std::swap(w.img[s - 2], w.img[s - 1]);
  }
  return w;
}

int CoxElem::apply(int i) const {
  if (i > 0) return img[i - 1];
  return -img[-i - 1];
}

bool CoxElem::is_identity() const {
  for (int i = 0; i < m; ++i) {
    if (img[i] != i + 1) return false;
  }
  return true;
}

std::uint64_t CoxElem::key() const {
  // 5 bits per image (value + 16 fits in [6, 26] for |value| <= 10), plus a
  // type tag in the high bits.
  std::uint64_t k = 0;
  for (int i = 0; i < m; ++i) {
    k |= std::uint64_t((int(img[i]) + 16) & 31) << (5 * i);
  }
  k |= std::uint64_t(m) << 50;
  k |= std::uint64_t(family == Family::D ? 1 : 0) << 55;
  k |= std::uint64_t(rank) << 56;
  return k;
}

CoxElem compose(const CoxElem& u, const CoxElem& v) {
  CoxElem w = u;
  for (int i = 0; i < w.m; ++i) {
    w.img[i] = std::int8_t(u.apply(v.img[i]));
  }
  return w;
}

CoxElem inverse(const CoxElem& w) {
  CoxElem r = w;
  for (int i = 1; i <= w.m; ++i) {
    int j = w.img[i - 1];
    r.img[std::abs(j) - 1] = std::int8_t(sign_of(j) * i);
  }
  return r;
}

bool is_right_descent(const CoxElem& w, int s) {
  if (s < 1 || s > w.rank) {
    throw UnknownGenerator("descent test: generator out of range");
  }
  if (w.family == Family::A) {
    return w.img[s - 1] > w.img[s];
  }
  // With this generating set the simple roots are -(e_1 + e_2) for the fork
  // generator and e_{s-1} - e_s along the chain; a root image is negative
  // iff the coefficient of its higher-index coordinate is +1.
  if (s == 1) {
    int a = w.img[0], b = w.img[1];
    return std::abs(a) < std::abs(b) ? b < 0 : a < 0;
  }
  int a = w.img[s - 2], b = w.img[s - 1];
  return std::abs(a) < std::abs(b) ? b < 0 : a > 0;
}

bool is_left_descent(const CoxElem& w, int s) {
  return is_right_descent(inverse(w), s);
}

int length(const CoxElem& w) {
  int len = 0;
  if (w.family == Family::A) {
    for (int i = 0; i < w.m; ++i) {
      for (int j = i + 1; j < w.m; ++j) {
        if (w.img[i] > w.img[j]) ++len;
      }
    }
    return len;
  }
  // Type D positive roots: e_i - e_j and -(e_i + e_j) for i < j.  When the
  // pair of images (a, b) = (w(i), w(j)) has |a| < |b|, the two root images
  // are negative together (iff b < 0); when |a| > |b|, exactly one of them
  // is negative.
  for (int i = 0; i < w.m; ++i) {
    for (int j = i + 1; j < w.m; ++j) {
      int a = w.img[i], b = w.img[j];
      if (std::abs(a) < std::abs(b)) {
        if (b < 0) len += 2;
      } else {
        ++len;
      }
    }
  }
  return len;
}

std::vector<int> reduced_word(const CoxElem& w) {
  std::vector<int> word;
  CoxElem x = w;
  CoxeterType t = w.type();
  while (!x.is_identity()) {
    int s = 0;
    for (int i = 1; i <= t.rank; ++i) {
      if (is_right_descent(x, i)) {
        s = i;
        break;
      }
    }
    word.push_back(s);
    x = compose(x, CoxElem::generator(t, s));
  }
  std::reverse(word.begin(), word.end());
  return word;
}

CoxElem word_to_elem(CoxeterType t, const std::vector<int>& word) {
  CoxElem w = CoxElem::identity(t);
  for (int s : word) {
    w = compose(w, CoxElem::generator(t, s));
  }
  return w;
}

std::string word_to_string(CoxeterType t, const std::vector<int>& word) {
  if (word.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += ".";
    out += gen_name(t, word[i]);
  }
  return out;
}

GenSet support(const CoxElem& w) {
  GenSet set = 0;
  for (int s : reduced_word(w)) set |= gen_bit(s);
  return set;
}

bool in_parabolic(const CoxElem& w, GenSet T) {
  CoxeterType t = w.type();
  validate_genset(t, T);
  GenSet missing = all_generators(t) & ~T;
  if (missing == 0) return true;
  if (genset_size(missing) == 1) {
    // Codimension one: membership reads off the image pattern directly.
    int k = 1;
    while (!gen_in(missing, k)) ++k;
    if (w.family == Family::A) {
      // Omitting s_k splits the points into {1..k} and {k+1..m}.
      for (int j = 1; j <= k; ++j) {
        if (w.img[j - 1] > k) return false;
      }
      return true;
    }
    if (k == 1) {
      // The chain without the fork generator: plain permutations.
      for (int j = 1; j <= w.m; ++j) {
        if (w.img[j - 1] < 0) return false;
      }
      return true;
    }
    if (k == 2) {
      // The other chain through the fork: the plain-permutation copy
      // conjugated by negating the first coordinate, so an image entry is
      // negative exactly when one endpoint (but not both) touches index 1.
      for (int j = 1; j <= w.m; ++j) {
        int v = w.img[j - 1];
        if ((v < 0) != ((j == 1) != (std::abs(v) == 1))) return false;
      }
      return true;
    }
    // Chain cut at k >= 3: a signed block on {1..k-1} times a plain
    // permutation of {k..n}.
    for (int j = 1; j < k; ++j) {
      if (std::abs(w.img[j - 1]) >= k) return false;
    }
    for (int j = k; j <= w.m; ++j) {
      if (w.img[j - 1] < 0) return false;
    }
    return true;
  }
  return parabolic_decompose(w, T).first.is_identity();
}

std::pair<CoxElem, CoxElem> parabolic_decompose(const CoxElem& w, GenSet T) {
  CoxeterType t = w.type();
  validate_genset(t, T);
  CoxElem x = w;
  CoxElem tail = CoxElem::identity(t);
  for (;;) {
    int s = 0;
    for (int i = 1; i <= t.rank; ++i) {
      if (gen_in(T, i) && is_right_descent(x, i)) {
        s = i;
        break;
      }
    }
    if (s == 0) break;
    CoxElem g = CoxElem::generator(t, s);
    x = compose(x, g);
    tail = compose(g, tail);
  }
  return {x, tail};
}

namespace {

// Breadth-first closure of {identity} under right multiplication by the
// given generators; each layer is sorted, so the whole output is ordered by
// (length, image-lex) and is deterministic.
std::vector<CoxElem> bfs_closure(CoxeterType t, GenSet T, std::size_t cap,
                                 const char* what) {
  validate_type(t);
  validate_genset(t, T);
  std::vector<CoxElem> out{CoxElem::identity(t)};
  std::unordered_set<std::uint64_t> seen{out[0].key()};
  std::vector<CoxElem> layer = out;
  std::vector<CoxElem> gens;
  for (int s = 1; s <= t.rank; ++s) {
    if (gen_in(T, s)) gens.push_back(CoxElem::generator(t, s));
  }
  while (!layer.empty()) {
    std::vector<CoxElem> next;
    for (const CoxElem& u : layer) {
      for (const CoxElem& g : gens) {
        CoxElem v = compose(u, g);
        if (seen.insert(v.key()).second) next.push_back(v);
      }
    }
    std::sort(next.begin(), next.end());
    if (out.size() + next.size() > cap) {
      throw BallTooLarge(std::string(what) + " enumeration exceeds cap of " +
                         std::to_string(cap));
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

}  // namespace

std::vector<CoxElem> enumerate_subgroup(CoxeterType t, GenSet T,
                                        std::size_t cap) {
  return bfs_closure(t, T, cap, "subgroup");
}

std::vector<CoxElem> enumerate_group(CoxeterType t, std::size_t cap) {
  return bfs_closure(t, all_generators(t), cap, "group");
}

CoxElem longest_element(CoxeterType t, GenSet T) {
  validate_type(t);
  validate_genset(t, T);
  CoxElem w = CoxElem::identity(t);
  for (;;) {
    int s = 0;
    for (int i = 1; i <= t.rank; ++i) {
      if (gen_in(T, i) && !is_right_descent(w, i)) {
        s = i;
        break;
      }
    }
    if (s == 0) return w;
    w = compose(w, CoxElem::generator(t, s));
  }
}

bool is_reflection(const CoxElem& w) {
  int moved[2] = {0, 0};
  int count = 0;
  for (int i = 1; i <= w.m; ++i) {
    if (w.img[i - 1] != i) {
      if (count == 2) return false;
      moved[count++] = i;
    }
  }
  if (count != 2) return false;
  int i = moved[0], j = moved[1];
  int a = w.img[i - 1], b = w.img[j - 1];
  if (a == j && b == i) return true;                          // (i j)
  if (w.family == Family::D && a == -j && b == -i) return true;  // (i -j)
  return false;
}

std::vector<CoxElem> reflections_of(CoxeterType t, GenSet T) {
  std::vector<CoxElem> out;
  for (const CoxElem& w : enumerate_subgroup(t, T)) {
    if (is_reflection(w)) out.push_back(w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Faces
// ---------------------------------------------------------------------------

Face::Face(CoxeterType t, const CoxElem& g, GenSet T) : ctype(t), rep(g), ftype(T) {
  validate_type(t);
  if (g.type() != t) {
    throw TypeMismatch("face representative has a different group type");
  }
  validate_genset(t, T);
  rep = parabolic_decompose(g, T).first;
}

std::vector<CoxElem> Face::vertices() const {
  std::vector<CoxElem> out;
  for (const CoxElem& u : enumerate_subgroup(ctype, ftype)) {
    out.push_back(compose(rep, u));
  }
  return out;
}

bool vertex_in_face(const CoxElem& x, const Face& F) {
  if (x.type() != F.ctype) {
    throw TypeMismatch("vertex_in_face: mismatched group types");
  }
  CoxElem d = compose(inverse(F.rep), x);
  return (support(d) & ~F.ftype) == 0;
}

CoxElem gate_vertex(const CoxElem& x, const Face& F) {
  if (x.type() != F.ctype) {
    throw TypeMismatch("gate_vertex: mismatched group types");
  }
  auto [head, tail] = parabolic_decompose(compose(inverse(x), F.rep), F.ftype);
  (void)tail;
  return compose(x, head);
}

namespace {

// Rebuild a face from the set of gate images: pick the (length, lex)-least
// image g*, translate to the identity, and read off the parabolic type from
// the supports.  Verifies the set really is a full coset.
Face face_from_vertex_set(CoxeterType t, const std::vector<CoxElem>& verts) {
  const CoxElem* best = &verts.front();
  int best_len = length(*best);
  for (const CoxElem& v : verts) {
    int len = length(v);
    if (len < best_len || (len == best_len && v.key() < best->key())) {
      best = &v;
      best_len = len;
    }
  }
  CoxElem base_inv = inverse(*best);
  GenSet J = 0;
  std::vector<std::uint64_t> keys;
  keys.reserve(verts.size());
  for (const CoxElem& v : verts) {
    CoxElem p = compose(base_inv, v);
    J |= support(p);
    keys.push_back(p.key());
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::vector<CoxElem> group = enumerate_subgroup(t, J);
  bool full = group.size() == keys.size();
  if (full) {
    for (const CoxElem& u : group) {
      if (!std::binary_search(keys.begin(), keys.end(), u.key())) {
        full = false;
        break;
      }
    }
  }
  if (!full) {
    throw Error("InternalInvariant",
                "projection image is not a parabolic coset");
  }
  return Face(t, *best, J);
}

}  // namespace

Face proj_face(const Face& E, const Face& F) {
  if (E.ctype != F.ctype) {
    throw TypeMismatch("proj_face: mismatched group types");
  }
  std::vector<CoxElem> gates;
  std::unordered_set<std::uint64_t> seen;
  for (const CoxElem& v : E.vertices()) {
    CoxElem g = gate_vertex(v, F);
    if (seen.insert(g.key()).second) gates.push_back(g);
  }
  return face_from_vertex_set(E.ctype, gates);
}

PairGateResult pair_gate(const Face& E, const Face& F) {
  Face e_proj = proj_face(F, E);
  Face f_proj = proj_face(E, F);
  std::vector<std::pair<CoxElem, CoxElem>> translation;
  for (const CoxElem& v : e_proj.vertices()) {
    translation.emplace_back(v, gate_vertex(v, F));
  }
  return PairGateResult{e_proj, f_proj, std::move(translation)};
}

std::vector<CoxElem> walls_of_face(const Face& F) {
  std::vector<CoxElem> out;
  CoxElem rep_inv = inverse(F.rep);
  for (const CoxElem& r : reflections_of(F.ctype, F.ftype)) {
    out.push_back(compose(compose(F.rep, r), rep_inv));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool separates(const CoxElem& t, const CoxElem& u, const CoxElem& v) {
  bool cu = length(compose(t, u)) < length(u);
  bool cv = length(compose(t, v)) < length(v);
  return cu != cv;
}

int separating_wall_count(CoxeterType t, const CoxElem& u, const CoxElem& v) {
  int count = 0;
  for (const CoxElem& r : reflections_of(t, all_generators(t))) {
    if (separates(r, u, v)) ++count;
  }
  return count;
}

bool faces_parallel(const Face& F, const Face& G) {
  if (F.ctype != G.ctype) {
    throw TypeMismatch("faces_parallel: mismatched group types");
  }
  std::vector<CoxElem> wf = walls_of_face(F);
  std::vector<CoxElem> wg = walls_of_face(G);
  return wf == wg;
}

std::vector<int> elementary_segment(const Face& F, const Face& G) {
  if (!faces_parallel(F, G)) {
    throw NotParallel("faces have different wall sets");
  }
  if (F == G) {
    throw NotAdjacent("faces coincide");
  }
  // Minimal common face containing both cosets, relative to base F.rep: its
  // parabolic type is the closure of the supports.  Adjacency means that
  // closure has exactly one more generator than the faces' own dimension.
  CoxElem base_inv = inverse(F.rep);
  GenSet J = F.ftype;
  for (const CoxElem& v : G.vertices()) {
    J |= support(compose(base_inv, v));
  }
  if (genset_size(J) != F.dim() + 1) {
    throw NotAdjacent("no common face of dimension dim+1 contains both");
  }
  CoxElem g = gate_vertex(F.rep, G);
  return reduced_word(compose(base_inv, g));
}

std::vector<Face> faces_of_type(CoxeterType t, GenSet T) {
  validate_genset(t, T);
  std::vector<Face> out;
  for (const CoxElem& g : enumerate_group(t)) {
    bool minimal = true;
    for (int s = 1; s <= t.rank && minimal; ++s) {
      if (gen_in(T, s) && is_right_descent(g, s)) minimal = false;
    }
    if (minimal) out.push_back(Face(t, g, T));
  }
  return out;
}

bool faces_intersect(const Face& F, const Face& G) {
  if (F.ctype != G.ctype) {
    throw TypeMismatch("faces_intersect: mismatched group types");
  }
  // g*W_A meets h*W_B iff the minimal (W_A, W_B)-double-coset representative
  // of g^-1 * h is the identity.
  CoxElem d = compose(inverse(F.rep), G.rep);
  CoxeterType t = F.ctype;
  for (;;) {
    int s = 0;
    for (int i = 1; i <= t.rank; ++i) {
      if (gen_in(F.ftype, i) && is_left_descent(d, i)) {
        s = i;
        break;
      }
    }
    if (s != 0) {
      d = compose(CoxElem::generator(t, s), d);
      continue;
    }
    for (int i = 1; i <= t.rank; ++i) {
      if (gen_in(G.ftype, i) && is_right_descent(d, i)) {
        s = i;
        break;
      }
    }
    if (s == 0) break;
    d = compose(d, CoxElem::generator(t, s));
  }
  return d.is_identity();
}

ProjectionLocationReport verify_projection_location(CoxeterType t, int t1,
                                                    int t2, int t3) {
  validate_type(t);
  for (int s : {t1, t2, t3}) {
    if (s < 1 || s > t.rank) {
      throw UnknownGenerator("verify_projection_location: generator " +
                             std::to_string(s));
    }
  }
  if (coxeter_m(t, t1, t2) != 3 || coxeter_m(t, t2, t3) != 3 ||
      coxeter_m(t, t1, t3) != 2) {
    throw HypothesisViolation(
        "generators must form a chain with orders (3, 3) and commuting ends");
  }

  GenSet hat1 = all_generators(t) & ~gen_bit(t1);
  GenSet hat2 = all_generators(t) & ~gen_bit(t2);
  std::vector<Face> faces1 = faces_of_type(t, hat1);
  std::vector<Face> faces2 = faces_of_type(t, hat2);

  // Precompute the intersection incidence between the two families.
  std::vector<std::vector<char>> meets(faces1.size(),
                                       std::vector<char>(faces2.size(), 0));
  for (std::size_t i = 0; i < faces1.size(); ++i) {
    for (std::size_t j = 0; j < faces2.size(); ++j) {
      meets[i][j] = faces_intersect(faces1[i], faces2[j]) ? 1 : 0;
    }
  }

  ProjectionLocationReport report;
  auto record_failure = [&](const char* what, std::size_t i1, std::size_t i2,
                            std::size_t i3, std::size_t i4) {
    if (report.failure_samples.size() >= 8) return;
    std::ostringstream os;
    os << what << " C1=" << elem_to_string(faces1[i1].rep)
       << " C2=" << elem_to_string(faces2[i2].rep)
       << " C3=" << elem_to_string(faces1[i3].rep)
       << " C4=" << elem_to_string(faces2[i4].rep);
    report.failure_samples.push_back(os.str());
  };

  auto face_inside = [](const Face& inner, const Face& outer) {
    for (const CoxElem& v : inner.vertices()) {
      if (!vertex_in_face(v, outer)) return false;
    }
    return true;
  };

  for (std::size_t i1 = 0; i1 < faces1.size(); ++i1) {
    for (std::size_t i2 = 0; i2 < faces2.size(); ++i2) {
      if (!meets[i1][i2]) continue;
      for (std::size_t i3 = 0; i3 < faces1.size(); ++i3) {
        if (i3 == i1 || !meets[i3][i2]) continue;
        Face p31 = proj_face(faces1[i3], faces1[i1]);
        bool part1a = face_inside(p31, faces2[i2]);
        for (std::size_t i4 = 0; i4 < faces2.size(); ++i4) {
          if (i4 == i2 || !meets[i3][i4]) continue;
          ++report.tuples_checked;
          bool ok1 = part1a;
          if (ok1) {
            Face p42 = proj_face(faces2[i4], faces2[i2]);
            ok1 = face_inside(p42, faces1[i3]);
          }
          if (!ok1) {
            ++report.part1_failures;
            record_failure("part1", i1, i2, i3, i4);
          }
          Face p41 = proj_face(faces2[i4], faces1[i1]);
          if (gen_in(p41.ftype, t3) && gen_in(p41.ftype, t2)) {
            ++report.part2_failures;
            record_failure("part2", i1, i2, i3, i4);
          }
        }
      }
    }
  }
  return report;
}

std::string elem_to_string(const CoxElem& w) {
  std::string out = "[";
  for (int i = 0; i < w.m; ++i) {
    if (i) out += ",";
    out += std::to_string(int(w.img[i]));
  }
  return out + "]";
}

}  // namespace deligne
