#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "deligne/coxeter.hpp"
#include "deligne/error.hpp"
#include "deligne/garside.hpp"
#include "deligne/oriented.hpp"

namespace deligne {

// ---------------------------------------------------------------------------
// The coset complex of an Artin group: vertices are left cosets g·A_ŝ of the
// maximal standard parabolics (ŝ = all generators but s), chambers biject
// with group elements, and a set of vertices spans a simplex exactly when
// the cosets share an element.  Adjacency is only semi-decidable, so every
// adjacency this module asserts carries a chamber witness, and negative
// answers are always "not found within radius".
// ---------------------------------------------------------------------------

// Generator set complementary to s within the context.
GenSet hat_type(const GarsideCtxPtr& c, int s);

struct VertexCoset {
  GarsideElem rep;  // any representative chamber of the coset rep * A_ŝ
  int vtype = 0;    // the omitted generator s
};

// The vertex determined by a chamber and a type.
VertexCoset vertex_of(const GarsideElem& chamber, int s);

// Exact coset equality (false for distinct types; TypeMismatch for distinct
// ambient groups).
bool vertex_equal(const VertexCoset& v, const VertexCoset& w);

// Exact coset invariant: the Coxeter image's coset, as a canonical string.
// Equal vertices always share it; unequal ones may collide.
std::string vertex_shadow_key(const VertexCoset& v);

// Deterministic normalization key: the minimal normal form among
// rep * a over the radius-bounded ball of A_ŝ.  Equal keys imply equal
// cosets (the key names a common element); unequal keys are inconclusive,
// so exact equality remains the authority.
std::string vertex_norm_key(const VertexCoset& v, int norm_radius);

// Chamber witnessing that v and w span an edge: a chamber lying in both
// cosets, searched within the given radius (semi-decision).  Throws
// SameType when the two types coincide.
std::optional<GarsideElem> adjacent_witness(const VertexCoset& v,
                                            const VertexCoset& w, int radius);

// Cheap exact necessary condition for adjacency: the Coxeter shadows of the
// two cosets intersect.
bool shadows_intersect(const VertexCoset& v, const VertexCoset& w);

// ---------------------------------------------------------------------------
// Hexagons: closed 6-cycles given by per-edge words.
// ---------------------------------------------------------------------------

struct Hexagon {
  GarsideCtxPtr ctx;
  std::array<int, 6> types;          // vertex types a_i
  std::array<GarsideElem, 6> words;  // w_i in A_{â_i}
  // witnesses[i] = w_1 ... w_{i+1}-prefix chamber containing the edge
  // {x_i, x_{i+1}}; vertices[i] has representative w_1 ... w_i-prefix.
  std::array<GarsideElem, 6> witnesses;
  std::array<VertexCoset, 6> vertices;
};

// Validates memberships (NotInParabolic with the failing index), closure
// (NotClosed), and that consecutive types differ (TypePatternMismatch);
// derives witnesses and vertices.
Hexagon hexagon_from_words(GarsideCtxPtr c, const std::array<int, 6>& types,
                           const std::array<GarsideElem, 6>& words);

// Hexagons are compared by their ordered vertex 6-tuples.
bool hexagons_equal(const Hexagon& a, const Hexagon& b);

// ---------------------------------------------------------------------------
// The Coxeter shadow of a hexagon: the image cycle in the Coxeter coset
// complex, classified by shape.
// ---------------------------------------------------------------------------

enum class ShadowShape {
  SingleEdge,
  TwoEdges,
  Tripod,
  ThreeEdgePath,
  FourFiveEdges,
  SixCycle,
  Other,
};

std::string shadow_shape_name(ShadowShape s);

struct CoxeterShadow {
  std::array<CoxElem, 6> corner_reps;  // minimal coset representatives
  std::array<int, 6> corner_types;
  int distinct_vertices = 0;
  int distinct_edges = 0;
  ShadowShape shape = ShadowShape::Other;
};

CoxeterShadow coxeter_shadow(const Hexagon& h);

// ---------------------------------------------------------------------------
// Center searches.
// ---------------------------------------------------------------------------

// A vertex of the requested type witness-adjacent to every cycle vertex.
// Candidates are chambers around the first cycle vertex; all adjacencies are
// then certified by witnesses within the radius.  Deterministic order.
std::optional<VertexCoset> search_center(const std::vector<VertexCoset>& cycle,
                                         int ctype, int radius);

// A vertex witness-adjacent to the three alternating vertices of one parity
// (0 = positions 0,2,4; 1 = positions 1,3,5); the lower parity and lower
// type are preferred.  Returns the vertex and the parity.
std::optional<std::pair<VertexCoset, int>> search_quasi_center(
    const Hexagon& h, int radius);

// ---------------------------------------------------------------------------
// The type order on D_n vertex types and zigzag classification.
// ---------------------------------------------------------------------------

// Partial order with types 1 and 2 incomparable at the bottom and the chain
// 3 < 4 < ... above both.
bool type_order_comparable(int i, int j);
bool type_order_less(int i, int j);

struct ZigzagReport {
  bool admissible = false;       // consecutive types pairwise comparable
  std::vector<int> local_max;    // 0-based positions
  std::vector<int> local_min;
  bool zigzag = false;           // admissible and max/min alternate
};

// Requires a type-D ambient group (HypothesisViolation otherwise).
ZigzagReport classify_zigzag(const Hexagon& h);

// ---------------------------------------------------------------------------
// Chamber balls and the derived finite piece of the complex.
// ---------------------------------------------------------------------------

struct ChamberBall {
  GarsideCtxPtr ctx;
  int norm_radius = 1;
  std::vector<GarsideElem> chambers;       // enumerate_ball order
  std::vector<int> type_list;              // generator indices, ascending
  std::vector<VertexCoset> verts;          // deduplicated coset classes
  // chamber_vertex[c][k] = vertex id of chamber c at type_list[k] (-1 when
  // the type is filtered out of a relative complex).
  std::vector<std::vector<int>> chamber_vertex;
  std::vector<std::vector<int>> nbrs;      // sorted adjacency lists

  bool adjacent(int i, int j) const;
};

// Builds the radius-ball of chambers and identifies its vertex cosets
// exactly (normalization keys accelerate, the membership test decides).
ChamberBall build_ball_complex(GarsideCtxPtr c, int radius,
                               int norm_radius = 1);

// Induced subcomplex on the vertex types listed in sprime.
ChamberBall relative_complex(const ChamberBall& ball, GenSet sprime);

// Smallest connected subdiagram (of the A/D Coxeter diagram) containing the
// given generators.
GenSet diagram_subtree(CoxeterType t, GenSet gens);

// ---------------------------------------------------------------------------
// Report-producing verification drivers.
// ---------------------------------------------------------------------------

struct FourWheelReport {
  std::uint64_t cycles_checked = 0;
  std::uint64_t centers_found = 0;
  std::uint64_t skipped_not_induced = 0;
  std::vector<std::string> unresolved;  // cycles with no center found
  std::vector<std::string> failures;    // expected empty
  bool ok() const { return failures.empty(); }
};

// For every 4-cycle of the ball graph that is induced within the ball (and
// whose diagonals also admit no witness within the search radius), searches
// a center whose type lies in the smallest subdiagram spanned by the
// cycle's types.
FourWheelReport four_wheel_check(const ChamberBall& ball, int search_radius);

struct LinkReport {
  std::uint64_t pairs_checked = 0;
  std::uint64_t triangles_found = 0;
  std::vector<std::string> unresolved;
  bool ok() const { return unresolved.empty(); }
};

// Checks the join decomposition of the link of v: link vertices whose types
// lie in different connected components of the diagram minus v's type must
// span a triangle with v (witnessed by a chamber).  pair_cap bounds the
// number of cross-component pairs examined (deterministic order).
LinkReport link_check(const ChamberBall& ball, const VertexCoset& v,
                      int radius = 2, std::size_t pair_cap = 10'000);

struct FlagReport {
  std::uint64_t subdivided_vertices = 0;
  std::uint64_t midpoints = 0;
  std::uint64_t triples_examined = 0;
  std::uint64_t qualifying_triples = 0;
  std::uint64_t bounds_found = 0;
  std::vector<std::string> unresolved;
  std::vector<std::string> refuted;  // expected empty
  bool ok() const { return refuted.empty(); }
};

// Builds the edge subdivision separating the two fork types of D_n (edge
// midpoints acquire the intermediate level), orders vertices by level, and
// for triples with pairwise lower bounds searches a common lower bound —
// first within the ball, then among witness chambers within the given
// radius.  max_triples = 0 enumerates every qualifying triple in the ball;
// a positive value samples that many distinct triples (deterministic for a
// fixed seed).
FlagReport subdivide_and_check_downward_flag(const ChamberBall& ball,
                                             int radius,
                                             std::size_t max_triples = 0,
                                             std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Tight-hexagon support analysis: the Coxeter shadow's shape plus, per
// target face, the per-segment letter supports of the retracted boundary
// path and whether every segment avoids {t1,t2} or avoids {t1,t3}.
// ---------------------------------------------------------------------------

struct HexagonTargetResult {
  std::array<GenSet, 6> segment_supports;
  bool pattern_ok = false;
};

struct HexagonAnalysis {
  ShadowShape shape = ShadowShape::Other;
  bool excluded_single_edge = false;  // shadow collapsed to one edge
  bool contradiction_case = false;    // two-edge / tripod shapes
  std::vector<HexagonTargetResult> targets;
};

// Requires alternating types t1, t2 with m(t1,t2) = m(t2,t3) = 3 and
// m(t1,t3) = 2 (TypePatternMismatch otherwise).
HexagonAnalysis analyze_tight_hexagon(const Hexagon& h, int t3,
                                      const std::vector<Face>& targets);

// ---------------------------------------------------------------------------
// Hexagon generators.
// ---------------------------------------------------------------------------

// Rejection sampler: five random words in their parabolics, the sixth the
// inverse of their product, accepted when it lies in its parabolic.
std::optional<Hexagon> sample_hexagon(GarsideCtxPtr c,
                                      const std::array<int, 6>& types,
                                      int word_len, std::mt19937_64& rng);

// Alternating family in type D: types (1,3,1,3,1,3) with the fork-letter
// powers delta_1^{k_i} on the odd edges and words u, v in A_1-hat on two
// even edges; the first even word is solved from closure and the candidate
// is accepted when it lies in A_1-hat.
std::optional<Hexagon> make_alternating_hexagon(GarsideCtxPtr c, int k1,
                                                int k2, int k3,
                                                const GarsideElem& u,
                                                const GarsideElem& v);

}  // namespace deligne
