#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "deligne/error.hpp"

namespace deligne {

// ---------------------------------------------------------------------------
// Finite Coxeter groups of type A_n and D_n, realized as (signed) permutation
// groups, together with the combinatorial geometry of their Davis/Coxeter
// cells: faces (cosets of standard parabolic subgroups), gates, projections
// between faces, walls, and parallelism.
//
// Conventions used throughout:
//   * Generators are 1-based.  Type A_n acts on {1..n+1} by permutations with
//     generator s_i = (i, i+1).  Type D_n acts on {±1..±n} by even-signed
//     permutations; generator 1 maps e_1 -> -e_2, e_2 -> -e_1, and generator
//     i >= 2 is the plain transposition (i-1, i).
//   * Composition is functional: (u*v)(i) = u(v(i)).
//   * Length is the number of positive roots sent to negative roots.
// ---------------------------------------------------------------------------

enum class Family : std::uint8_t { A, D };

struct CoxeterType {
  Family family;
  std::uint8_t rank;  // number of generators

  friend bool operator==(const CoxeterType&, const CoxeterType&) = default;
};

// Maximum supported rank (keeps elements in a fixed-size representation).
inline constexpr int kMaxRank = 8;
// Number of points the group permutes: n+1 for A_n, n for D_n.
int positions(CoxeterType t);
// Throws IndexOutOfRange for unsupported ranks (A: 1..8, D: 2..8).
void validate_type(CoxeterType t);
// Order m(s,t) of the product of two generators (1 on the diagonal, 2 or 3
// off-diagonal per the A_n chain / D_n fork).
int coxeter_m(CoxeterType t, int s, int u);
// Short printable name of a generator: "s3" for type A, "d3" for type D.
std::string gen_name(CoxeterType t, int s);

// A set of generators, encoded as a bitmask with bit (i-1) for generator i.
using GenSet = std::uint32_t;

GenSet all_generators(CoxeterType t);
inline GenSet gen_bit(int s) { return GenSet{1} << (s - 1); }
inline bool gen_in(GenSet set, int s) { return (set & gen_bit(s)) != 0; }
int genset_size(GenSet set);
// Throws UnknownGenerator unless set is a subset of all_generators(t).
void validate_genset(CoxeterType t, GenSet set);
// Parsing/formatting of generator subsets, e.g. "d1,d3" <-> mask 0b101.
std::string genset_name(CoxeterType t, GenSet set);

// A group element, stored by its signed images: img[i-1] = w(i).  Type A
// elements have all-positive images; type D elements have an even number of
// negative images.
struct CoxElem {
  Family family;
  std::uint8_t rank;
  std::uint8_t m;  // number of permuted points
  std::array<std::int8_t, 10> img;

  static CoxElem identity(CoxeterType t);
  static CoxElem generator(CoxeterType t, int s);  // throws UnknownGenerator

  CoxeterType type() const { return CoxeterType{family, rank}; }

  // Signed action: apply(i) = w(i), apply(-i) = -w(i), for 1 <= i <= m.
  int apply(int i) const;

  bool is_identity() const;

  // Injective 64-bit encoding (5 bits per image plus type tag); doubles as a
  // perfect hash and as a deterministic total order via numeric comparison.
  std::uint64_t key() const;

  friend bool operator==(const CoxElem&, const CoxElem&) = default;
};

// Deterministic total order: by type, then lexicographically by images.
inline bool operator<(const CoxElem& a, const CoxElem& b) {
  return a.key() < b.key();
}

CoxElem compose(const CoxElem& u, const CoxElem& v);  // u after v
CoxElem inverse(const CoxElem& w);

// Right/left descent tests: is_right_descent(w,s) holds iff l(w*s) < l(w),
// computed directly from the image of the simple root of s.
bool is_right_descent(const CoxElem& w, int s);
bool is_left_descent(const CoxElem& w, int s);

// Coxeter length via root counting (quadratic in the number of points).
int length(const CoxElem& w);

// The lexicographically-least reduced word (repeatedly strips the
// lowest-index right descent).  word_to_elem validates letters.
std::vector<int> reduced_word(const CoxElem& w);
CoxElem word_to_elem(CoxeterType t, const std::vector<int>& word);
std::string word_to_string(CoxeterType t, const std::vector<int>& word);

// Set of letters occurring in a reduced word for w (independent of the
// choice of reduced word).
GenSet support(const CoxElem& w);

// Whether w lies in the standard parabolic W_T, i.e. support(w) is contained
// in T.  Closed-form image tests make codimension-one subsets O(rank); other
// subsets fall back to descent stripping.
bool in_parabolic(const CoxElem& w, GenSet T);

// w = u * tail with u the minimal-length representative of the coset
// w*W_T and tail in W_T; lengths add.  Returns (u, tail).
std::pair<CoxElem, CoxElem> parabolic_decompose(const CoxElem& w, GenSet T);

inline constexpr std::size_t kMaxSubgroupEnum = 50'000;
inline constexpr std::size_t kMaxGroupEnum = 6'000'000;

// Breadth-first enumeration of the standard parabolic subgroup W_T (resp.
// the full group), ordered by length then lexicographically: deterministic.
// Throws BallTooLarge when the cap is exceeded.
std::vector<CoxElem> enumerate_subgroup(CoxeterType t, GenSet T,
                                        std::size_t cap = kMaxSubgroupEnum);
std::vector<CoxElem> enumerate_group(CoxeterType t,
                                     std::size_t cap = kMaxGroupEnum);

// Longest element of W_T, by greedy ascent (no enumeration).
CoxElem longest_element(CoxeterType t, GenSet T);

// Reflection tests/enumeration.  Reflections of W_T are exactly the
// reflections of W lying in W_T.
bool is_reflection(const CoxElem& w);
std::vector<CoxElem> reflections_of(CoxeterType t, GenSet T);

// ---------------------------------------------------------------------------
// Faces: cosets g*W_T, stored by their minimal-length representative.
// dim(F) = |T|.  Vertices are the coset elements.
// ---------------------------------------------------------------------------

struct Face {
  CoxeterType ctype;
  CoxElem rep;    // minimal-length coset representative
  GenSet ftype;   // the standard parabolic's generator set T

  Face(CoxeterType t, const CoxElem& g, GenSet T);

  int dim() const { return genset_size(ftype); }
  std::vector<CoxElem> vertices() const;

  // Stable identity of the coset (rep plus parabolic type).
  std::pair<std::uint64_t, std::uint32_t> key() const {
    return {rep.key(), ftype};
  }
  friend bool operator==(const Face& a, const Face& b) {
    return a.ctype == b.ctype && a.rep == b.rep && a.ftype == b.ftype;
  }
};

// True iff x lies in the coset F.
bool vertex_in_face(const CoxElem& x, const Face& F);

// The gate (nearest-point projection) of chamber x in the coset F: the
// unique vertex of F at minimal distance from x; distances to F split as
// d(x, y) = d(x, gate) + d(gate, y) for every vertex y of F.
CoxElem gate_vertex(const CoxElem& x, const Face& F);

// Image of E under the gate map into F, recovered as a face (the gate image
// of a face is again a face).  Throws Error("InternalInvariant") if the
// image fails to close up into a coset — impossible for valid inputs.
Face proj_face(const Face& E, const Face& F);

// Mutual projections between two faces: e_proj ⊆ E and f_proj ⊆ F are the
// images of the two gate maps, and translation lists the induced bijection
// (v in e_proj, paired with its gate in f_proj), in vertex order of e_proj.
struct PairGateResult {
  Face e_proj;
  Face f_proj;
  std::vector<std::pair<CoxElem, CoxElem>> translation;
};
PairGateResult pair_gate(const Face& E, const Face& F);

// Walls of F: the reflections fixing F pointwise, i.e. rep * r * rep^-1 for
// r a reflection of W_T.  Sorted deterministically.
std::vector<CoxElem> walls_of_face(const Face& F);

// Whether the wall of reflection t separates chambers u and v (t acts by
// left multiplication; the test is the XOR of the two length-decrease
// tests).  Precondition: t is a reflection.
bool separates(const CoxElem& t, const CoxElem& u, const CoxElem& v);

// Number of walls separating u from v (equals the gallery distance).
int separating_wall_count(CoxeterType t, const CoxElem& u, const CoxElem& v);

// Two faces are parallel iff they have the same wall set.  (Parallel faces
// may have different parabolic types.)
bool faces_parallel(const Face& F, const Face& G);

// For parallel faces F != G contained in a common face of dimension
// dim(F)+1: the reduced word (from F.rep) of the straight segment joining
// F.rep to its gate in G.  Throws NotParallel / NotAdjacent / TypeMismatch.
std::vector<int> elementary_segment(const Face& F, const Face& G);

// All faces of parabolic type T, ordered by representative (length, lex).
std::vector<Face> faces_of_type(CoxeterType t, GenSet T);

// True iff the cosets F and G share at least one vertex.
bool faces_intersect(const Face& F, const Face& G);

// ---------------------------------------------------------------------------
// Exhaustive projection-location check.
//
// Input: generators t1, t2, t3 with m(t1,t2) = m(t2,t3) = 3 and
// m(t1,t3) = 2 (otherwise HypothesisViolation).  Write u^ for the
// codimension-one parabolic type dropping u.  The check enumerates all
// chains C1, C2, C3, C4 of faces with C1, C3 of type t1^, C2, C4 of type
// t2^, C1 != C3, C2 != C4, and consecutive faces intersecting, and verifies:
//   (1) proj_face(C3, C1) lies inside C1 ∩ C2, and
//       proj_face(C4, C2) lies inside C2 ∩ C3;
//   (2) the parabolic type of proj_face(C4, C1) omits t3 or omits t2.
// ---------------------------------------------------------------------------

struct ProjectionLocationReport {
  std::uint64_t tuples_checked = 0;
  std::uint64_t part1_failures = 0;
  std::uint64_t part2_failures = 0;
  std::vector<std::string> failure_samples;  // at most 8, for diagnostics

  bool ok() const { return part1_failures == 0 && part2_failures == 0; }
};

ProjectionLocationReport verify_projection_location(CoxeterType t, int t1,
                                                    int t2, int t3);

// Short printable form of an element: its one-line signed image list,
// e.g. "[2,-1,3]".
std::string elem_to_string(const CoxElem& w);

}  // namespace deligne
