#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deligne/coxeter.hpp"
#include "deligne/error.hpp"
#include "deligne/garside.hpp"

namespace deligne {

// ---------------------------------------------------------------------------
// The semidirect-product model of the type-D Artin group: the braid group
// A(A_{n-1}) acts on a free group F_{n-1}, and A(D_n) is isomorphic to
// F_{n-1} x| A(A_{n-1}).  This module provides free-group arithmetic, the
// braid action, the generator dictionaries in both directions, a mechanical
// isomorphism verifier, the reduction of closed alternating hexagons to a
// two-sided equation in the free group, and the power-equation layer
// (x^M = y^N z^P forces a common root) used to classify its solutions.
// ---------------------------------------------------------------------------

// A freely reduced word in F_rank; letter +i / -i is the i-th generator or
// its inverse (1-based, written b_i).
struct FreeWord {
  int rank = 0;
  std::vector<int> letters;  // freely reduced, values in ±{1..rank}

  static FreeWord identity(int rank);
  static FreeWord generator(int rank, int i);  // throws IndexOutOfRange

  bool is_identity() const { return letters.empty(); }

  friend bool operator==(const FreeWord&, const FreeWord&) = default;
};

// Reduces an arbitrary letter string (cancelling adjacent inverse pairs).
// Throws IndexOutOfRange for letters outside ±{1..rank}.
FreeWord fw_from_letters(int rank, const std::vector<int>& letters);

FreeWord fw_multiply(const FreeWord& x, const FreeWord& y);
FreeWord fw_inverse(const FreeWord& x);
FreeWord fw_power(const FreeWord& x, int k);
std::string fw_to_string(const FreeWord& x);  // "b1.b2^-1", "e" when empty

// An automorphism of F_rank, stored as generator images together with the
// images under the inverse; the factory validates that the two compose to
// the identity on every generator (HypothesisViolation otherwise).
struct FreeAut {
  int rank = 0;
  std::vector<FreeWord> images;          // images[i-1] = image of b_i
  std::vector<FreeWord> inverse_images;  // under the inverse automorphism

  static FreeAut identity(int rank);
};

FreeAut make_free_aut(std::vector<FreeWord> images,
                      std::vector<FreeWord> inverse_images);

// Substitution of generator images; aut_compose(f, g) acts as f after g.
FreeWord aut_apply(const FreeAut& f, const FreeWord& x);
FreeAut aut_compose(const FreeAut& f, const FreeAut& g);
FreeAut aut_inverse(const FreeAut& f);

// The braid action on F_{n-1} by the i-th braid generator a_i:
//   i = 1:   b_1 -> b_1,          b_j -> b_1^{-1} b_j  (j >= 2)
//   i >= 2:  b_{i-1} -> b_i,      b_i -> b_i b_{i-1}^{-1} b_i,
//            all other generators fixed.
// Throws IndexOutOfRange unless 1 <= i <= n-1.
FreeAut rho_generator(int i, int n);

// Left action of the braid group on the free group: the element is factored
// into signed braid letters and the letter automorphisms are applied so that
// apply(g h, x) = apply(g, apply(h, x)).  The context must be a full type-A
// context of rank x.rank (TypeMismatch otherwise).
FreeWord apply(const GarsideElem& b, const FreeWord& x);

// An element a.b of the semidirect product F_{n-1} x| A(A_{n-1}): the free
// part a is written to the left of the braid part b.  Equality is
// componentwise.
struct SemidirectElem {
  FreeWord a;
  GarsideElem b;  // element of the full A(A_{n-1}) context
};

SemidirectElem semi_identity(GarsideCtxPtr braid_ctx);
SemidirectElem semi_multiply(const SemidirectElem& x, const SemidirectElem& y);
SemidirectElem semi_inverse(const SemidirectElem& x);
bool semi_equal(const SemidirectElem& x, const SemidirectElem& y);
std::string semi_to_string(const SemidirectElem& x);

// ---------------------------------------------------------------------------
// Generator dictionaries between A(D_n) and the semidirect model.
//
//   d_1     -> (b_1, a_1)           b_1  -> d_1 d_2^{-1}
//   d_i     -> (e,   a_{i-1})       b_i  -> d_{i+1}..d_3 . d_1 d_2^{-1} .
//   (i >= 2)                                d_3^{-1}..d_{i+1}^{-1}
//                                   a_i  -> d_{i+1}
// ---------------------------------------------------------------------------

// Image of an element of the full A(D_n) context (TypeMismatch otherwise).
SemidirectElem dn_to_semi(const GarsideElem& g);

// Image of a semidirect element in the full A(D_{rank+1}) context.
GarsideElem semi_to_dn(const SemidirectElem& s);

struct IsomorphismReport {
  int n = 0;
  bool generators_roundtrip = false;  // both composites fix every generator
  bool dn_relations_hold = false;     // type-D relators die in the model
  bool semidirect_relations_hold = false;  // model relators die in A(D_n)
  std::vector<std::string> failures;

  bool ok() const {
    return generators_roundtrip && dn_relations_hold &&
           semidirect_relations_hold && failures.empty();
  }
};

// Mechanically verifies that the two dictionaries define mutually inverse
// homomorphisms for 3 <= n <= 6 (IndexOutOfRange otherwise): generator
// round-trips, every type-D braid relator evaluated in the semidirect
// model, and every defining relation of the model (braid relators and the
// action relations a b_j a^{-1} = rho(a)(b_j)) evaluated in A(D_n) through
// the exact word problem.  corrupt_for_selftest deliberately breaks one
// dictionary entry so callers can watch the verifier fail.
IsomorphismReport verify_isomorphism(int n, bool corrupt_for_selftest = false);

// ---------------------------------------------------------------------------
// Reduction of a closed alternating hexagon to a free-group equation.
// ---------------------------------------------------------------------------

struct FreeEquationSides {
  FreeWord lhs_free, rhs_free;
  GarsideElem lhs_braid, rhs_braid;

  bool balanced() const;  // both component pairs equal
};

// For w_1, w_2, w_3 in the parabolic of A(D_n) omitting the first generator
// (NotInParabolic with the failing 0-based index otherwise), computes both
// sides of the identity equivalent to
//     w_1 d_1^{k_1} w_2 d_1^{k_2} w_3 d_1^{k_3} = e :
// with (e, c_i) the image of w_i and (b_1, a_1) the image of d_1,
//     lhs_free  = apply(c_1, b_1)^{k_1}
//     lhs_braid = c_1 a_1^{k_1} c_2
//     rhs_free  = b_1^{-k_3} . apply(a_1^{-k_3} c_3^{-1}, b_1)^{-k_2}
//     rhs_braid = a_1^{-k_3} c_3^{-1} a_1^{-k_2}
// The hexagon word is the identity iff both component pairs are equal.
FreeEquationSides hexagon_to_free_equation(const GarsideElem& w1,
                                           const GarsideElem& w2,
                                           const GarsideElem& w3, int k1,
                                           int k2, int k3);

// ---------------------------------------------------------------------------
// Power equations in free groups.
// ---------------------------------------------------------------------------

// Decides x^M = y^N z^P by direct computation.
bool ls_check(const FreeWord& x, const FreeWord& y, const FreeWord& z, int M,
              int N, int P);

struct PowerEquationReport {
  std::uint64_t equations_checked = 0;
  std::uint64_t solutions_found = 0;
  std::uint64_t noncyclic_solutions = 0;  // expected zero
  std::vector<std::string> counterexamples;

  bool ok() const { return noncyclic_solutions == 0; }
};

// Enumerates every triple (x, y, z) of freely reduced words of length at
// most maxlen in F_2 and every exponent triple from expset (all entries
// must be >= 2; HypothesisViolation otherwise), records the solutions of
// x^M = y^N z^P, and counts those whose entries are not all powers of one
// common element (equivalently: some pair fails to commute).
PowerEquationReport ls_bruteforce(int maxlen, const std::vector<int>& expset);

}  // namespace deligne
