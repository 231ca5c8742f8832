#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "deligne/coxeter.hpp"
#include "deligne/error.hpp"

namespace deligne {

// ---------------------------------------------------------------------------
// Garside-theoretic engine for the Artin groups attached to finite Coxeter
// groups of types A and D (and their standard parabolic subgroups).
//
// Elements are kept in left-greedy normal form Δ^inf · f_1 ⋯ f_m, where the
// factors f_i are simple elements (lifts of nontrivial Coxeter elements,
// never the longest element) and every consecutive pair is left-weighted.
// The representation is unique, so structural equality decides the word
// problem.
// ---------------------------------------------------------------------------

class GarsideContext;
using GarsideCtxPtr = std::shared_ptr<const GarsideContext>;

// Ambient group data shared by all elements of one Artin group: the
// (signed-)permutation realization of the Coxeter group and the generator
// subset.  Contexts with equal (type, gens) describe the same group.
class GarsideContext {
 public:
  static GarsideCtxPtr make(CoxeterType t, GenSet gens);

  CoxeterType ctype() const { return ctype_; }
  GenSet gens() const { return gens_; }
  const CoxElem& w0() const { return w0_; }
  int w0_length() const { return w0_length_; }

  // Conjugation by the longest element (the diagram automorphism tau).
  CoxElem tau(const CoxElem& x) const;
  // Whether tau is trivial, i.e. w0 is central in the Coxeter group.
  bool tau_trivial() const { return tau_trivial_; }

  bool same_group(const GarsideContext& other) const {
    return ctype_ == other.ctype_ && gens_ == other.gens_;
  }

 private:
  GarsideContext(CoxeterType t, GenSet gens);

  CoxeterType ctype_;
  GenSet gens_;
  CoxElem w0_;
  int w0_length_;
  bool tau_trivial_;
};

struct GarsideElem {
  GarsideCtxPtr ctx;
  int inf = 0;                   // leading Delta exponent
  std::vector<CoxElem> factors;  // left-weighted simple factors

  static GarsideElem identity(GarsideCtxPtr c);

  bool is_identity() const { return inf == 0 && factors.empty(); }
  // Positive elements are exactly those with nonnegative Delta exponent.
  bool is_positive() const { return inf >= 0; }
  int canonical_length() const { return int(factors.size()); }
  int sup() const { return inf + canonical_length(); }

  // Structural equality (false when the ambient groups differ).
  friend bool operator==(const GarsideElem& a, const GarsideElem& b) {
    return a.ctx->same_group(*b.ctx) && a.inf == b.inf &&
           a.factors == b.factors;
  }
};

// Total order used for deterministic enumeration and reports:
// (inf, number of factors, factor images lexicographically).
bool ball_order_less(const GarsideElem& a, const GarsideElem& b);

// Printable form, e.g. "D^-1.[2,1,3,4].[1,-2,...]" (factors by image).
std::string garside_to_string(const GarsideElem& g);

// --- Construction ----------------------------------------------------------

// Normal form of a word in the generators; negative letters are inverses.
// Throws UnknownGenerator for letters outside the context.
GarsideElem from_word(GarsideCtxPtr c, const std::vector<int>& letters);

// Positive lift of a Coxeter element of the context's group.
GarsideElem from_cox(GarsideCtxPtr c, const CoxElem& w);

// Delta^k.
GarsideElem delta_power(GarsideCtxPtr c, int k);

// --- Group operations ------------------------------------------------------

GarsideElem multiply(const GarsideElem& g, const GarsideElem& h);
GarsideElem inverse(const GarsideElem& g);
GarsideElem power(const GarsideElem& g, int k);

// Word-problem decision; throws TypeMismatch when ambient groups differ.
bool equals(const GarsideElem& g, const GarsideElem& h);

// Image in the Coxeter group (the quotient homomorphism).
CoxElem cox_image(const GarsideElem& g);

// --- Garside structure -----------------------------------------------------

// Positive lift of the longest element of W_T.
GarsideElem garside_element(GarsideCtxPtr c, GenSet T);

// Smallest positive power of the T-Garside element that is central in the
// parabolic A_T (exponent 1 or 2, verified by conjugating the generators).
GarsideElem central_power(GarsideCtxPtr c, GenSet T);

// Set of letters of a positive word (invariant across defining relations).
// Throws NegativeLetter on letters <= 0 and UnknownGenerator on letters
// outside the context.
GenSet positive_support(const GarsideCtxPtr& c, const std::vector<int>& letters);

// Greatest common left-divisor / least common multiple w.r.t. left
// divisibility, for positive inputs.
GarsideElem left_gcd(const GarsideElem& p, const GarsideElem& q);
GarsideElem left_lcm(const GarsideElem& p, const GarsideElem& q);

// The unique irreducible left fraction g = p^{-1} q (p, q positive with
// trivial common left divisor).
std::pair<GarsideElem, GarsideElem> left_fraction(const GarsideElem& g);

// Exact parabolic membership: g in A_X, decided via the irreducible left
// fraction's letter support.
bool parabolic_membership(const GarsideElem& g, GenSet X);

// Bounded semi-decision of g in A_X · A_Y: returns a in A_X with
// a^{-1} g in A_Y, searching X-elements of canonical length <= radius.
// Empty result does NOT certify non-membership.
std::optional<GarsideElem> product_membership_witness(const GarsideElem& g,
                                                      GenSet X, GenSet Y,
                                                      int radius);

inline constexpr std::size_t kMaxBallEnum = 2'000'000;

// All elements with inf in [-radius, radius] and at most `radius` canonical
// factors, each exactly once, in ball order.  Throws BallTooLarge when the
// output would exceed the cap.
std::vector<GarsideElem> enumerate_ball(GarsideCtxPtr c, int radius,
                                        std::size_t cap = kMaxBallEnum);

// Re-express an element of a sub-context (generator subset) in an ambient
// context over the same Coxeter type.  Throws TypeMismatch unless the
// sub-context's generators are contained in the ambient's.
GarsideElem promote(const GarsideElem& g, GarsideCtxPtr ambient);

}  // namespace deligne
