#pragma once

#include <vector>

#include "deligne/coxeter.hpp"
#include "deligne/error.hpp"

namespace deligne {

// ---------------------------------------------------------------------------
// Signed edge paths in the chamber graph.  A path starts at a base chamber
// and walks one generator per step; each letter additionally carries an
// orientation sign (the second coordinate of the oriented complex), which the
// vertex trajectory ignores but retraction preserves.
// ---------------------------------------------------------------------------

struct SignedLetter {
  int gen;   // generator index
  int sign;  // +1 or -1

  friend bool operator==(const SignedLetter&, const SignedLetter&) = default;
};

struct SignedWord {
  CoxElem base;
  std::vector<SignedLetter> letters;

  friend bool operator==(const SignedWord&, const SignedWord&) = default;
};

// Vertex sequence w_0 = base, w_{i+1} = w_i * s_i; length = letters + 1.
// Throws UnknownGenerator on letters outside the base's type.
std::vector<CoxElem> trajectory(const SignedWord& sw);

// Whether the trajectory returns to its base chamber.
bool is_closed(const SignedWord& sw);

// Letters as signed generator indices (gen * sign), the form consumed by the
// group-level word constructors.
std::vector<int> as_letters(const SignedWord& sw);

// Set of letters used, ignoring signs.
GenSet word_support(const SignedWord& sw);

// Retraction of the path onto the standard subcomplex of face F: the base
// moves to its gate, and each edge {w, w*s} maps to the edge between the two
// gates — dropped when the gates agree, and otherwise emitted as the letter
// t in F's parabolic type with gate(w)*t = gate(w*s), keeping the sign.
// The output trajectory lies inside F's coset.
SignedWord retract_path(const SignedWord& sw, const Face& F);

}  // namespace deligne
