#include "deligne/oriented.hpp"

namespace deligne {

std::vector<CoxElem> trajectory(const SignedWord& sw) {
  std::vector<CoxElem> verts;
  verts.reserve(sw.letters.size() + 1);
  verts.push_back(sw.base);
  CoxeterType t = sw.base.type();
  for (const SignedLetter& letter : sw.letters) {
    verts.push_back(compose(verts.back(), CoxElem::generator(t, letter.gen)));
  }
  return verts;
}

bool is_closed(const SignedWord& sw) {
  return trajectory(sw).back() == sw.base;
}

std::vector<int> as_letters(const SignedWord& sw) {
  std::vector<int> out;
  out.reserve(sw.letters.size());
  for (const SignedLetter& letter : sw.letters) {
    out.push_back(letter.sign >= 0 ? letter.gen : -letter.gen);
  }
  return out;
}

GenSet word_support(const SignedWord& sw) {
  CoxeterType t = sw.base.type();
  GenSet set = 0;
  for (const SignedLetter& letter : sw.letters) {
    if (letter.gen < 1 || letter.gen > int(t.rank)) {
      throw UnknownGenerator("word_support: letter " +
                             std::to_string(letter.gen));
    }
    set |= gen_bit(letter.gen);
  }
  return set;
}

SignedWord retract_path(const SignedWord& sw, const Face& F) {
  if (sw.base.type() != F.ctype) {
    throw TypeMismatch("retract_path: path and face types differ");
  }
  CoxeterType t = F.ctype;
  std::vector<CoxElem> verts = trajectory(sw);
  SignedWord out;
  out.base = gate_vertex(verts.front(), F);
  CoxElem prev_gate = out.base;
  for (std::size_t i = 0; i < sw.letters.size(); ++i) {
    CoxElem next_gate = gate_vertex(verts[i + 1], F);
    if (next_gate == prev_gate) continue;
    // Gates of adjacent chambers are adjacent inside the coset, along a
    // letter of the face's parabolic type.
    CoxElem step = compose(inverse(prev_gate), next_gate);
    int emitted = 0;
    for (int s = 1; s <= int(t.rank); ++s) {
      if (gen_in(F.ftype, s) && step == CoxElem::generator(t, s)) {
        emitted = s;
        break;
      }
    }
    if (emitted == 0) {
      throw Error("InternalInvariant",
                  "retract_path: gate step is not a face letter");
    }
    out.letters.push_back(SignedLetter{emitted, sw.letters[i].sign});
    prev_gate = next_gate;
  }
  return out;
}

}  // namespace deligne
