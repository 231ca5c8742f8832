#include "deligne/freegrp.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

namespace deligne {

namespace {

void validate_rank(int rank) {
  if (rank < 1 || rank > kMaxRank) {
    throw IndexOutOfRange("free-group rank " + std::to_string(rank) +
                          " outside 1.." + std::to_string(kMaxRank));
  }
}

void validate_letter(int rank, int letter) {
  int idx = letter > 0 ? letter : -letter;
  if (letter == 0 || idx > rank) {
    throw IndexOutOfRange("free-group letter " + std::to_string(letter) +
                          " outside rank " + std::to_string(rank));
  }
}

void push_reduced(std::vector<int>& out, int letter) {
  if (!out.empty() && out.back() == -letter) {
    out.pop_back();
  } else {
    out.push_back(letter);
  }
}

// Cached full contexts, keyed by rank, for the two families this module
// moves between.
GarsideCtxPtr full_context(Family f, int rank) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, GarsideCtxPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(int(f), rank);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  CoxeterType t{f, std::uint8_t(rank)};
  GarsideCtxPtr c = GarsideContext::make(t, all_generators(t));
  cache.emplace(key, c);
  return c;
}

// Signed generator letters of a Garside element, read off its irreducible
// left fraction (both halves positive, factors expanded to reduced words).
std::vector<int> signed_letters(const GarsideElem& g) {
  auto positive_letters = [](const GarsideElem& h) {
    std::vector<int> out;
    std::vector<int> w0_word = reduced_word(h.ctx->w0());
    for (int k = 0; k < h.inf; ++k)
      out.insert(out.end(), w0_word.begin(), w0_word.end());
    for (const CoxElem& f : h.factors) {
      std::vector<int> fw = reduced_word(f);
      out.insert(out.end(), fw.begin(), fw.end());
    }
    return out;
  };
  auto [p, q] = left_fraction(g);
  std::vector<int> lp = positive_letters(p);
  std::vector<int> out;
  out.reserve(lp.size() + 8);
  for (auto it = lp.rbegin(); it != lp.rend(); ++it) out.push_back(-*it);
  for (int letter : positive_letters(q)) out.push_back(letter);
  return out;
}

// Image of the generator b_j under the action of the i-th braid letter
// (inverse action when inv is set), appended unreduced.
void letter_image(int i, bool inv, int j, std::vector<int>& out) {
  if (i == 1) {
    if (j == 1) {
      out.push_back(1);
    } else if (!inv) {
      out.push_back(-1);
      out.push_back(j);
    } else {
      out.push_back(1);
      out.push_back(j);
    }
    return;
  }
  if (!inv) {
    if (j == i - 1) {
      out.push_back(i);
    } else if (j == i) {
      out.push_back(i);
      out.push_back(-(i - 1));
      out.push_back(i);
    } else {
      out.push_back(j);
    }
  } else {
    if (j == i - 1) {
      out.push_back(i - 1);
      out.push_back(-i);
      out.push_back(i - 1);
    } else if (j == i) {
      out.push_back(i - 1);
    } else {
      out.push_back(j);
    }
  }
}

// One braid letter acting on a whole free word.
FreeWord apply_letter(int i, bool inv, const FreeWord& x) {
  std::vector<int> image;
  image.reserve(x.letters.size() * 3);
  std::vector<int> one;
  for (int letter : x.letters) {
    one.clear();
    letter_image(i, inv, letter > 0 ? letter : -letter, one);
    if (letter > 0) {
      for (int m : one) push_reduced(image, m);
    } else {
      for (auto it = one.rbegin(); it != one.rend(); ++it)
        push_reduced(image, -*it);
    }
  }
  FreeWord out;
  out.rank = x.rank;
  out.letters = std::move(image);
  return out;
}

bool is_full_type_a(const GarsideCtxPtr& c, int rank) {
  return c->ctype().family == Family::A && c->ctype().rank == rank &&
         c->gens() == all_generators(c->ctype());
}

}  // namespace

// --- free words --------------------------------------------------------------

FreeWord FreeWord::identity(int rank) {
  validate_rank(rank);
  FreeWord w;
  w.rank = rank;
  return w;
}

FreeWord FreeWord::generator(int rank, int i) {
  validate_rank(rank);
  validate_letter(rank, i);
  if (i < 0) throw IndexOutOfRange("generator index must be positive");
  FreeWord w;
  w.rank = rank;
  w.letters.push_back(i);
  return w;
}

FreeWord fw_from_letters(int rank, const std::vector<int>& letters) {
  validate_rank(rank);
  FreeWord w;
  w.rank = rank;
  for (int letter : letters) {
    validate_letter(rank, letter);
    push_reduced(w.letters, letter);
  }
  return w;
}

FreeWord fw_multiply(const FreeWord& x, const FreeWord& y) {
  if (x.rank != y.rank)
    throw TypeMismatch("free words of different ranks");
  FreeWord out;
  out.rank = x.rank;
  out.letters = x.letters;
  for (int letter : y.letters) push_reduced(out.letters, letter);
  return out;
}

FreeWord fw_inverse(const FreeWord& x) {
  FreeWord out;
  out.rank = x.rank;
  out.letters.reserve(x.letters.size());
  for (auto it = x.letters.rbegin(); it != x.letters.rend(); ++it)
    out.letters.push_back(-*it);
  return out;
}

FreeWord fw_power(const FreeWord& x, int k) {
  FreeWord base = k < 0 ? fw_inverse(x) : x;
  int reps = k < 0 ? -k : k;
  FreeWord out = FreeWord::identity(x.rank);
  for (int r = 0; r < reps; ++r) out = fw_multiply(out, base);
  return out;
}

std::string fw_to_string(const FreeWord& x) {
  if (x.letters.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < x.letters.size(); ++i) {
    if (i) out += '.';
    int letter = x.letters[i];
    out += 'b';
    out += std::to_string(letter > 0 ? letter : -letter);
    if (letter < 0) out += "^-1";
  }
  return out;
}

// --- automorphisms -----------------------------------------------------------

FreeAut FreeAut::identity(int rank) {
  validate_rank(rank);
  FreeAut f;
  f.rank = rank;
  for (int i = 1; i <= rank; ++i) {
    f.images.push_back(FreeWord::generator(rank, i));
    f.inverse_images.push_back(FreeWord::generator(rank, i));
  }
  return f;
}

FreeWord aut_apply(const FreeAut& f, const FreeWord& x) {
  if (f.rank != x.rank)
    throw TypeMismatch("automorphism and word of different ranks");
  FreeWord out = FreeWord::identity(x.rank);
  for (int letter : x.letters) {
    const FreeWord& img = f.images[std::size_t((letter > 0 ? letter : -letter) - 1)];
    out = fw_multiply(out, letter > 0 ? img : fw_inverse(img));
  }
  return out;
}

FreeAut make_free_aut(std::vector<FreeWord> images,
                      std::vector<FreeWord> inverse_images) {
  if (images.empty() || images.size() != inverse_images.size())
    throw HypothesisViolation("image lists empty or of different sizes");
  int rank = int(images.size());
  FreeAut f;
  f.rank = rank;
  f.images = std::move(images);
  f.inverse_images = std::move(inverse_images);
  FreeAut inv;
  inv.rank = rank;
  inv.images = f.inverse_images;
  inv.inverse_images = f.images;
  for (int i = 1; i <= rank; ++i) {
    FreeWord g = FreeWord::generator(rank, i);
    if (aut_apply(f, aut_apply(inv, g)) != g ||
        aut_apply(inv, aut_apply(f, g)) != g) {
      throw HypothesisViolation(
          "stated inverse images do not invert the automorphism");
    }
  }
  return f;
}

FreeAut aut_compose(const FreeAut& f, const FreeAut& g) {
  if (f.rank != g.rank)
    throw TypeMismatch("automorphisms of different ranks");
  std::vector<FreeWord> images, inverse_images;
  for (int i = 0; i < f.rank; ++i) {
    images.push_back(aut_apply(f, g.images[std::size_t(i)]));
    // (f g)^{-1} = g^{-1} f^{-1}.
    FreeAut ginv;
    ginv.rank = g.rank;
    ginv.images = g.inverse_images;
    ginv.inverse_images = g.images;
    inverse_images.push_back(
        aut_apply(ginv, f.inverse_images[std::size_t(i)]));
  }
  return make_free_aut(std::move(images), std::move(inverse_images));
}

FreeAut aut_inverse(const FreeAut& f) {
  FreeAut inv;
  inv.rank = f.rank;
  inv.images = f.inverse_images;
  inv.inverse_images = f.images;
  return inv;
}

FreeAut rho_generator(int i, int n) {
  int rank = n - 1;
  validate_rank(rank);
  if (i < 1 || i > rank) {
    throw IndexOutOfRange("braid generator " + std::to_string(i) +
                          " outside 1.." + std::to_string(rank));
  }
  std::vector<FreeWord> images, inverse_images;
  std::vector<int> buf;
  for (int j = 1; j <= rank; ++j) {
    buf.clear();
    letter_image(i, false, j, buf);
    images.push_back(fw_from_letters(rank, buf));
    buf.clear();
    letter_image(i, true, j, buf);
    inverse_images.push_back(fw_from_letters(rank, buf));
  }
  return make_free_aut(std::move(images), std::move(inverse_images));
}

FreeWord apply(const GarsideElem& b, const FreeWord& x) {
  if (!is_full_type_a(b.ctx, x.rank)) {
    throw TypeMismatch(
        "braid element does not act on a free group of this rank");
  }
  std::vector<int> letters = signed_letters(b);
  FreeWord out = x;
  // Letters act on the right operand first so that the action of a product
  // is the composite of the actions.
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    out = apply_letter(*it > 0 ? *it : -*it, *it < 0, out);
  }
  return out;
}

// --- the semidirect product ----------------------------------------------------

SemidirectElem semi_identity(GarsideCtxPtr braid_ctx) {
  int rank = braid_ctx->ctype().rank;
  if (!is_full_type_a(braid_ctx, rank))
    throw TypeMismatch("braid context must be a full type-A context");
  return SemidirectElem{FreeWord::identity(rank),
                        GarsideElem::identity(std::move(braid_ctx))};
}

SemidirectElem semi_multiply(const SemidirectElem& x, const SemidirectElem& y) {
  if (x.a.rank != y.a.rank || !x.b.ctx->same_group(*y.b.ctx))
    throw TypeMismatch("semidirect elements of different groups");
  return SemidirectElem{fw_multiply(x.a, apply(x.b, y.a)),
                        multiply(x.b, y.b)};
}

SemidirectElem semi_inverse(const SemidirectElem& x) {
  GarsideElem binv = inverse(x.b);
  return SemidirectElem{apply(binv, fw_inverse(x.a)), binv};
}

bool semi_equal(const SemidirectElem& x, const SemidirectElem& y) {
  return x.a == y.a && equals(x.b, y.b);
}

std::string semi_to_string(const SemidirectElem& x) {
  return "(" + fw_to_string(x.a) + ", " + garside_to_string(x.b) + ")";
}

// --- dictionaries -------------------------------------------------------------

namespace {

// Signed delta-letter word for the image of b_i:
// d_{i+1} ... d_3 . d_1 d_2^{-1} . d_3^{-1} ... d_{i+1}^{-1}.
std::vector<int> beta_word_in_dn(int i) {
  std::vector<int> out;
  for (int k = i + 1; k >= 3; --k) out.push_back(k);
  out.push_back(1);
  out.push_back(-2);
  for (int k = 3; k <= i + 1; ++k) out.push_back(-k);
  return out;
}

GarsideElem semi_to_dn_impl(const SemidirectElem& s,
                            const std::vector<int>& beta1_word) {
  int rank = s.a.rank;
  if (s.b.ctx->ctype().rank != rank || !is_full_type_a(s.b.ctx, rank))
    throw TypeMismatch("semidirect element with mismatched components");
  GarsideCtxPtr dn = full_context(Family::D, rank + 1);
  std::vector<int> word;
  for (int letter : s.a.letters) {
    int i = letter > 0 ? letter : -letter;
    std::vector<int> img = i == 1 ? beta1_word : beta_word_in_dn(i);
    if (letter > 0) {
      word.insert(word.end(), img.begin(), img.end());
    } else {
      for (auto it = img.rbegin(); it != img.rend(); ++it)
        word.push_back(-*it);
    }
  }
  for (int letter : signed_letters(s.b)) {
    word.push_back(letter > 0 ? letter + 1 : letter - 1);
  }
  return from_word(dn, word);
}

}  // namespace

SemidirectElem dn_to_semi(const GarsideElem& g) {
  CoxeterType t = g.ctx->ctype();
  if (t.family != Family::D || g.ctx->gens() != all_generators(t))
    throw TypeMismatch("input must lie in a full type-D context");
  int rank = t.rank - 1;
  validate_rank(rank);
  GarsideCtxPtr braid = full_context(Family::A, rank);
  SemidirectElem out = semi_identity(braid);
  SemidirectElem d1{FreeWord::generator(rank, 1), from_word(braid, {1})};
  SemidirectElem d1inv = semi_inverse(d1);
  for (int letter : signed_letters(g)) {
    int i = letter > 0 ? letter : -letter;
    if (i == 1) {
      out = semi_multiply(out, letter > 0 ? d1 : d1inv);
    } else {
      SemidirectElem gi{FreeWord::identity(rank),
                        from_word(braid, {letter > 0 ? i - 1 : -(i - 1)})};
      out = semi_multiply(out, gi);
    }
  }
  return out;
}

GarsideElem semi_to_dn(const SemidirectElem& s) {
  return semi_to_dn_impl(s, beta_word_in_dn(1));
}

// --- isomorphism verification ---------------------------------------------------

IsomorphismReport verify_isomorphism(int n, bool corrupt_for_selftest) {
  if (n < 3 || n > 6) {
    throw IndexOutOfRange("isomorphism verification supports ranks 3..6");
  }
  IsomorphismReport rep;
  rep.n = n;
  int rank = n - 1;
  CoxeterType dt{Family::D, std::uint8_t(n)};
  CoxeterType at{Family::A, std::uint8_t(rank)};
  GarsideCtxPtr dn = full_context(Family::D, n);
  GarsideCtxPtr braid = full_context(Family::A, rank);

  std::vector<int> beta1 = beta_word_in_dn(1);
  if (corrupt_for_selftest) beta1 = {1, 2};  // drops the inverse: wrong image
  auto to_dn = [&](const SemidirectElem& s) {
    return semi_to_dn_impl(s, beta1);
  };
  auto beta_elem = [&](int i) {
    return SemidirectElem{FreeWord::generator(rank, i),
                          GarsideElem::identity(braid)};
  };
  auto alpha_elem = [&](int i) {
    return SemidirectElem{FreeWord::identity(rank), from_word(braid, {i})};
  };

  // (a) both composites fix every generator.
  rep.generators_roundtrip = true;
  for (int i = 1; i <= n; ++i) {
    GarsideElem di = from_word(dn, {i});
    if (!equals(to_dn(dn_to_semi(di)), di)) {
      rep.generators_roundtrip = false;
      rep.failures.push_back("round trip moved d" + std::to_string(i));
    }
  }
  for (int i = 1; i <= rank; ++i) {
    if (!semi_equal(dn_to_semi(to_dn(beta_elem(i))), beta_elem(i))) {
      rep.generators_roundtrip = false;
      rep.failures.push_back("round trip moved b" + std::to_string(i));
    }
    if (!semi_equal(dn_to_semi(to_dn(alpha_elem(i))), alpha_elem(i))) {
      rep.generators_roundtrip = false;
      rep.failures.push_back("round trip moved a" + std::to_string(i));
    }
  }

  // (b) every type-D braid relator evaluated in the semidirect model.
  rep.dn_relations_hold = true;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      int m = coxeter_m(dt, i, j);
      SemidirectElem lhs = semi_identity(braid), rhs = lhs;
      for (int k = 0; k < m; ++k) {
        lhs = semi_multiply(lhs, dn_to_semi(from_word(dn, {k % 2 ? j : i})));
        rhs = semi_multiply(rhs, dn_to_semi(from_word(dn, {k % 2 ? i : j})));
      }
      if (!semi_equal(lhs, rhs)) {
        rep.dn_relations_hold = false;
        rep.failures.push_back("relator d" + std::to_string(i) + ",d" +
                               std::to_string(j) + " broke in the model");
      }
    }
  }

  // (c) every defining relation of the model evaluated in A(D_n): braid
  // relators plus the action relations a_i b_j a_i^{-1} = rho(a_i)(b_j).
  rep.semidirect_relations_hold = true;
  for (int i = 1; i <= rank; ++i) {
    for (int j = i + 1; j <= rank; ++j) {
      int m = coxeter_m(at, i, j);
      GarsideElem lhs = GarsideElem::identity(dn), rhs = lhs;
      for (int k = 0; k < m; ++k) {
        lhs = multiply(lhs, to_dn(alpha_elem(k % 2 ? j : i)));
        rhs = multiply(rhs, to_dn(alpha_elem(k % 2 ? i : j)));
      }
      if (!equals(lhs, rhs)) {
        rep.semidirect_relations_hold = false;
        rep.failures.push_back("relator a" + std::to_string(i) + ",a" +
                               std::to_string(j) + " broke in the target");
      }
    }
  }
  for (int i = 1; i <= rank; ++i) {
    FreeAut rho = rho_generator(i, n);
    GarsideElem ai = to_dn(alpha_elem(i));
    for (int j = 1; j <= rank; ++j) {
      GarsideElem lhs =
          multiply(multiply(ai, to_dn(beta_elem(j))), inverse(ai));
      SemidirectElem image{rho.images[std::size_t(j - 1)],
                           GarsideElem::identity(braid)};
      if (!equals(lhs, to_dn(image))) {
        rep.semidirect_relations_hold = false;
        rep.failures.push_back("action of a" + std::to_string(i) + " on b" +
                               std::to_string(j) + " broke in the target");
      }
    }
  }
  return rep;
}

// --- hexagon reduction ----------------------------------------------------------

bool FreeEquationSides::balanced() const {
  return lhs_free == rhs_free && equals(lhs_braid, rhs_braid);
}

FreeEquationSides hexagon_to_free_equation(const GarsideElem& w1,
                                           const GarsideElem& w2,
                                           const GarsideElem& w3, int k1,
                                           int k2, int k3) {
  CoxeterType t = w1.ctx->ctype();
  if (t.family != Family::D || w1.ctx->gens() != all_generators(t))
    throw TypeMismatch("words must lie in a full type-D context");
  const GarsideElem* ws[3] = {&w1, &w2, &w3};
  GenSet hat1 = all_generators(t) & ~gen_bit(1);
  for (int i = 0; i < 3; ++i) {
    if (!w1.ctx->same_group(*ws[i]->ctx))
      throw TypeMismatch("words lie in different ambient groups");
    if (!parabolic_membership(*ws[i], hat1)) {
      throw NotInParabolic(
          "word " + std::to_string(i) +
              " has letters outside the parabolic omitting the first "
              "generator",
          i);
    }
  }
  int rank = t.rank - 1;
  GarsideCtxPtr braid = full_context(Family::A, rank);
  GarsideElem c[3];
  for (int i = 0; i < 3; ++i) c[i] = dn_to_semi(*ws[i]).b;

  FreeWord b1 = FreeWord::generator(rank, 1);
  GarsideElem a1 = from_word(braid, {1});

  FreeEquationSides out;
  out.lhs_free = fw_power(apply(c[0], b1), k1);
  out.lhs_braid = multiply(multiply(c[0], power(a1, k1)), c[1]);
  GarsideElem twist = multiply(power(a1, -k3), inverse(c[2]));
  out.rhs_free =
      fw_multiply(fw_power(b1, -k3), fw_power(apply(twist, b1), -k2));
  out.rhs_braid = multiply(twist, power(a1, -k2));
  return out;
}

// --- power equations ------------------------------------------------------------

bool ls_check(const FreeWord& x, const FreeWord& y, const FreeWord& z, int M,
              int N, int P) {
  return fw_power(x, M) == fw_multiply(fw_power(y, N), fw_power(z, P));
}

PowerEquationReport ls_bruteforce(int maxlen, const std::vector<int>& expset) {
  if (maxlen < 0) throw IndexOutOfRange("negative word length bound");
  for (int e : expset) {
    if (e < 2)
      throw HypothesisViolation("exponents below 2 make every pair solvable");
  }
  // All freely reduced words of F_2 up to the length bound, by extension.
  std::vector<FreeWord> words{FreeWord::identity(2)};
  std::size_t layer_begin = 0;
  for (int len = 1; len <= maxlen; ++len) {
    std::size_t layer_end = words.size();
    for (std::size_t w = layer_begin; w < layer_end; ++w) {
      for (int letter : {1, -1, 2, -2}) {
        if (!words[w].letters.empty() && words[w].letters.back() == -letter)
          continue;
        FreeWord ext = words[w];
        ext.letters.push_back(letter);
        words.push_back(std::move(ext));
      }
    }
    layer_begin = layer_end;
  }

  auto commute = [](const FreeWord& u, const FreeWord& v) {
    return fw_multiply(u, v) == fw_multiply(v, u);
  };

  PowerEquationReport rep;
  for (const FreeWord& x : words) {
    for (int M : expset) {
      FreeWord xm = fw_power(x, M);
      for (const FreeWord& y : words) {
        for (int N : expset) {
          FreeWord yn = fw_power(y, N);
          for (const FreeWord& z : words) {
            for (int P : expset) {
              ++rep.equations_checked;
              if (xm != fw_multiply(yn, fw_power(z, P))) continue;
              ++rep.solutions_found;
              if (commute(x, y) && commute(x, z) && commute(y, z)) continue;
              ++rep.noncyclic_solutions;
              if (rep.counterexamples.size() < 16) {
                rep.counterexamples.push_back(
                    fw_to_string(x) + "^" + std::to_string(M) + " = " +
                    fw_to_string(y) + "^" + std::to_string(N) + " . " +
                    fw_to_string(z) + "^" + std::to_string(P));
              }
            }
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace deligne
