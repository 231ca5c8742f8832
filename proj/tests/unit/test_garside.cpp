#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "deligne/coxeter.hpp"
#include "deligne/error.hpp"
#include "deligne/garside.hpp"
#include "doctest.h"

namespace {

using namespace deligne;

constexpr CoxeterType kA1{Family::A, 1};
constexpr CoxeterType kA2{Family::A, 2};
constexpr CoxeterType kA3{Family::A, 3};
constexpr CoxeterType kD4{Family::D, 4};
constexpr CoxeterType kD5{Family::D, 5};

GarsideCtxPtr full_ctx(CoxeterType t) {
  return GarsideContext::make(t, all_generators(t));
}

std::string key_of(const GarsideElem& g) { return garside_to_string(g); }

// Canonicality checker used on every produced normal form: factors avoid the
// identity and the Garside element, and consecutive pairs are left-weighted.
bool is_canonical(const GarsideElem& g) {
  const GarsideContext& c = *g.ctx;
  for (const CoxElem& f : g.factors) {
    if (f.is_identity() || f == c.w0()) return false;
  }
  for (std::size_t i = 0; i + 1 < g.factors.size(); ++i) {
    for (int s = 1; s <= int(c.ctype().rank); ++s) {
      if (!gen_in(c.gens(), s)) continue;
      if (is_left_descent(g.factors[i + 1], s) &&
          !is_right_descent(g.factors[i], s)) {
        return false;
      }
    }
  }
  return true;
}

// Sum of letter signs: the image under the homomorphism onto the integers
// sending every generator to 1 (the defining relations are balanced).
int letter_sum(const std::vector<int>& word) {
  int sum = 0;
  for (int letter : word) sum += letter > 0 ? 1 : -1;
  return sum;
}

int norm_letter_count(const GarsideElem& g) {
  int total = g.inf * g.ctx->w0_length();
  for (const CoxElem& f : g.factors) total += length(f);
  return total;
}

std::vector<int> random_signed_word(std::mt19937_64& rng, int rank, int len) {
  std::uniform_int_distribution<int> gen_dist(1, rank);
  std::uniform_int_distribution<int> sign_dist(0, 1);
  std::vector<int> word;
  word.reserve(len);
  for (int i = 0; i < len; ++i) {
    int s = gen_dist(rng);
    word.push_back(sign_dist(rng) ? s : -s);
  }
  return word;
}

// Applies `moves` random relation-preserving rewrites to the word: free
// insertion/cancellation, commutation swaps (m = 2), and braid replacements
// (m = 3, applied to equal-signed triples in either direction).
std::vector<int> mutate_word(std::vector<int> word, CoxeterType t,
                             std::mt19937_64& rng, int moves) {
  std::uniform_int_distribution<int> op_dist(0, 3);
  std::uniform_int_distribution<int> gen_dist(1, t.rank);
  std::uniform_int_distribution<int> sign_dist(0, 1);
  for (int m = 0; m < moves; ++m) {
    for (int attempt = 0; attempt < 16; ++attempt) {
      int op = op_dist(rng);
      if (op == 0) {  // insert s s^{-1} or s^{-1} s
        std::uniform_int_distribution<std::size_t> pos(0, word.size());
        std::size_t p = pos(rng);
        int s = gen_dist(rng);
        int sign = sign_dist(rng) ? 1 : -1;
        word.insert(word.begin() + p, {sign * s, -sign * s});
        break;
      }
      if (word.size() < 2) continue;
      std::uniform_int_distribution<std::size_t> pos(0, word.size() - 2);
      std::size_t p = pos(rng);
      if (op == 1) {  // delete an adjacent cancelling pair
        if (word[p] != -word[p + 1]) continue;
        word.erase(word.begin() + p, word.begin() + p + 2);
        break;
      }
      if (op == 2) {  // swap commuting letters
        if (coxeter_m(t, std::abs(word[p]), std::abs(word[p + 1])) != 2) {
          continue;
        }
        std::swap(word[p], word[p + 1]);
        break;
      }
      // braid replacement x y x -> y x y on an equal-signed triple
      if (p + 2 >= word.size()) continue;
      int x = word[p], y = word[p + 1];
      if (word[p + 2] != x || std::abs(x) == std::abs(y)) continue;
      if ((x > 0) != (y > 0)) continue;
      if (coxeter_m(t, std::abs(x), std::abs(y)) != 3) continue;
      word[p] = y;
      word[p + 1] = x;
      word[p + 2] = y;
      break;
    }
  }
  return word;
}

// --- Independent oracle: the positive words of the two-generator braid
// monoid, partitioned into equivalence classes by exhaustively closing under
// the single defining relation 121 <-> 212 (applied at every position).
struct PositiveClosure {
  std::map<std::vector<int>, int> component;
  std::vector<std::vector<int>> representative;

  explicit PositiveClosure(int max_len) {
    std::vector<std::vector<int>> all;
    std::vector<int> cur;
    build(all, cur, max_len);
    for (const auto& w : all) {
      if (component.count(w)) continue;
      int id = int(representative.size());
      representative.push_back(w);
      // breadth-first closure under single-position rewrites
      std::vector<std::vector<int>> frontier{w};
      component[w] = id;
      while (!frontier.empty()) {
        std::vector<std::vector<int>> next;
        for (const auto& u : frontier) {
          for (std::size_t i = 0; i + 2 < u.size(); ++i) {
            if (u[i] == u[i + 2] && u[i] != u[i + 1]) {
              std::vector<int> v = u;
              std::swap(v[i], v[i + 1]);
              v[i + 2] = v[i];
              if (!component.count(v)) {
                component[v] = id;
                next.push_back(v);
              }
            }
          }
        }
        frontier = std::move(next);
      }
    }
  }

  void build(std::vector<std::vector<int>>& all, std::vector<int>& cur,
             int remaining) {
    if (!cur.empty()) all.push_back(cur);
    if (remaining == 0) return;
    for (int s = 1; s <= 2; ++s) {
      cur.push_back(s);
      build(all, cur, remaining - 1);
      cur.pop_back();
    }
  }
};

// Enumerates all positive words over two letters of the given length.
std::vector<std::vector<int>> positive_words_a2(int len) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(len, 1);
  for (int mask = 0; mask < (1 << len); ++mask) {
    for (int i = 0; i < len; ++i) cur[i] = ((mask >> i) & 1) ? 2 : 1;
    out.push_back(cur);
  }
  return out;
}

// Word-search divisibility oracle on positive elements: d left-divides p iff
// some positive word extends d to p.
bool brute_divides(const GarsideElem& d, const GarsideElem& p) {
  int diff = norm_letter_count(p) - norm_letter_count(d);
  if (diff < 0) return false;
  if (diff == 0) return d == p;
  int rank = d.ctx->ctype().rank;
  std::vector<int> word(diff, 1);
  while (true) {
    GarsideElem cand = multiply(d, from_word(d.ctx, word));
    if (cand == p) return true;
    int i = 0;
    while (i < diff && word[i] == rank) word[i++] = 1;
    if (i == diff) return false;
    ++word[i];
  }
}

}  // namespace

TEST_CASE("normal forms match the exhaustive positive closure oracle") {
  // Oracle first: equivalence classes of positive two-letter words under the
  // defining relation, computed by brute-force closure.
  PositiveClosure oracle(8);
  GarsideCtxPtr c = full_ctx(kA2);

  // Same class <=> same normal form; distinct classes <=> distinct forms.
  std::map<int, std::string> class_nf;
  std::map<std::string, int> nf_class;
  for (const auto& [word, id] : oracle.component) {
    GarsideElem g = from_word(c, word);
    CHECK(is_canonical(g));
    CHECK(g.is_positive());
    CHECK(norm_letter_count(g) == int(word.size()));
    std::string nf = key_of(g);
    auto [it, fresh] = class_nf.emplace(id, nf);
    if (!fresh) CHECK(it->second == nf);
    auto [jt, fresh2] = nf_class.emplace(nf, id);
    if (!fresh2) CHECK(jt->second == id);
  }
  // Pairwise word-problem agreement on all words of length <= 5.
  std::vector<std::vector<int>> words;
  for (int len = 1; len <= 5; ++len) {
    for (auto& w : positive_words_a2(len)) words.push_back(std::move(w));
  }
  std::vector<std::string> nfs;
  nfs.reserve(words.size());
  for (const auto& w : words) nfs.push_back(key_of(from_word(c, w)));
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = 0; j < words.size(); ++j) {
      bool same_class = oracle.component.at(words[i]) ==
                        oracle.component.at(words[j]);
      CHECK((nfs[i] == nfs[j]) == same_class);
    }
  }
}

TEST_CASE("quotient image and letter-sum grading of normal forms") {
  std::mt19937_64 rng(42);
  for (CoxeterType t : {kA3, kD4}) {
    GarsideCtxPtr c = full_ctx(t);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<int> word =
          random_signed_word(rng, t.rank, int(rng() % 13));
      GarsideElem g = from_word(c, word);
      CHECK(is_canonical(g));
      CHECK(norm_letter_count(g) == letter_sum(word));
      CoxElem expect = CoxElem::identity(t);
      for (int letter : word) {
        expect = compose(expect, CoxElem::generator(t, std::abs(letter)));
      }
      CHECK(cox_image(g) == expect);
    }
  }
}

TEST_CASE("basic words: cancellation, braid relation, delta powers") {
  GarsideCtxPtr a2 = full_ctx(kA2);
  CHECK(from_word(a2, {1, -1}).is_identity());
  CHECK(from_word(a2, {-2, 2}).is_identity());
  CHECK(from_word(a2, {}).is_identity());

  GarsideElem aba = from_word(a2, {1, 2, 1});
  GarsideElem bab = from_word(a2, {2, 1, 2});
  CHECK(equals(aba, bab));
  CHECK(aba.inf == 1);
  CHECK(aba.factors.empty());
  CHECK(equals(aba, delta_power(a2, 1)));
  CHECK(equals(aba, garside_element(a2, all_generators(kA2))));

  GarsideCtxPtr d4 = full_ctx(kD4);
  std::vector<int> coxeter_cubed;
  for (int rep = 0; rep < 3; ++rep) {
    for (int s = 1; s <= 4; ++s) coxeter_cubed.push_back(s);
  }
  GarsideElem big = from_word(d4, coxeter_cubed);
  CHECK(big.inf == 1);
  CHECK(big.factors.empty());
  CHECK(equals(big, garside_element(d4, all_generators(kD4))));

  CHECK_THROWS_AS((void)from_word(a2, {1, 3}), UnknownGenerator);
  CHECK_THROWS_AS((void)from_word(a2, {0}), UnknownGenerator);
  GarsideCtxPtr sub = GarsideContext::make(kD4, gen_bit(1) | gen_bit(2));
  CHECK_THROWS_AS((void)from_word(sub, {3}), UnknownGenerator);
}

TEST_CASE("group laws on random words") {
  std::mt19937_64 rng(42);
  GarsideCtxPtr d4 = full_ctx(kD4);
  GarsideElem id = GarsideElem::identity(d4);
  for (int trial = 0; trial < 150; ++trial) {
    GarsideElem g = from_word(d4, random_signed_word(rng, 4, 6));
    GarsideElem h = from_word(d4, random_signed_word(rng, 4, 6));
    GarsideElem k = from_word(d4, random_signed_word(rng, 4, 6));
    CHECK(equals(multiply(multiply(g, h), k), multiply(g, multiply(h, k))));
    CHECK(equals(multiply(g, inverse(g)), id));
    CHECK(equals(multiply(inverse(g), g), id));
    CHECK(equals(inverse(multiply(g, h)),
                 multiply(inverse(h), inverse(g))));
    CHECK(equals(multiply(g, id), g));
    CHECK(equals(multiply(id, g), g));
  }
  CHECK(equals(inverse(id), id));
  CHECK(equals(power(delta_power(d4, 1), -2), delta_power(d4, -2)));
  GarsideElem a = from_word(d4, {1});
  CHECK(equals(multiply(power(a, 5), power(a, -5)), id));
}

TEST_CASE("equal words stay equal under relation-preserving rewrites") {
  std::mt19937_64 rng(42);
  for (CoxeterType t : {kA3, kD4}) {
    GarsideCtxPtr c = full_ctx(t);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<int> word =
          random_signed_word(rng, t.rank, 4 + int(rng() % 9));
      std::vector<int> other = mutate_word(word, t, rng, 12);
      GarsideElem g = from_word(c, word);
      GarsideElem h = from_word(c, other);
      CHECK(equals(g, h));
      CHECK(g.inf == h.inf);
      CHECK(g.factors == h.factors);
      CHECK(is_canonical(g));
    }
  }
}

TEST_CASE("type mismatches are rejected across groups and contexts") {
  GarsideCtxPtr a3 = full_ctx(kA3);
  GarsideCtxPtr d4 = full_ctx(kD4);
  GarsideElem x = from_word(a3, {1});
  GarsideElem y = from_word(d4, {1});
  CHECK_THROWS_AS((void)equals(x, y), TypeMismatch);
  CHECK_THROWS_AS((void)multiply(x, y), TypeMismatch);
  // Same Coxeter type, different generating subsets: still distinct groups.
  GarsideCtxPtr sub = GarsideContext::make(kD4, gen_bit(1) | gen_bit(2));
  GarsideElem z = from_word(sub, {1});
  CHECK_THROWS_AS((void)equals(y, z), TypeMismatch);
  CHECK(!(y == z));
}

TEST_CASE("conjugation by the Garside element permutes the generators") {
  for (CoxeterType t : {kA1, kA2, kA3, CoxeterType{Family::A, 5},
                        CoxeterType{Family::D, 2}, kD4, kD5}) {
    GarsideCtxPtr c = full_ctx(t);
    GarsideElem delta = delta_power(c, 1);
    GarsideElem delta_inv = delta_power(c, -1);
    for (int s = 1; s <= int(t.rank); ++s) {
      GarsideElem gen = from_word(c, {s});
      GarsideElem conj = multiply(multiply(delta, gen), delta_inv);
      CoxElem target = c->tau(CoxElem::generator(t, s));
      CHECK(is_reflection(target));
      CHECK(length(target) == 1);
      CHECK(equals(conj, from_cox(c, target)));
    }
  }
  // The twist swaps the two fork generators exactly when the rank is odd.
  GarsideCtxPtr d5 = full_ctx(kD5);
  CHECK(equals(multiply(multiply(delta_power(d5, 1), from_word(d5, {1})),
                        delta_power(d5, -1)),
               from_word(d5, {2})));
  GarsideCtxPtr d4 = full_ctx(kD4);
  CHECK(d4->tau_trivial());
  CHECK(!d5->tau_trivial());
}

TEST_CASE("garside elements of parabolic subsets") {
  GarsideCtxPtr d4 = full_ctx(kD4);
  CHECK(equals(garside_element(d4, gen_bit(1)), from_word(d4, {1})));
  GarsideElem delta12 = garside_element(d4, gen_bit(1) | gen_bit(2));
  CHECK(equals(delta12, from_word(d4, {1, 2})));
  CHECK(delta12.inf == 0);
  CHECK(delta12.canonical_length() == 1);
  GarsideElem delta34 = garside_element(d4, gen_bit(3) | gen_bit(4));
  CHECK(equals(delta34, from_word(d4, {3, 4, 3})));
  CHECK(equals(garside_element(d4, all_generators(kD4)), delta_power(d4, 1)));
  CHECK(garside_element(d4, 0).is_identity());
  CHECK_THROWS_AS((void)garside_element(d4, gen_bit(5)), UnknownGenerator);
  GarsideCtxPtr sub = GarsideContext::make(kD4, gen_bit(1) | gen_bit(2));
  CHECK_THROWS_AS((void)garside_element(sub, gen_bit(3)), UnknownGenerator);
}

TEST_CASE("smallest central power of the parabolic Garside element") {
  GarsideCtxPtr a2 = full_ctx(kA2);
  GarsideElem za = central_power(a2, all_generators(kA2));
  CHECK(equals(za, from_word(a2, {1, 2, 1, 1, 2, 1})));
  CHECK(za.inf == 2);
  CHECK(za.factors.empty());

  GarsideCtxPtr d4 = full_ctx(kD4);
  CHECK(equals(central_power(d4, all_generators(kD4)), delta_power(d4, 1)));
  GarsideCtxPtr d5 = full_ctx(kD5);
  CHECK(equals(central_power(d5, all_generators(kD5)), delta_power(d5, 2)));

  // Single generator: the element itself.
  CHECK(equals(central_power(d4, gen_bit(2)), from_word(d4, {2})));
  // Two commuting generators: already central at exponent one.
  GarsideCtxPtr a3 = full_ctx(kA3);
  CHECK(equals(central_power(a3, gen_bit(1) | gen_bit(3)),
               from_word(a3, {1, 3})));
  // A braid-type pair needs the square.
  GarsideElem zb = central_power(a3, gen_bit(1) | gen_bit(2));
  CHECK(equals(zb, from_word(a3, {1, 2, 1, 1, 2, 1})));
  for (int s : {1, 2}) {
    GarsideElem gen = from_word(a3, {s});
    CHECK(equals(multiply(zb, gen), multiply(gen, zb)));
  }

  // The full central element commutes with every generator.
  GarsideElem zd = central_power(d4, all_generators(kD4));
  GarsideElem sq = multiply(delta_power(d4, 1), delta_power(d4, 1));
  for (int s = 1; s <= 4; ++s) {
    GarsideElem gen = from_word(d4, {s});
    CHECK(equals(multiply(zd, gen), multiply(gen, zd)));
    CHECK(equals(multiply(sq, gen), multiply(gen, sq)));
  }
}

TEST_CASE("letter support of positive words") {
  GarsideCtxPtr d4 = full_ctx(kD4);
  CHECK(positive_support(d4, {1, 2, 1}) == (gen_bit(1) | gen_bit(2)));
  CHECK(positive_support(d4, {}) == 0);
  CHECK(positive_support(d4, {4, 4, 4}) == gen_bit(4));
  CHECK_THROWS_AS((void)positive_support(d4, {1, -2}), NegativeLetter);
  CHECK_THROWS_AS((void)positive_support(d4, {0}), NegativeLetter);
  CHECK_THROWS_AS((void)positive_support(d4, {5}), UnknownGenerator);
  // Invariance across the defining relations (same class, same support).
  GarsideCtxPtr a2 = full_ctx(kA2);
  CHECK(positive_support(a2, {1, 2, 1}) == positive_support(a2, {2, 1, 2}));
}

TEST_CASE("left gcd and lcm agree with word-search oracles") {
  GarsideCtxPtr a2 = full_ctx(kA2);
  GarsideElem id = GarsideElem::identity(a2);

  // Pinned examples.
  CHECK(equals(left_gcd(from_word(a2, {1, 2, 1}), from_word(a2, {1, 2})),
               from_word(a2, {1, 2})));
  CHECK(equals(left_gcd(from_word(a2, {1, 2, 1}), id), id));
  CHECK(equals(left_lcm(from_word(a2, {1}), from_word(a2, {2})),
               from_word(a2, {1, 2, 1})));
  CHECK(equals(left_lcm(from_word(a2, {1}), from_word(a2, {1})),
               from_word(a2, {1})));

  CHECK_THROWS_AS((void)left_gcd(from_word(a2, {-1}), id),
                  HypothesisViolation);
  CHECK_THROWS_AS((void)left_lcm(from_word(a2, {-1}), id),
                  HypothesisViolation);

  // Oracle: all distinct positive elements of letter length <= 3, with
  // divisibility decided by exhaustive word search.
  std::vector<GarsideElem> small;
  std::set<std::string> seen;
  for (int len = 0; len <= 3; ++len) {
    for (const auto& w : positive_words_a2(len)) {
      GarsideElem g = from_word(a2, w);
      if (seen.insert(key_of(g)).second) small.push_back(g);
    }
  }
  for (const GarsideElem& p : small) {
    for (const GarsideElem& q : small) {
      GarsideElem gcd = left_gcd(p, q);
      CHECK(brute_divides(gcd, p));
      CHECK(brute_divides(gcd, q));
      for (const GarsideElem& d : small) {
        if (brute_divides(d, p) && brute_divides(d, q)) {
          CHECK(brute_divides(d, gcd));
        }
      }
      GarsideElem lcm = left_lcm(p, q);
      CHECK(lcm.is_positive());
      CHECK(brute_divides(p, lcm));
      CHECK(brute_divides(q, lcm));
      for (const GarsideElem& m : small) {
        if (brute_divides(p, m) && brute_divides(q, m)) {
          CHECK(brute_divides(lcm, m));
        }
      }
      // gcd and lcm are symmetric in their arguments.
      CHECK(equals(gcd, left_gcd(q, p)));
      CHECK(equals(lcm, left_lcm(q, p)));
    }
  }
}

TEST_CASE("irreducible left fractions") {
  std::mt19937_64 rng(42);
  GarsideCtxPtr d4 = full_ctx(kD4);
  GarsideElem id = GarsideElem::identity(d4);
  for (int trial = 0; trial < 300; ++trial) {
    GarsideElem g = from_word(d4, random_signed_word(rng, 4, 2 + int(rng() % 9)));
    auto [p, q] = left_fraction(g);
    CHECK(p.is_positive());
    CHECK(q.is_positive());
    CHECK(equals(multiply(inverse(p), q), g));
    CHECK(equals(left_gcd(p, q), id));
  }
  auto [p0, q0] = left_fraction(id);
  CHECK(p0.is_identity());
  CHECK(q0.is_identity());
  // A positive element has the trivial denominator.
  auto [p1, q1] = left_fraction(from_word(d4, {3, 4}));
  CHECK(p1.is_identity());
  CHECK(equals(q1, from_word(d4, {3, 4})));
}

TEST_CASE("parabolic membership: pinned cases") {
  GarsideCtxPtr d4 = full_ctx(kD4);
  GarsideElem id = GarsideElem::identity(d4);
  GenSet all = all_generators(kD4);
  CHECK(parabolic_membership(id, 0));
  CHECK(parabolic_membership(id, gen_bit(1)));
  CHECK(parabolic_membership(id, all));

  GarsideElem d1 = from_word(d4, {1});
  CHECK(parabolic_membership(d1, gen_bit(1)));
  CHECK(!parabolic_membership(d1, all & ~gen_bit(1)));
  CHECK(!parabolic_membership(d1, 0));

  // Conjugates: a b a^{-1} lies in the span of {a, b} but not of one letter.
  GarsideElem conj12 = from_word(d4, {1, 2, -1});
  CHECK(parabolic_membership(conj12, gen_bit(1) | gen_bit(2)));
  CHECK(!parabolic_membership(conj12, gen_bit(1)));
  GarsideElem conj34 = from_word(d4, {3, 4, -3});
  CHECK(parabolic_membership(conj34, gen_bit(3) | gen_bit(4)));
  CHECK(!parabolic_membership(conj34, gen_bit(3)));
  CHECK(!parabolic_membership(conj34, gen_bit(4)));

  // Mixed-sign words supported on a subset stay inside it.
  GarsideElem mixed = from_word(d4, {2, -3, -3, 2, 3});
  CHECK(parabolic_membership(mixed, gen_bit(2) | gen_bit(3)));
  CHECK(parabolic_membership(mixed, all));

  CHECK_THROWS_AS((void)parabolic_membership(d1, gen_bit(6)),
                  UnknownGenerator);
}

TEST_CASE("parabolic membership: rank-one and commuting-pair oracles") {
  // Membership in a single-generator subgroup means being a power of it,
  // testable exhaustively thanks to the letter-sum grading.
  GarsideCtxPtr a2 = full_ctx(kA2);
  std::vector<GarsideElem> powers;
  for (int k = -6; k <= 6; ++k) {
    powers.push_back(power(from_word(a2, {1}), k));
  }
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 400; ++trial) {
    GarsideElem g = from_word(a2, random_signed_word(rng, 2, int(rng() % 7)));
    bool is_power = false;
    for (const GarsideElem& p : powers) is_power = is_power || equals(g, p);
    CHECK(parabolic_membership(g, gen_bit(1)) == is_power);
  }
  // Two commuting generators span a rank-two free abelian group.
  GarsideCtxPtr a3 = full_ctx(kA3);
  std::vector<GarsideElem> lattice;
  for (int i = -4; i <= 4; ++i) {
    for (int j = -4; j <= 4; ++j) {
      lattice.push_back(multiply(power(from_word(a3, {1}), i),
                                 power(from_word(a3, {3}), j)));
    }
  }
  for (int trial = 0; trial < 250; ++trial) {
    GarsideElem g = from_word(a3, random_signed_word(rng, 3, int(rng() % 5)));
    bool in_lattice = false;
    for (const GarsideElem& p : lattice) in_lattice = in_lattice || equals(g, p);
    CHECK(parabolic_membership(g, gen_bit(1) | gen_bit(3)) == in_lattice);
  }
}

TEST_CASE("parabolic membership is stable under subset-supported factors") {
  std::mt19937_64 rng(42);
  GarsideCtxPtr d4 = full_ctx(kD4);
  std::uniform_int_distribution<int> subset_dist(1, 14);
  for (int trial = 0; trial < 200; ++trial) {
    GenSet x = GenSet(subset_dist(rng));
    std::vector<int> xletters;
    for (int s = 1; s <= 4; ++s) {
      if (gen_in(x, s)) xletters.push_back(s);
    }
    auto random_x_word = [&](int len) {
      std::vector<int> w;
      for (int i = 0; i < len; ++i) {
        int s = xletters[rng() % xletters.size()];
        w.push_back((rng() % 2) ? s : -s);
      }
      return w;
    };
    GarsideElem g = from_word(d4, random_signed_word(rng, 4, int(rng() % 7)));
    GarsideElem left = from_word(d4, random_x_word(3));
    GarsideElem right = from_word(d4, random_x_word(3));
    bool base = parabolic_membership(g, x);
    CHECK(parabolic_membership(multiply(left, multiply(g, right)), x) == base);
    // Words written in X-letters always lie in the X-subgroup.
    CHECK(parabolic_membership(multiply(left, right), x));
  }
}

TEST_CASE("product membership witnesses") {
  GarsideCtxPtr d4 = full_ctx(kD4);
  GenSet x = gen_bit(1) | gen_bit(2);
  GenSet y = gen_bit(3) | gen_bit(4);

  // Element already in the right factor: the trivial witness.
  auto w1 = product_membership_witness(from_word(d4, {3, -4}), x, y, 2);
  REQUIRE(w1.has_value());
  CHECK(w1->is_identity());
  // Element already in the left factor: the element itself.
  GarsideElem gx = from_word(d4, {1, -2});
  auto w2 = product_membership_witness(gx, x, y, 2);
  REQUIRE(w2.has_value());
  CHECK(equals(*w2, gx));

  // Split element: the left half is found at any radius >= 1.
  GarsideElem split = from_word(d4, {1, 3});
  auto w0 = product_membership_witness(split, x, y, 0);
  CHECK(!w0.has_value());
  for (int radius : {1, 2}) {
    auto w = product_membership_witness(split, x, y, radius);
    REQUIRE(w.has_value());
    CHECK(equals(*w, from_word(d4, {1})));
  }

  // Random certified splits: a witness always verifies the postcondition.
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> word;
    for (int i = 0; i < 3; ++i) {
      int s = (rng() % 2) ? 1 : 2;
      word.push_back((rng() % 2) ? s : -s);
    }
    for (int i = 0; i < 3; ++i) {
      int s = (rng() % 2) ? 3 : 4;
      word.push_back((rng() % 2) ? s : -s);
    }
    GarsideElem g = from_word(d4, word);
    auto w = product_membership_witness(g, x, y, 3);
    REQUIRE(w.has_value());
    CHECK(parabolic_membership(*w, x));
    CHECK(parabolic_membership(multiply(inverse(*w), g), y));
  }

  CHECK_THROWS_AS(
      (void)product_membership_witness(split, x, y, -1), ConfigError);
  CHECK_THROWS_AS(
      (void)product_membership_witness(split, gen_bit(7), y, 1),
      UnknownGenerator);
}

TEST_CASE("ball enumeration: order, counts, and known small balls") {
  GarsideCtxPtr a1 = full_ctx(kA1);
  auto b0 = enumerate_ball(a1, 0);
  REQUIRE(b0.size() == 1);
  CHECK(b0[0].is_identity());

  // Rank one: the infinite cyclic group; balls are symmetric power ranges.
  auto b1 = enumerate_ball(a1, 1);
  REQUIRE(b1.size() == 3);
  CHECK(equals(b1[0], from_word(a1, {-1})));
  CHECK(b1[1].is_identity());
  CHECK(equals(b1[2], from_word(a1, {1})));
  auto b2 = enumerate_ball(a1, 2);
  REQUIRE(b2.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(equals(b2[i], power(from_word(a1, {1}), i - 2)));
  }

  // Two-generator braid group: 13 normal forms of <= 2 factors per shift.
  GarsideCtxPtr a2 = full_ctx(kA2);
  auto ball = enumerate_ball(a2, 2);
  CHECK(ball.size() == 65);
  std::set<std::string> keys;
  for (const GarsideElem& g : ball) {
    CHECK(is_canonical(g));
    CHECK(g.inf >= -2);
    CHECK(g.inf <= 2);
    CHECK(g.canonical_length() <= 2);
    CHECK(keys.insert(key_of(g)).second);
  }
  CHECK(std::is_sorted(ball.begin(), ball.end(), ball_order_less));

  // Monotone nesting in radius.
  std::set<std::string> prev;
  for (int r = 0; r <= 2; ++r) {
    std::set<std::string> cur;
    for (const GarsideElem& g : enumerate_ball(a2, r)) cur.insert(key_of(g));
    CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
    CHECK(cur.size() > prev.size());
    prev = std::move(cur);
  }

  // Commuting-pair subgroup of the rank-4 group: only constant factor runs
  // are left-weighted, so each shift carries 1 + 2r normal forms.
  GarsideCtxPtr sub = GarsideContext::make(kD4, gen_bit(1) | gen_bit(2));
  CHECK(enumerate_ball(sub, 2).size() == 25);
  // The braid-type pair through the fork node behaves like the rank-two
  // braid group above.
  GarsideCtxPtr fork = GarsideContext::make(kD4, gen_bit(1) | gen_bit(3));
  CHECK(enumerate_ball(fork, 2).size() == 65);

  CHECK_THROWS_AS((void)enumerate_ball(a2, 2, 10), BallTooLarge);
  CHECK_THROWS_AS((void)enumerate_ball(a2, -1), ConfigError);
}

TEST_CASE("promotion of subgroup elements into the ambient group") {
  GarsideCtxPtr d4 = full_ctx(kD4);
  GarsideCtxPtr sub = GarsideContext::make(kD4, gen_bit(1) | gen_bit(2));
  std::set<std::string> images;
  for (const GarsideElem& g : enumerate_ball(sub, 2)) {
    GarsideElem amb = promote(g, d4);
    CHECK(parabolic_membership(amb, sub->gens()));
    CHECK(images.insert(key_of(amb)).second);
  }
  // Promotion respects multiplication.
  std::mt19937_64 rng(42);
  auto rand_sub_word = [&](int len) {
    std::vector<int> w;
    for (int i = 0; i < len; ++i) {
      int s = (rng() % 2) ? 1 : 2;
      w.push_back((rng() % 2) ? s : -s);
    }
    return w;
  };
  for (int trial = 0; trial < 60; ++trial) {
    GarsideElem u = from_word(sub, rand_sub_word(4));
    GarsideElem v = from_word(sub, rand_sub_word(4));
    CHECK(equals(promote(multiply(u, v), d4),
                 multiply(promote(u, d4), promote(v, d4))));
  }
  GarsideCtxPtr a3 = full_ctx(kA3);
  CHECK_THROWS_AS((void)promote(from_word(a3, {1}), d4), TypeMismatch);
}
