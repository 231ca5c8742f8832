#include "deligne/garside.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <utility>

namespace deligne {

namespace {

// u left-divides x in the weak order iff lengths are additive.
bool divides_left(const CoxElem& u, const CoxElem& x) {
  return length(u) + length(compose(inverse(u), x)) == length(x);
}

// Memoized radius balls of standard-parabolic contexts, keyed by ambient
// type, generator subset, and radius, carrying the inverse Coxeter images
// used by the membership prescreen.  Balls are immutable once built, so
// shared_ptr snapshots stay valid after the lock is dropped.
struct SubBall {
  std::vector<GarsideElem> elems;
  std::vector<CoxElem> inv_images;  // cox_image(elems[i])^-1
};
using SubBallKey = std::tuple<int, int, GenSet, int>;
std::mutex g_sub_ball_mu;
std::map<SubBallKey, std::shared_ptr<const SubBall>> g_sub_ball_cache;

const SubBall& cached_sub_ball_data(CoxeterType t, GenSet X, int radius) {
  SubBallKey key{int(t.family), t.rank, X, radius};
  {
    std::lock_guard<std::mutex> lock(g_sub_ball_mu);
    auto it = g_sub_ball_cache.find(key);
    if (it != g_sub_ball_cache.end()) return *it->second;
  }
  GarsideCtxPtr sub = GarsideContext::make(t, X);
  auto built = std::make_shared<SubBall>();
  built->elems = enumerate_ball(sub, radius);
  built->inv_images.reserve(built->elems.size());
  for (const GarsideElem& a : built->elems) {
    built->inv_images.push_back(inverse(cox_image(a)));
  }
  std::lock_guard<std::mutex> lock(g_sub_ball_mu);
  auto [it, inserted] = g_sub_ball_cache.emplace(key, std::move(built));
  return *it->second;
}

const std::vector<GarsideElem>& cached_sub_ball(CoxeterType t, GenSet X,
                                                int radius) {
  return cached_sub_ball_data(t, X, radius).elems;
}

// Greatest common left-divisor of two Coxeter elements (the meet in left
// weak order), by greedy extension: any common divisor strictly below the
// meet admits a one-letter extension that still divides both.
CoxElem simple_meet(const GarsideContext& c, const CoxElem& x,
                    const CoxElem& y) {
  CoxeterType t = c.ctype();
  CoxElem r = CoxElem::identity(t);
  bool grew = true;
  while (grew) {
    grew = false;
    for (int s = 1; s <= int(t.rank); ++s) {
      if (!gen_in(c.gens(), s) || is_right_descent(r, s)) continue;
      CoxElem u = compose(r, CoxElem::generator(t, s));
      if (divides_left(u, x) && divides_left(u, y)) {
        r = u;
        grew = true;
        break;
      }
    }
  }
  return r;
}

// Rewrites the factor list into the left-greedy canonical form: every
// consecutive pair left-weighted, no identity factors, and all copies of the
// longest element absorbed into the leading Delta exponent.  Local moves
// transfer one letter leftward at a time; each move strictly increases the
// weight sum(i -> l(f_i) * (count - i)), so the sweep terminates.
void normalize(const GarsideContext& c, int& inf, std::vector<CoxElem>& fs) {
  CoxeterType t = c.ctype();
  std::erase_if(fs, [](const CoxElem& f) { return f.is_identity(); });
  bool stable = false;
  while (!stable) {
    stable = true;
    for (std::size_t i = 0; i + 1 < fs.size(); ++i) {
      while (true) {
        int found = 0;
        for (int s = 1; s <= int(t.rank); ++s) {
          if (gen_in(c.gens(), s) && is_left_descent(fs[i + 1], s) &&
              !is_right_descent(fs[i], s)) {
            found = s;
            break;
          }
        }
        if (found == 0) break;
        CoxElem g = CoxElem::generator(t, found);
        fs[i] = compose(fs[i], g);
        fs[i + 1] = compose(g, fs[i + 1]);
        stable = false;
        if (fs[i + 1].is_identity()) break;
      }
    }
    if (!stable) {
      std::erase_if(fs, [](const CoxElem& f) { return f.is_identity(); });
    }
  }
  // In a stable list, longest-element factors can only form a prefix: a
  // left-weighted pair (f, w0) forces f = w0.
  while (!fs.empty() && fs.front() == c.w0()) {
    fs.erase(fs.begin());
    ++inf;
  }
}

GarsideElem make_elem(GarsideCtxPtr c, int inf, std::vector<CoxElem> fs) {
  normalize(*c, inf, fs);
  return GarsideElem{std::move(c), inf, std::move(fs)};
}

void require_same_group(const GarsideElem& g, const GarsideElem& h,
                        const char* op) {
  if (!g.ctx->same_group(*h.ctx)) {
    throw TypeMismatch(std::string(op) + " requires operands of one group");
  }
}

void require_positive(const GarsideElem& g, const char* op) {
  if (!g.is_positive()) {
    throw HypothesisViolation(std::string(op) + " requires positive operands");
  }
}

// First canonical factor viewed as a simple element (Delta when inf > 0).
CoxElem head_simple(const GarsideElem& g) {
  if (g.inf > 0) return g.ctx->w0();
  if (g.factors.empty()) return CoxElem::identity(g.ctx->ctype());
  return g.factors.front();
}

// Letter support of a positive element: the union of the factor supports,
// plus every generator when a positive Delta power is present.  Well defined
// because the defining relations preserve the letter set of positive words.
GenSet positive_elem_support(const GarsideElem& g) {
  GenSet set = g.inf > 0 ? g.ctx->gens() : GenSet{0};
  for (const CoxElem& f : g.factors) set |= support(f);
  return set;
}

// Reversal anti-automorphism (fixes the generators, reverses words).
GarsideElem rev_positive(const GarsideElem& g) {
  std::vector<CoxElem> fs;
  fs.reserve(g.factors.size());
  for (auto it = g.factors.rbegin(); it != g.factors.rend(); ++it) {
    fs.push_back(inverse(*it));
  }
  GarsideElem r = make_elem(g.ctx, 0, std::move(fs));
  return multiply(r, delta_power(g.ctx, g.inf));
}

GarsideElem right_gcd(const GarsideElem& p, const GarsideElem& q) {
  return rev_positive(left_gcd(rev_positive(p), rev_positive(q)));
}

}  // namespace

GarsideContext::GarsideContext(CoxeterType t, GenSet gens)
    : ctype_(t),
      gens_(gens),
      w0_(longest_element(t, gens)),
      w0_length_(length(w0_)),
      tau_trivial_(true) {
  for (int s = 1; s <= int(t.rank); ++s) {
    if (!gen_in(gens, s)) continue;
    if (tau(CoxElem::generator(t, s)) != CoxElem::generator(t, s)) {
      tau_trivial_ = false;
      break;
    }
  }
}

GarsideCtxPtr GarsideContext::make(CoxeterType t, GenSet gens) {
  validate_type(t);
  validate_genset(t, gens);
  return GarsideCtxPtr(new GarsideContext(t, gens));
}

CoxElem GarsideContext::tau(const CoxElem& x) const {
  return compose(compose(w0_, x), w0_);
}

GarsideElem GarsideElem::identity(GarsideCtxPtr c) {
  return GarsideElem{std::move(c), 0, {}};
}

bool ball_order_less(const GarsideElem& a, const GarsideElem& b) {
  if (a.inf != b.inf) return a.inf < b.inf;
  if (a.factors.size() != b.factors.size()) {
    return a.factors.size() < b.factors.size();
  }
  for (std::size_t i = 0; i < a.factors.size(); ++i) {
    if (!(a.factors[i] == b.factors[i])) {
      return a.factors[i] < b.factors[i];
    }
  }
  return false;
}

std::string garside_to_string(const GarsideElem& g) {
  if (g.is_identity()) return "e";
  std::string out;
  if (g.inf != 0) out = "D^" + std::to_string(g.inf);
  for (const CoxElem& f : g.factors) {
    if (!out.empty()) out += '.';
    out += elem_to_string(f);
  }
  return out;
}

GarsideElem from_cox(GarsideCtxPtr c, const CoxElem& w) {
  if (w.type() != c->ctype()) {
    throw TypeMismatch("from_cox: element type differs from the context");
  }
  if ((support(w) & ~c->gens()) != 0) {
    throw UnknownGenerator("from_cox: element lies outside the context");
  }
  return make_elem(std::move(c), 0, {w});
}

GarsideElem delta_power(GarsideCtxPtr c, int k) {
  return GarsideElem{std::move(c), k, {}};
}

GarsideElem from_word(GarsideCtxPtr c, const std::vector<int>& letters) {
  CoxeterType t = c->ctype();
  GarsideElem g = GarsideElem::identity(c);
  for (int letter : letters) {
    int s = std::abs(letter);
    if (letter == 0 || !gen_in(c->gens(), s)) {
      throw UnknownGenerator("from_word: letter " + std::to_string(letter) +
                             " is not a generator of the context");
    }
    CoxElem gen = CoxElem::generator(t, s);
    if (letter > 0) {
      g = multiply(g, make_elem(c, 0, {gen}));
    } else {
      // s^{-1} = (s * w0) * Delta^{-1}, moved into normal form as
      // Delta^{-1} * tau(s * w0).
      CoxElem x = compose(gen, c->w0());
      g = multiply(g, make_elem(c, -1, {c->tau(x)}));
    }
  }
  return g;
}

GarsideElem multiply(const GarsideElem& g, const GarsideElem& h) {
  require_same_group(g, h, "multiply");
  // Delta^a F Delta^b G = Delta^(a+b) tau^b(F) G.
  std::vector<CoxElem> fs;
  fs.reserve(g.factors.size() + h.factors.size());
  bool twist = (h.inf % 2) != 0;
  for (const CoxElem& f : g.factors) {
    fs.push_back(twist ? g.ctx->tau(f) : f);
  }
  fs.insert(fs.end(), h.factors.begin(), h.factors.end());
  return make_elem(g.ctx, g.inf + h.inf, std::move(fs));
}

GarsideElem inverse(const GarsideElem& g) {
  // (Delta^k f_1 .. f_m)^{-1} = f_m^{-1} .. f_1^{-1} Delta^{-k}.
  GarsideElem out = GarsideElem::identity(g.ctx);
  for (auto it = g.factors.rbegin(); it != g.factors.rend(); ++it) {
    std::vector<int> word = reduced_word(*it);
    for (auto ls = word.rbegin(); ls != word.rend(); ++ls) {
      CoxElem x = compose(CoxElem::generator(g.ctx->ctype(), *ls), g.ctx->w0());
      out = multiply(out, make_elem(g.ctx, -1, {g.ctx->tau(x)}));
    }
  }
  return multiply(out, delta_power(g.ctx, -g.inf));
}

GarsideElem power(const GarsideElem& g, int k) {
  if (k < 0) return inverse(power(g, -k));
  GarsideElem out = GarsideElem::identity(g.ctx);
  for (int i = 0; i < k; ++i) out = multiply(out, g);
  return out;
}

bool equals(const GarsideElem& g, const GarsideElem& h) {
  require_same_group(g, h, "equals");
  return g.inf == h.inf && g.factors == h.factors;
}

CoxElem cox_image(const GarsideElem& g) {
  CoxElem w = (g.inf % 2) != 0 ? g.ctx->w0()
                               : CoxElem::identity(g.ctx->ctype());
  for (const CoxElem& f : g.factors) w = compose(w, f);
  return w;
}

GarsideElem garside_element(GarsideCtxPtr c, GenSet T) {
  validate_genset(c->ctype(), T);
  if ((T & ~c->gens()) != 0) {
    throw UnknownGenerator("garside_element: subset exceeds the context");
  }
  return from_cox(c, longest_element(c->ctype(), T));
}

GarsideElem central_power(GarsideCtxPtr c, GenSet T) {
  GarsideElem delta_t = garside_element(c, T);
  CoxeterType t = c->ctype();
  CoxElem w0t = longest_element(t, T);
  int exponent = 1;
  for (int s = 1; s <= int(t.rank); ++s) {
    if (!gen_in(T, s)) continue;
    CoxElem gen = CoxElem::generator(t, s);
    if (compose(compose(w0t, gen), w0t) != gen) {
      exponent = 2;
      break;
    }
  }
  GarsideElem result = power(delta_t, exponent);
  for (int s = 1; s <= int(t.rank); ++s) {
    if (!gen_in(T, s)) continue;
    GarsideElem gen = from_cox(c, CoxElem::generator(t, s));
    if (!equals(multiply(result, gen), multiply(gen, result))) {
      throw Error("InternalInvariant",
                  "central_power: candidate fails to commute with " +
                      gen_name(t, s));
    }
  }
  return result;
}

GenSet positive_support(const GarsideCtxPtr& c, const std::vector<int>& letters) {
  GenSet set = 0;
  for (int letter : letters) {
    if (letter <= 0) {
      throw NegativeLetter("positive_support: letter " +
                           std::to_string(letter) + " is not positive");
    }
    if (!gen_in(c->gens(), letter)) {
      throw UnknownGenerator("positive_support: letter " +
                             std::to_string(letter) +
                             " is not a generator of the context");
    }
    set |= gen_bit(letter);
  }
  return set;
}

GarsideElem left_gcd(const GarsideElem& p, const GarsideElem& q) {
  require_same_group(p, q, "left_gcd");
  require_positive(p, "left_gcd");
  require_positive(q, "left_gcd");
  // The first factor of the gcd is the meet of the operand heads, because
  // head(x) = x ^ Delta and meets are associative; recurse after stripping.
  GarsideElem d = GarsideElem::identity(p.ctx);
  GarsideElem rp = p;
  GarsideElem rq = q;
  while (true) {
    CoxElem c = simple_meet(*p.ctx, head_simple(rp), head_simple(rq));
    if (c.is_identity()) break;
    GarsideElem step = from_cox(p.ctx, c);
    GarsideElem step_inv = inverse(step);
    d = multiply(d, step);
    rp = multiply(step_inv, rp);
    rq = multiply(step_inv, rq);
  }
  return d;
}

GarsideElem left_lcm(const GarsideElem& p, const GarsideElem& q) {
  require_same_group(p, q, "left_lcm");
  require_positive(p, "left_lcm");
  require_positive(q, "left_lcm");
  // m is a common left-multiple target (p and q both left-divide m) iff
  // m = Delta^N c^{-1} with c a common right-divisor of p^{-1} Delta^N and
  // q^{-1} Delta^N; minimizing m maximizes c.
  int n = std::max({p.sup(), q.sup(), 0});
  GarsideElem big = delta_power(p.ctx, n);
  GarsideElem a = multiply(inverse(p), big);
  GarsideElem b = multiply(inverse(q), big);
  GarsideElem c = right_gcd(a, b);
  return multiply(big, inverse(c));
}

std::pair<GarsideElem, GarsideElem> left_fraction(const GarsideElem& g) {
  if (g.inf >= 0) {
    return {GarsideElem::identity(g.ctx), g};
  }
  GarsideElem p0 = delta_power(g.ctx, -g.inf);
  GarsideElem q0{g.ctx, 0, g.factors};
  GarsideElem d_inv = inverse(left_gcd(p0, q0));
  return {multiply(d_inv, p0), multiply(d_inv, q0)};
}

bool parabolic_membership(const GarsideElem& g, GenSet X) {
  validate_genset(g.ctx->ctype(), X);
  if ((X & ~g.ctx->gens()) != 0) {
    throw UnknownGenerator("parabolic_membership: subset exceeds the context");
  }
  auto [p, q] = left_fraction(g);
  GenSet supp = positive_elem_support(p) | positive_elem_support(q);
  return (supp & ~X) == 0;
}

std::optional<GarsideElem> product_membership_witness(const GarsideElem& g,
                                                      GenSet X, GenSet Y,
                                                      int radius) {
  validate_genset(g.ctx->ctype(), X);
  validate_genset(g.ctx->ctype(), Y);
  if (((X | Y) & ~g.ctx->gens()) != 0) {
    throw UnknownGenerator(
        "product_membership_witness: subset exceeds the context");
  }
  if (radius < 0) {
    throw ConfigError("product_membership_witness: radius must be >= 0");
  }
  if (parabolic_membership(g, Y)) return GarsideElem::identity(g.ctx);
  if (parabolic_membership(g, X)) return g;
  CoxElem gw = cox_image(g);
  const SubBall& ball = cached_sub_ball_data(g.ctx->ctype(), X, radius);
  for (std::size_t i = 0; i < ball.elems.size(); ++i) {
    // Cheap necessary condition first: the image of a^{-1} g must lie in
    // the Coxeter parabolic on Y.  (The image is promotion-invariant.)
    if (!in_parabolic(compose(ball.inv_images[i], gw), Y)) continue;
    GarsideElem amb = promote(ball.elems[i], g.ctx);
    if (parabolic_membership(multiply(inverse(amb), g), Y)) return amb;
  }
  return std::nullopt;
}

std::vector<GarsideElem> enumerate_ball(GarsideCtxPtr c, int radius,
                                        std::size_t cap) {
  if (radius < 0) {
    throw ConfigError("enumerate_ball: radius must be >= 0");
  }
  // Candidate factors: every simple except identity and Delta, in image
  // order (ties impossible: the encoding is injective).
  std::vector<CoxElem> cand;
  std::vector<GenSet> left_desc;
  std::vector<GenSet> right_desc;
  for (const CoxElem& w : enumerate_subgroup(c->ctype(), c->gens())) {
    if (w.is_identity() || w == c->w0()) continue;
    cand.push_back(w);
  }
  std::sort(cand.begin(), cand.end());
  left_desc.reserve(cand.size());
  right_desc.reserve(cand.size());
  for (const CoxElem& w : cand) {
    GenSet ls = 0;
    GenSet rs = 0;
    for (int s = 1; s <= int(c->ctype().rank); ++s) {
      if (!gen_in(c->gens(), s)) continue;
      if (is_left_descent(w, s)) ls |= gen_bit(s);
      if (is_right_descent(w, s)) rs |= gen_bit(s);
    }
    left_desc.push_back(ls);
    right_desc.push_back(rs);
  }

  std::vector<GarsideElem> out;
  std::size_t count = 0;
  std::vector<std::size_t> seq;
  auto emit = [&](int inf) {
    if (++count > cap) {
      throw BallTooLarge("enumerate_ball: more than " + std::to_string(cap) +
                         " elements at radius " + std::to_string(radius));
    }
    std::vector<CoxElem> fs;
    fs.reserve(seq.size());
    for (std::size_t idx : seq) fs.push_back(cand[idx]);
    out.push_back(GarsideElem{c, inf, std::move(fs)});
  };
  // Normal forms are generated directly: a factor sequence is canonical iff
  // each consecutive pair is left-weighted, tested via descent-set masks.
  auto extend = [&](auto&& self, int inf, int target) -> void {
    if (int(seq.size()) == target) {
      emit(inf);
      return;
    }
    for (std::size_t j = 0; j < cand.size(); ++j) {
      if (!seq.empty() && (left_desc[j] & ~right_desc[seq.back()]) != 0) {
        continue;
      }
      seq.push_back(j);
      self(self, inf, target);
      seq.pop_back();
    }
  };
  for (int inf = -radius; inf <= radius; ++inf) {
    emit(inf);
    for (int len = 1; len <= radius; ++len) {
      extend(extend, inf, len);
    }
  }
  return out;
}

GarsideElem promote(const GarsideElem& g, GarsideCtxPtr ambient) {
  if (ambient->ctype() != g.ctx->ctype()) {
    throw TypeMismatch("promote: contexts have different Coxeter types");
  }
  if ((g.ctx->gens() & ~ambient->gens()) != 0) {
    throw TypeMismatch("promote: source generators exceed the target");
  }
  GarsideElem out = power(garside_element(ambient, g.ctx->gens()), g.inf);
  for (const CoxElem& f : g.factors) {
    out = multiply(out, from_cox(ambient, f));
  }
  return out;
}

}  // namespace deligne
