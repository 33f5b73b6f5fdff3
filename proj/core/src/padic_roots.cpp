#include "stablered/padic_roots.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <set>

#include "stablered/errors.hpp"

namespace stablered {

/* ---------------- FieldTower ---------------- */

FieldTower::FieldTower(FieldPtr base, long max_extension, std::optional<Rat> precision_cap)
    : max_extension_(max_extension), cap_(std::move(precision_cap)) {
  require(base != nullptr, errc::precondition_violation, "tower needs a base field");
  fields_.push_back(std::move(base));
}

void FieldTower::push_level(FieldPtr f, FieldEmbedding step) {
  require(f->degree() <= max_extension_, errc::escalation_limit,
          "extension degree e*k = " + std::to_string(f->degree()) + " exceeds the limit " +
              std::to_string(max_extension_));
  fields_.push_back(std::move(f));
  steps_.push_back(std::move(step));
}

int FieldTower::ensure_ramification(long d) {
  require(d >= 1, errc::precondition_violation, "ramification divisor must be positive");
  const FieldPtr& t = fields_.back();
  if (t->e() % d == 0) return top();
  long new_e = std::lcm(static_cast<long>(t->e()), d);
  auto [g, emb] = extend_ramification(t, static_cast<int>(new_e));
  push_level(g, emb);
  return top();
}

int FieldTower::ensure_residue_split(int level, const FFPoly& phi) {
  FFPoly cur = embed_res_poly(phi, level, top());
  while (true) {
    auto factors = ffpoly_factor(cur);
    int worst = 1;
    FFPoly worst_factor;
    for (const auto& f : factors)
      if (f.factor.degree() > worst) {
        worst = f.factor.degree();
        worst_factor = f.factor;
      }
    if (worst == 1) return top();
    auto [g, emb] = adjoin_residue_root(fields_.back(), worst_factor);
    push_level(g, emb);
    cur = embed_res_poly(cur, top() - 1, top());
  }
}

FieldElement FieldTower::embed(const FieldElement& x, int from, int to) const {
  require(from <= to, errc::precondition_violation, "tower embeddings only go up");
  FieldElement r = x;
  for (int l = from; l < to; ++l) r = steps_[static_cast<size_t>(l)].apply(r);
  return r;
}

FFElem FieldTower::embed_res(const FFElem& a, int from, int to) const {
  FFElem r = a;
  for (int l = from; l < to; ++l) r = steps_[static_cast<size_t>(l)].apply_residue(r);
  return r;
}

FFPoly FieldTower::embed_res_poly(const FFPoly& f, int from, int to) const {
  const auto& R = fields_[static_cast<size_t>(to)]->residue_field();
  std::vector<FFElem> c;
  c.reserve(f.c.size());
  for (const auto& x : f.c) c.push_back(embed_res(x, from, to));
  return ffpoly_from(R, std::move(c));
}

Poly FieldTower::embed_poly(const Poly& f, int from, int to) const {
  std::vector<FieldElement> c;
  c.reserve(f.coeffs().size());
  for (const auto& x : f.coeffs()) c.push_back(embed(x, from, to));
  return Poly::from_coeffs(fields_[static_cast<size_t>(to)], std::move(c), f.var());
}

/* ---------------- RootSet ---------------- */

long RootSet::root_count() const {
  long n = 0;
  for (const auto& r : roots) n += r.count;
  return n;
}

const Rat& RootSet::cap_or_default() const {
  static const Rat kDefault(512);
  if (opts.precision_cap) return *opts.precision_cap;
  if (tower && tower->precision_cap()) return *tower->precision_cap();
  return kDefault;
}

void RootSet::refine(size_t idx, const Rat& target) {
  ApproxRoot& r = roots[static_cast<size_t>(idx)];
  if (r.kind == ApproxRoot::Kind::branch) {
    require(r.center_gamma >= target, errc::precision_cap_exceeded,
            "conjugacy branch cannot be refined past its ladder depth");
    return;
  }
  if (r.exact) return;
  if (r.gamma >= target) return;
  require(target <= cap_or_default(), errc::precision_cap_exceeded,
          "requested error valuation " + format_rational(target) + " exceeds the precision cap");

  for (long round = 0; round < opts.max_refine_rounds; ++round) {
    FieldElement fv = r.defining.eval(r.value);
    if (fv.is_zero()) {
      r.exact = true;
      return;
    }
    FieldElement f1v = r.defining_deriv.eval(r.value);
    require(!f1v.is_zero(), errc::internal_invariant_violation,
            "derivative vanishes at a certified simple root");
    Rat vF = fv.valuation().value();
    Rat vF1 = f1v.valuation().value();
    if (vF - vF1 >= target && vF > 2 * vF1) {
      r.gamma = vF - vF1;
      return;
    }
    FieldElement step = r.value - fv * f1v.inverse();
    Rat trunc_at = target + (vF1 > 0 ? Rat(2 * vF1) : Rat(0)) + Rat(8);
    r.value = step.truncate(trunc_at);
  }
  fail(errc::precision_cap_exceeded, "Newton refinement failed to reach the target");
}

void RootSet::relocate(size_t idx, int level) {
  ApproxRoot& r = roots[static_cast<size_t>(idx)];
  if (level == r.level) return;
  require(level > r.level, errc::precondition_violation, "relocate only moves roots up the tower");
  if (r.kind == ApproxRoot::Kind::single) {
    r.value = tower->embed(r.value, r.level, level);
    r.defining = tower->embed_poly(r.defining, r.level, level);
    r.defining_deriv = r.defining.derivative();
  } else {
    r.center = tower->embed(r.center, r.level, level);
  }
  r.level = level;
}

/* ---------------- slope_split (public op) ---------------- */

std::vector<SlopeBranch> slope_split(const Poly& F) {
  require(!F.is_zero(), errc::precondition_violation, "slope_split of zero polynomial");
  require(F.ord_zero() == 0, errc::precondition_violation,
          "slope_split expects the zero roots to be removed first");
  const auto& K = F.field();
  NewtonPolygon np = newton_polygon(F);
  std::vector<SlopeBranch> out;
  size_t vtx = 0;
  for (const auto& seg : np.segments) {
    long i0 = np.vertices[vtx].first;
    Rat v0 = np.vertices[vtx].second;
    ++vtx;
    /* lattice step in the (exponent, e*v) lattice: the denominator of e*s */
    Rat s = -seg.slope;  // root valuation
    long d = rat_den(Rat(s * Rat(K->e()))).get_si();
    require(seg.length % d == 0, errc::internal_invariant_violation,
            "segment length not divisible by the lattice step");
    long L = seg.length / d;
    std::vector<FFElem> rc;
    rc.reserve(static_cast<size_t>(L) + 1);
    const auto& R = K->residue_field();
    for (long t = 0; t <= L; ++t) {
      long i = i0 + t * d;
      FieldElement a = F.coeff(i);
      Rat want = v0 - Rat(t) * s * Rat(d);  /* v on the segment at lattice point t */
      Rat shift = want * Rat(K->e());
      require(shift.get_den() == 1, errc::internal_invariant_violation,
              "segment valuation not in the value group");
      if (a.is_zero()) {
        rc.push_back(R->zero());
        continue;
      }
      FieldElement unit = a * FieldElement::pi_pow(K, -shift.get_num().get_si());
      rc.push_back(unit.residue());
    }
    out.push_back(SlopeBranch{seg.slope, seg.length, ffpoly_from(R, std::move(rc))});
  }
  return out;
}

/* ---------------- isolation ---------------- */

namespace {

struct WorkItem {
  Poly G;          // current digit polynomial (over `level`)
  int level;
  FieldElement shift;   // A: accumulated center
  FieldElement scale;   // B: accumulated radius factor (a pi-power product)
  int depth;
  std::vector<long> family_path;
  std::vector<HistStep> hist;
};

struct SqfContext {
  RootSet* rs;
  Poly Q_base;
  int multiplicity;
  long path_prefix = 0;
  long soft_cap = 64;
  std::map<int, std::pair<Poly, Poly>> q_cache;  // level -> (Q, Q')
  std::map<std::vector<long>, int>* family_ids;
  long depth_limit = 512;

  const std::pair<Poly, Poly>& q_at(int level) {
    auto it = q_cache.find(level);
    if (it != q_cache.end()) return it->second;
    Poly q = rs->tower->embed_poly(Q_base, 0, level);
    Poly qd = q.derivative();
    return q_cache.emplace(level, std::make_pair(std::move(q), std::move(qd))).first->second;
  }

  int family_of(const std::vector<long>& path) {
    auto it = family_ids->find(path);
    if (it != family_ids->end()) return it->second;
    int id = static_cast<int>(rs->family_sizes.size());
    family_ids->emplace(path, id);
    rs->family_sizes.push_back(0);
    return id;
  }

  void emit_single(int level, FieldElement value, bool exact, const Rat& gamma,
                   const std::vector<long>& path, std::vector<HistStep> hist) {
    ApproxRoot r;
    r.kind = ApproxRoot::Kind::single;
    r.level = level;
    r.value = std::move(value);
    r.exact = exact;
    r.gamma = gamma;
    r.slope = r.value.valuation();
    r.count = 1;
    r.multiplicity = multiplicity;
    r.family = family_of(path);
    r.hist = std::move(hist);
    rs->family_sizes[static_cast<size_t>(r.family)] += 1;
    const auto& qq = q_at(level);
    r.defining = qq.first;
    r.defining_deriv = qq.second;
    r.defining_base = Q_base;
    rs->roots.push_back(std::move(r));
    size_t idx = rs->roots.size() - 1;
    ApproxRoot& rr = rs->roots[idx];
    if (!rr.exact) {
      /* the certificate must pin at least the leading digit */
      while (rr.slope.is_finite() && !(Valuation(rr.gamma) > rr.slope)) {
        rs->refine(idx, Rat(rr.gamma * 2 + 1));
        if (rr.exact) break;
      }
    }
  }

  void emit_branch(const WorkItem& it, long seg_index, const Rat& s, long count, bool transitive,
                   const std::vector<long>& path) {
    ApproxRoot r;
    r.kind = ApproxRoot::Kind::branch;
    r.transitive = transitive;
    r.level = it.level;
    r.count = count;
    r.multiplicity = multiplicity;
    r.family = family_of(path);
    rs->family_sizes[static_cast<size_t>(r.family)] += count;
    r.center = it.shift;
    Valuation vb = it.scale.valuation();
    r.center_gamma = vb.value() + s;
    r.slope = r.center.is_zero() ? Valuation(r.center_gamma) : r.center.valuation();
    r.defining_base = Q_base;
    r.hist = it.hist;
    r.hist.push_back(HistStep{Valuation(r.center_gamma), seg_index, -1, 0});
    rs->roots.push_back(std::move(r));
  }
};

void isolate_squarefree(SqfContext& ctx, const Poly& Q) {
  RootSet& rs = *ctx.rs;
  FieldTower& tw = *rs.tower;

  std::deque<WorkItem> queue;
  {
    int lvl = tw.top();
    Poly G0 = tw.embed_poly(Q, 0, lvl);
    queue.push_back(WorkItem{std::move(G0), lvl, FieldElement::zero(tw.field(lvl)),
                             FieldElement::one(tw.field(lvl)), 0, {ctx.path_prefix}, {}});
  }

  while (!queue.empty()) {
    WorkItem it = std::move(queue.front());
    queue.pop_front();
    require(it.depth <= ctx.depth_limit, errc::precision_cap_exceeded,
            "digit recursion exceeded the depth limit");

    /* lift the item to the current top so residue work happens in one field */
    if (it.level < tw.top()) {
      int t = tw.top();
      it.G = tw.embed_poly(it.G, it.level, t);
      it.shift = tw.embed(it.shift, it.level, t);
      it.scale = tw.embed(it.scale, it.level, t);
      it.level = t;
    }

    if (it.G.degree() <= 0) continue;

    static const bool trace = std::getenv("STABLERED_TRACE") != nullptr;
    if (trace) {
      NewtonPolygon tnp = newton_polygon(it.G);
      std::cerr << "[isolate] depth=" << it.depth << " level=" << it.level
                << " e=" << tw.field(it.level)->e() << " k=" << tw.field(it.level)->k()
                << " degG=" << it.G.degree() << " ord0=" << it.G.ord_zero() << " segs:";
      for (const auto& s : tnp.segments)
        std::cerr << " (" << format_rational(s.slope) << "," << s.length << ")";
      std::cerr << "\n";
    }

    long ord0 = it.G.ord_zero();
    if (ord0 > 0) {
      require(ord0 == 1, errc::internal_invariant_violation,
              "squarefree polynomial acquired a multiple zero root");
      std::vector<long> path = it.family_path;
      if (it.depth == 0) path.push_back(-1);
      std::vector<HistStep> hist = it.hist;
      hist.push_back(HistStep{Valuation::infinity(), -1, 0, 0});
      ctx.emit_single(it.level, it.shift, true, Rat(0), path, std::move(hist));
      it.G = it.G.shift_down(1);
      if (it.G.degree() <= 0) continue;
    }

    NewtonPolygon np = newton_polygon(it.G);
    auto branches_a = slope_split(it.G);

    long seg_index = -1;
    size_t vtx = 0;
    for (const auto& seg : np.segments) {
      ++seg_index;
      long i0 = np.vertices[vtx].first;
      ++vtx;
      Rat s = -seg.slope;  // valuation of the roots this segment accounts for
      if (it.depth > 0 && s <= 0) continue;

      /* segment-variable residual factors */
      std::vector<std::pair<FFPoly, int>> a_factors;
      for (const auto& b : branches_a) {
        if (b.slope == seg.slope) {
          for (const auto& fac : ffpoly_factor(b.residual))
            a_factors.emplace_back(fac.factor, fac.multiplicity);
          break;
        }
      }
      require(!a_factors.empty(), errc::internal_invariant_violation, "segment lost its residual");

      /* stall assessment: emitting a branch entry is sound at any depth > 0;
       * Ore's criterion (one residual factor, multiplicity one) additionally
       * certifies the cluster is a single Galois orbit over the completion */
      bool regular = a_factors.size() == 1 && a_factors[0].second == 1;
      long kneed = tw.field(it.level)->k();
      {
        int worst = 1;
        for (const auto& [ff, mm] : a_factors) worst = std::max(worst, ff.degree());
        kneed *= worst;
      }
      long projected = std::lcm(static_cast<long>(tw.field(it.level)->e()), rat_den(s).get_si()) * kneed;
      long cap = regular ? ctx.soft_cap : 4 * ctx.soft_cap;
      if (it.depth > 0 && (projected > cap || projected > tw.max_extension())) {
        std::vector<long> path = it.family_path;
        ctx.emit_branch(it, seg_index, s, seg.length, regular, path);
        continue;
      }
      require(projected <= tw.max_extension(), errc::precision_cap_exceeded,
              "first digit level already exceeds the extension budget");

      int lvl2 = tw.ensure_ramification(
          std::lcm(static_cast<long>(tw.field(it.level)->e()), rat_den(s).get_si()));
      /* lattice step of the segment over the item's field = ramification growth */
      long d = rat_den(Rat(s * Rat(tw.field(it.level)->e()))).get_si();
      Poly G2 = tw.embed_poly(it.G, it.level, lvl2);
      FieldElement A2 = tw.embed(it.shift, it.level, lvl2);
      FieldElement B2 = tw.embed(it.scale, it.level, lvl2);
      const FieldPtr& K2 = tw.field(lvl2);
      const int a_level = it.level;  // where the segment-variable residuals live

      Rat eta = s * Rat(K2->e());
      require(eta.get_den() == 1, errc::internal_invariant_violation, "slope not integral after extension");
      FieldElement sigma = FieldElement::pi_pow(K2, eta.get_num().get_si());

      Poly G3 = G2.scale_var(sigma);
      Valuation content = G3.content_valuation();
      Rat cshift = content.value() * Rat(K2->e());
      require(cshift.get_den() == 1, errc::internal_invariant_violation, "content not in value group");
      G3 = G3 * FieldElement::pi_pow(K2, -cshift.get_num().get_si());

      FFPoly Rb;
      {
        const auto& R = K2->residue_field();
        std::vector<FFElem> c;
        c.reserve(G3.coeffs().size());
        for (const auto& x : G3.coeffs()) c.push_back(x.residue());
        Rb = ffpoly_from(R, std::move(c));
      }
      long rb_ord = 0;
      while (rb_ord <= Rb.degree() && K2->residue_field()->is_zero(Rb.c[static_cast<size_t>(rb_ord)]))
        ++rb_ord;
      require(rb_ord == i0, errc::internal_invariant_violation, "rescaled residual has wrong order");
      FFPoly rho = ffpoly_from(Rb.F, std::vector<FFElem>(Rb.c.begin() + rb_ord, Rb.c.end()));
      require(rho.degree() == seg.length, errc::internal_invariant_violation,
              "rescaled residual has wrong degree");

      long fac_ordinal = -1;
      for (const auto& fac : ffpoly_factor(rho)) {
        ++fac_ordinal;
        const FFPoly& phib = fac.factor;
        /* match phib to its segment-variable factor: phib | phia(T^d) */
        long a_idx = -1;
        for (size_t ai = 0; ai < a_factors.size(); ++ai) {
          const FFPoly phia = tw.embed_res_poly(a_factors[ai].first, a_level, lvl2);
          std::vector<FFElem> comp(static_cast<size_t>(phia.degree()) * d + 1, phia.F->zero());
          for (long t = 0; t <= phia.degree(); ++t)
            comp[static_cast<size_t>(t * d)] = phia.c[static_cast<size_t>(t)];
          FFPoly phiad = ffpoly_from(phia.F, std::move(comp));
          FFPoly q, r;
          ffpoly_divrem(phiad, phib, q, r);
          if (r.is_zero()) {
            a_idx = static_cast<long>(ai);
            break;
          }
        }
        require(a_idx >= 0, errc::internal_invariant_violation, "residual factor matching failed");

        /* conjugacy families are keyed by the first-level segment and
         * segment-variable factor; deeper digits stay in the family */
        std::vector<long> path = it.family_path;
        if (it.depth == 0) {
          path.push_back(seg_index);
          path.push_back(a_idx);
        }

        int lvl3 = lvl2;
        std::vector<FFElem> digits;
        if (phib.degree() > 1) {
          lvl3 = tw.ensure_residue_split(lvl2, phib);
          FFPoly phis = tw.embed_res_poly(phib, lvl2, lvl3);
          digits = ffpoly_roots(phis);
        } else {
          digits = {phib.F->neg(phib.c[0])};
        }
        require(static_cast<long>(digits.size()) == phib.degree(), errc::internal_invariant_violation,
                "residue factor did not split completely");

        Poly G4 = lvl3 == lvl2 ? G3 : tw.embed_poly(G3, lvl2, lvl3);
        FieldElement A3 = lvl3 == lvl2 ? A2 : tw.embed(A2, lvl2, lvl3);
        FieldElement B3 = lvl3 == lvl2 ? B2 : tw.embed(B2, lvl2, lvl3);
        FieldElement sigma3 = lvl3 == lvl2 ? sigma : tw.embed(sigma, lvl2, lvl3);
        const FieldPtr& K3 = tw.field(lvl3);

        long digit_ordinal = -1;
        for (const auto& digit : digits) {
          ++digit_ordinal;
          FieldElement clift = FieldElement::lift_residue(K3, digit);
          FieldElement Anew = A3 + B3 * sigma3 * clift;
          FieldElement Bnew = B3 * sigma3;
          HistStep step{Valuation(Rat(B3.valuation().value() + s)), seg_index, fac_ordinal,
                        digit_ordinal};
          std::vector<HistStep> hist = it.hist;
          hist.push_back(step);

          /* a digit of residual multiplicity 1 accounts for exactly one
           * root; only then may a Hensel certificate close the branch */
          bool closed = false;
          if (fac.multiplicity == 1) {
            const auto& qq = ctx.q_at(lvl3);
            FieldElement qv = qq.first.eval(Anew);
            if (qv.is_zero()) {
              ctx.emit_single(lvl3, Anew, true, Rat(0), path, std::move(hist));
              continue;
            }
            FieldElement q1v = qq.second.eval(Anew);
            if (!q1v.is_zero()) {
              Rat vq = qv.valuation().value();
              Rat vq1 = q1v.valuation().value();
              if (vq > 2 * vq1) {
                ctx.emit_single(lvl3, Anew, false, Rat(vq - vq1), path, std::move(hist));
                closed = true;
              }
            }
          }
          if (!closed) {
            Poly Gnext = G4.shift_var(clift);
            Valuation c2 = Gnext.content_valuation();
            if (c2.is_finite() && c2.value() > 0) {
              Rat cs = c2.value() * Rat(K3->e());
              Gnext = Gnext * FieldElement::pi_pow(K3, -cs.get_num().get_si());
            }
            queue.push_back(
                WorkItem{std::move(Gnext), lvl3, Anew, Bnew, it.depth + 1, path, std::move(hist)});
          }
        }
      }
    }
  }
}

}  // namespace

RootSet isolate_roots(const Poly& F, TowerPtr tower, IsolationOptions opts) {
  require(!F.is_zero(), errc::precondition_violation, "isolate_roots of zero polynomial");
  RootSet rs;
  rs.tower = std::move(tower);
  rs.opts = opts;
  require(F.field()->same_as(*rs.tower->field(0)), errc::precondition_violation,
          "polynomial must live over the tower base");

  std::map<std::vector<long>, int> family_ids;
  auto sqf = squarefree_decomposition(F);
  long total = 0;
  long factor_ordinal = 0;
  for (const auto& [Q, mult] : sqf) {
    SqfContext ctx;
    ctx.rs = &rs;
    ctx.Q_base = Q;
    ctx.multiplicity = mult;
    ctx.family_ids = &family_ids;
    ctx.path_prefix = factor_ordinal++;
    ctx.soft_cap = std::max(opts.branch_degree_soft_cap, 4L * F.field()->degree());
    isolate_squarefree(ctx, Q);
    total += static_cast<long>(Q.degree()) * mult;
  }

  long found = 0;
  for (const auto& r : rs.roots) found += r.count * r.multiplicity;
  require(found == F.degree() && total == F.degree(), errc::internal_invariant_violation,
          "root count does not match the degree");

  /* Newton polygon cross-check: valuation multiset */
  {
    NewtonPolygon np = newton_polygon(F);
    std::vector<std::pair<Valuation, long>> expect = np.root_valuations();
    std::vector<std::pair<Valuation, long>> got;
    for (const auto& r : rs.roots) {
      bool foundv = false;
      for (auto& g : got)
        if (g.first == r.slope) {
          g.second += r.multiplicity * r.count;
          foundv = true;
          break;
        }
      if (!foundv) got.emplace_back(r.slope, r.multiplicity * r.count);
    }
    auto norm = [](std::vector<std::pair<Valuation, long>>& v) {
      std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.first == b.first) return a.second < b.second;
        return a.first < b.first;
      });
    };
    norm(expect);
    norm(got);
    require(expect == got, errc::internal_invariant_violation,
            "root valuations disagree with the Newton polygon");
  }
  return rs;
}

/* ---------------- multiset helpers ---------------- */

long PairMultiset::total() const {
  long n = 0;
  for (const auto& [v, c] : entries) n += c;
  return n;
}

long PairMultiset::count_at_least(const Valuation& t) const {
  long n = 0;
  for (const auto& [v, c] : entries)
    if (v >= t) n += c;
  return n;
}

namespace {

using VMultiset = std::vector<std::pair<Valuation, long>>;

void ms_normalize(VMultiset& m) {
  std::sort(m.begin(), m.end(), [](const auto& a, const auto& b) {
    if (a.first == b.first) return a.second < b.second;
    return a.first < b.first;
  });
  VMultiset out;
  for (auto& [v, c] : m) {
    if (c == 0) continue;
    if (!out.empty() && out.back().first == v)
      out.back().second += c;
    else
      out.emplace_back(v, c);
  }
  m = std::move(out);
}

void ms_add(VMultiset& m, const Valuation& v, long c) {
  m.emplace_back(v, c);
  ms_normalize(m);
}

/* remove `c` copies of v from m; fails if absent */
void ms_remove(VMultiset& m, const Valuation& v, long c) {
  for (auto& [mv, mc] : m) {
    if (mv == v) {
      require(mc >= c, errc::internal_invariant_violation,
              "multiset removal of more entries than present");
      mc -= c;
      ms_normalize(m);
      return;
    }
  }
  fail(errc::internal_invariant_violation, "multiset removal of an absent value");
}

void ms_divide(VMultiset& m, long d) {
  for (auto& [v, c] : m) {
    require(c % d == 0, errc::internal_invariant_violation,
            "multiset counts not divisible by the cluster size");
    c /= d;
  }
}

/* power sums p_0..p_upto of the roots of monic Q, by Newton's identities */
std::vector<FieldElement> root_power_sums(const Poly& Q, long upto) {
  const FieldPtr& F = Q.field();
  long n = Q.degree();
  require(n >= 1 && Q.lc() == FieldElement::one(F), errc::precondition_violation,
          "power sums need a monic polynomial");
  /* e_i = (-1)^i c_{n-i} */
  std::vector<FieldElement> e(static_cast<size_t>(n) + 1, FieldElement::zero(F));
  for (long i = 0; i <= n; ++i) {
    FieldElement c = Q.coeff(n - i);
    e[static_cast<size_t>(i)] = (i % 2) ? -c : c;
  }
  std::vector<FieldElement> p(static_cast<size_t>(upto) + 1, FieldElement::zero(F));
  p[0] = FieldElement(F, Rat(n));
  for (long m = 1; m <= upto; ++m) {
    FieldElement acc = FieldElement::zero(F);
    long lim = std::min(m - 1, n);
    for (long i = 1; i <= lim; ++i) {
      FieldElement t = e[static_cast<size_t>(i)] * p[static_cast<size_t>(m - i)];
      acc = (i % 2) ? acc + t : acc - t;
    }
    if (m <= n) {
      FieldElement t = e[static_cast<size_t>(m)] * Rat(m);
      acc = (m % 2) ? acc + t : acc - t;
    }
    p[static_cast<size_t>(m)] = acc;
  }
  return p;
}

/* monic polynomial with prescribed power sums s_1..s_deg (Newton again) */
Poly poly_from_power_sums(const FieldPtr& F, const std::vector<FieldElement>& s, long deg, Var var) {
  std::vector<FieldElement> e(static_cast<size_t>(deg) + 1, FieldElement::zero(F));
  e[0] = FieldElement::one(F);
  for (long k = 1; k <= deg; ++k) {
    FieldElement acc = FieldElement::zero(F);
    for (long i = 1; i <= k; ++i) {
      FieldElement t = s[static_cast<size_t>(i)] * e[static_cast<size_t>(k - i)];
      acc = (i % 2) ? acc + t : acc - t;
    }
    e[static_cast<size_t>(k)] = acc * (Rat(1) / Rat(k));
  }
  std::vector<FieldElement> coeffs(static_cast<size_t>(deg) + 1, FieldElement::zero(F));
  for (long k = 0; k <= deg; ++k) {
    const FieldElement& ek = e[static_cast<size_t>(k)];
    coeffs[static_cast<size_t>(deg - k)] = (k % 2) ? -ek : ek;
  }
  return Poly::from_coeffs(F, std::move(coeffs), var);
}

/* multiset {v(P(y)) : Q(y) = 0} from the Newton polygon of the
 * characteristic polynomial of P(y), built from trace power sums */
VMultiset value_multiset(const Poly& Q, const Poly& P) {
  const FieldPtr& F = Q.field();
  long n = Q.degree();
  std::vector<FieldElement> psums = root_power_sums(Q, n - 1);
  std::vector<FieldElement> s(static_cast<size_t>(n) + 1, FieldElement::zero(F));
  Poly Wk = Poly::constant(F, FieldElement::one(F), Q.var());
  Poly Pm = P.with_var(Q.var());
  {
    Poly q, r;
    poly_divrem(Pm, Q, q, r);
    Pm = r;
  }
  for (long k = 1; k <= n; ++k) {
    Poly q, r;
    poly_divrem(Wk * Pm, Q, q, r);
    Wk = r;
    FieldElement acc = FieldElement::zero(F);
    for (long j = 0; j <= Wk.degree(); ++j)
      acc = acc + Wk.coeff(j) * psums[static_cast<size_t>(j)];
    s[static_cast<size_t>(k)] = acc;
  }
  Poly R = poly_from_power_sums(F, s, n, Var::T);
  VMultiset out;
  long ord = R.ord_zero();
  if (ord > 0) out.emplace_back(Valuation::infinity(), ord);
  if (ord < R.degree()) {
    NewtonPolygon np = newton_polygon(R.shift_down(ord));
    for (const auto& seg : np.segments) out.emplace_back(Valuation(Rat(-seg.slope)), seg.length);
  }
  ms_normalize(out);
  return out;
}

/* within-differences multiset over all ordered pairs of distinct roots:
 * power sums of {y_i - y_j} come from those of Q by a binomial convolution */
VMultiset difference_multiset(const Poly& Q) {
  const FieldPtr& F = Q.field();
  long n = Q.degree();
  long N = n * n;
  std::vector<FieldElement> p = root_power_sums(Q, N);
  std::vector<FieldElement> s(static_cast<size_t>(N) + 1, FieldElement::zero(F));
  for (long k = 1; k <= N; ++k) {
    FieldElement acc = FieldElement::zero(F);
    for (long m = 0; m <= k; ++m) {
      Int bin;
      mpz_bin_uiui(bin.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(m));
      FieldElement t = p[static_cast<size_t>(m)] * p[static_cast<size_t>(k - m)] * Rat(bin);
      acc = ((k - m) % 2) ? acc - t : acc + t;
    }
    s[static_cast<size_t>(k)] = acc;
  }
  Poly D = poly_from_power_sums(F, s, N, Var::T);
  long ord = D.ord_zero();
  require(ord == n, errc::internal_invariant_violation,
          "difference polynomial has unexpected zero count");
  VMultiset out;
  NewtonPolygon np = newton_polygon(D.shift_down(ord));
  for (const auto& seg : np.segments) out.emplace_back(Valuation(Rat(-seg.slope)), seg.length);
  ms_normalize(out);
  return out;
}

/* cross-entry meeting depth from the digit histories: the first level where
 * the choices differ pins v(y - z) exactly */
Valuation history_cross_depth(const ApproxRoot& a, const ApproxRoot& b) {
  size_t n = std::min(a.hist.size(), b.hist.size());
  for (size_t t = 0; t < n; ++t) {
    const HistStep& x = a.hist[t];
    const HistStep& y = b.hist[t];
    if (x.same_choice(y)) continue;
    if (x.seg != y.seg) return min(x.depth, y.depth);
    return min(x.depth, y.depth);  // same segment: depths equal
  }
  fail(errc::internal_invariant_violation,
       "distinct entries share their whole digit history");
}

}  // namespace

/* ---------------- certified evaluation ---------------- */

namespace {

std::optional<Rat> try_certify_nonzero(const FieldElement& center, const Rat& gamma,
                                       const Poly& P_level) {
  std::vector<FieldElement> b = P_level.taylor_at(center);
  if (b.empty() || b[0].is_zero()) return std::nullopt;
  Rat w = b[0].valuation().value();
  for (size_t t = 1; t < b.size(); ++t) {
    if (b[t].is_zero()) continue;
    Rat bound = b[t].valuation().value() + Rat(static_cast<long>(t)) * gamma;
    if (!(bound > w)) return std::nullopt;
  }
  return w;
}

Valuation single_eval_valuation(RootSet& rs, size_t idx, const Poly& P_base) {
  ApproxRoot& r = rs.roots[idx];
  if (P_base.is_zero()) return Valuation::infinity();

  if (r.exact) {
    Poly P = rs.tower->embed_poly(P_base, 0, r.level);
    return P.eval(r.value).valuation();
  }

  /* exact-vanishing split: y is a root of gcd(P, Q) or of the cofactor */
  Poly G = poly_gcd(P_base, r.defining_base);
  if (G.degree() > 0) {
    Poly S = poly_divexact(r.defining_base, G).monic();
    if (S.degree() == 0) return Valuation::infinity();
    Poly S_l = rs.tower->embed_poly(S, 0, r.level);
    Poly G_l = rs.tower->embed_poly(G, 0, r.level);
    while (true) {
      if (try_certify_nonzero(r.value, r.gamma, S_l)) return Valuation::infinity();
      if (try_certify_nonzero(r.value, r.gamma, G_l)) break;
      rs.refine(idx, Rat(r.gamma * 2 + 1));
      if (r.exact) return single_eval_valuation(rs, idx, P_base);
      S_l = rs.tower->embed_poly(S, 0, r.level);
      G_l = rs.tower->embed_poly(G, 0, r.level);
    }
  }

  Poly P_l = rs.tower->embed_poly(P_base, 0, r.level);
  int level_seen = r.level;
  while (true) {
    if (auto w = try_certify_nonzero(r.value, r.gamma, P_l)) return Valuation(*w);
    rs.refine(idx, Rat(r.gamma * 2 + 1));
    if (r.exact) return single_eval_valuation(rs, idx, P_base);
    if (r.level != level_seen) {
      P_l = rs.tower->embed_poly(P_base, 0, r.level);
      level_seen = r.level;
    }
  }
}

/* entries of the same squarefree factor as entry `idx` */
std::vector<size_t> factor_entries(const RootSet& rs, size_t idx) {
  std::vector<size_t> out;
  for (size_t i = 0; i < rs.size(); ++i)
    if (rs.roots[i].defining_base == rs.roots[idx].defining_base) out.push_back(i);
  return out;
}

/* branch valuations of P(y): per-cluster Taylor certification at the
 * center first (the whole cluster sits within center_gamma of it); if that
 * cannot pin the value, fall back to the base-level value multiset with
 * the other entries' certified contributions removed */
Valuation branch_eval_valuation(RootSet& rs, size_t idx, const Poly& P_base) {
  ApproxRoot& r = rs.roots[idx];
  if (P_base.is_zero()) return Valuation::infinity();

  /* exact-vanishing split against the defining factor */
  Poly G = poly_gcd(P_base, r.defining_base);
  Poly S = r.defining_base;
  if (G.degree() > 0) {
    S = poly_divexact(r.defining_base, G).monic();
    if (S.degree() == 0) return Valuation::infinity();  // P vanishes on the whole factor
    Poly S_l = rs.tower->embed_poly(S, 0, r.level);
    if (try_certify_nonzero(r.center, r.center_gamma, S_l))
      return Valuation::infinity();  // the cluster lies in the vanishing part
  }
  {
    Poly P_l = rs.tower->embed_poly(P_base, 0, r.level);
    if (auto w = try_certify_nonzero(r.center, r.center_gamma, P_l)) return Valuation(*w);
  }

  /* pooled fallback */
  std::vector<size_t> sibs = factor_entries(rs, idx);
  VMultiset m = value_multiset(r.defining_base, P_base);
  long pool_total = 0;
  for (size_t i : sibs) {
    if (i == idx) {
      pool_total += rs.roots[i].count;
      continue;
    }
    ApproxRoot& e = rs.roots[i];
    if (e.kind == ApproxRoot::Kind::single) {
      Valuation w = single_eval_valuation(rs, i, P_base);
      ms_remove(m, w, 1);
    } else {
      /* try to resolve the sibling cluster on its own */
      Poly Gs = poly_gcd(P_base, e.defining_base);
      bool removed = false;
      if (Gs.degree() > 0) {
        Poly Ss = poly_divexact(e.defining_base, Gs).monic();
        if (Ss.degree() == 0) {
          ms_remove(m, Valuation::infinity(), e.count);
          removed = true;
        } else {
          Poly Ss_l = rs.tower->embed_poly(Ss, 0, e.level);
          if (try_certify_nonzero(e.center, e.center_gamma, Ss_l)) {
            ms_remove(m, Valuation::infinity(), e.count);
            removed = true;
          }
        }
      }
      if (!removed) {
        Poly P_l = rs.tower->embed_poly(P_base, 0, e.level);
        if (auto w = try_certify_nonzero(e.center, e.center_gamma, P_l)) {
          ms_remove(m, Valuation(*w), e.count);
          removed = true;
        }
      }
      if (!removed) pool_total += e.count;
    }
  }
  ms_normalize(m);
  require(!m.empty(), errc::internal_invariant_violation, "empty branch value pool");
  if (m.size() == 1) {
    require(m[0].second == pool_total, errc::internal_invariant_violation,
            "branch value pool has the wrong size");
    return m[0].first;
  }
  fail(errc::precision_cap_exceeded,
       "cluster values of a polynomial are not Galois-constant across the pool; "
       "cannot attribute them to clusters");
}

}  // namespace

Valuation certified_eval_valuation(RootSet& rs, size_t idx, const Poly& P_base) {
  if (rs.roots[idx].kind == ApproxRoot::Kind::single)
    return single_eval_valuation(rs, idx, P_base);
  return branch_eval_valuation(rs, idx, P_base);
}

Valuation certified_lower_bound(RootSet& rs, size_t idx, const Poly& P_base) {
  ApproxRoot& r = rs.roots[idx];
  if (r.kind == ApproxRoot::Kind::single) return single_eval_valuation(rs, idx, P_base);
  /* unconditional Taylor bound at the cluster center:
   * v(P(y)) >= min(v(b_0), min_{t>=1} v(b_t) + t gamma) */
  Poly P = rs.tower->embed_poly(P_base, 0, r.level);
  if (P.is_zero()) return Valuation::infinity();
  std::vector<FieldElement> b = P.taylor_at(r.center);
  Valuation bound = Valuation::infinity();
  for (size_t t = 0; t < b.size(); ++t) {
    if (b[t].is_zero()) continue;
    Valuation term = b[t].valuation() + Valuation(Rat(Rat(static_cast<long>(t)) * r.center_gamma));
    bound = min(bound, term);
  }
  return bound;
}

namespace {

/* residue of x * pi^{-e v(x)} at the entry's level */
FFElem unit_residue_of(const FieldPtr& K, const FieldElement& x) {
  Valuation v = x.valuation();
  require(v.is_finite(), errc::precondition_violation, "unit residue of zero");
  Rat shift = v.value() * Rat(K->e());
  require(shift.get_den() == 1, errc::internal_invariant_violation,
          "valuation not representable at this level");
  return (x * FieldElement::pi_pow(K, -shift.get_num().get_si())).residue();
}

FFElem ff_nth_root(const FiniteFieldPtr& R, const FFElem& x, long n) {
  if (R->is_zero(x)) return x;
  Int q1 = R->order() - 1;
  Int nn(n);
  Int g;
  mpz_gcd(g.get_mpz_t(), nn.get_mpz_t(), q1.get_mpz_t());
  require(g == 1, errc::precision_cap_exceeded,
          "cluster size shares a factor with the residue group order; "
          "cannot extract the residue root");
  Int inv;
  require(mpz_invert(inv.get_mpz_t(), nn.get_mpz_t(), q1.get_mpz_t()) != 0,
          errc::internal_invariant_violation, "n-th root inversion failed");
  return R->pow(x, inv);
}

/* single-entry unit residue of P(y) pi^{-e w}, Taylor-certified */
FFElem single_unit_residue(RootSet& rs, size_t idx, const Poly& P_base, const Rat& w) {
  ApproxRoot& r = rs.roots[idx];
  Poly P = rs.tower->embed_poly(P_base, 0, r.level);
  const FieldPtr& K = rs.tower->field(r.level);
  if (r.exact) {
    FieldElement val = P.eval(r.value);
    require(val.valuation() == Valuation(w), errc::internal_invariant_violation,
            "certified valuation mismatch at exact root");
    return unit_residue_of(K, val);
  }
  while (true) {
    std::vector<FieldElement> b = P.taylor_at(r.value);
    bool ok = !b.empty() && !b[0].is_zero() && b[0].valuation() == Valuation(w);
    if (ok) {
      for (size_t t = 1; t < b.size() && ok; ++t) {
        if (b[t].is_zero()) continue;
        if (!(b[t].valuation().value() + Rat(static_cast<long>(t)) * r.gamma > w)) ok = false;
      }
    }
    if (ok) return unit_residue_of(K, b[0]);
    rs.refine(idx, Rat(r.gamma * 2 + 1));
    if (r.exact) return single_unit_residue(rs, idx, P_base, w);
    P = rs.tower->embed_poly(P_base, 0, r.level);
  }
}

/* branch unit residue of P(y) pi^{-e w}: Taylor certification at the
 * cluster center when possible; otherwise the Galois-stable product route:
 * prod over the factor's nonvanishing roots of (P(y) pi^{-e w_y}) is the
 * normalized residue of Res(Q/gcd, P), and after dividing out every other
 * entry the count-th root recovers the per-root residue (unique when the
 * cluster size is coprime to the residue group order, e.g. always for
 * p = 2). */
std::optional<FFElem> branch_taylor_unit(RootSet& rs, size_t idx, const Poly& P_base,
                                         const Rat& w) {
  ApproxRoot& r = rs.roots[idx];
  const FieldPtr& K = rs.tower->field(r.level);
  Rat shift = w * Rat(K->e());
  if (shift.get_den() != 1) return std::nullopt;
  Poly P = rs.tower->embed_poly(P_base, 0, r.level);
  std::vector<FieldElement> b = P.taylor_at(r.center);
  if (b.empty() || b[0].is_zero() || !(b[0].valuation() == Valuation(w))) return std::nullopt;
  for (size_t t = 1; t < b.size(); ++t) {
    if (b[t].is_zero()) continue;
    if (!(b[t].valuation().value() + Rat(static_cast<long>(t)) * r.center_gamma > w))
      return std::nullopt;
  }
  return unit_residue_of(K, b[0]);
}

FFElem branch_unit_residue(RootSet& rs, size_t idx, const Poly& P_base, const Rat& w) {
  ApproxRoot& r = rs.roots[idx];
  const FieldPtr& base = rs.tower->field(0);
  if (auto u = branch_taylor_unit(rs, idx, P_base, w)) return *u;

  /* norm route */
  int top = rs.tower->top();
  const auto& Rtop = rs.tower->field(top)->residue_field();
  Poly Qnz = r.defining_base;
  Poly g = poly_gcd(Qnz, P_base);
  if (g.degree() > 0) Qnz = poly_divexact(Qnz, g).monic();
  require(Qnz.degree() > 0, errc::internal_invariant_violation, "P vanishes on the whole factor");

  FieldElement res = poly_resultant(Qnz, P_base);
  require(!res.is_zero(), errc::internal_invariant_violation, "unexpected zero resultant");
  FFElem prod = rs.tower->embed_res(unit_residue_of(base, res), 0, top);

  for (size_t i : factor_entries(rs, idx)) {
    if (i == idx) continue;
    ApproxRoot& e = rs.roots[i];
    if (e.kind == ApproxRoot::Kind::single) {
      Valuation ws = single_eval_valuation(rs, i, P_base);
      if (!ws.is_finite()) continue;  // vanishing roots were divided out
      FFElem u = single_unit_residue(rs, i, P_base, ws.value());
      prod = Rtop->mul(prod, Rtop->inv(rs.tower->embed_res(u, e.level, top)));
    } else {
      Valuation ws = branch_eval_valuation(rs, i, P_base);
      if (!ws.is_finite()) continue;
      auto u = branch_taylor_unit(rs, i, P_base, ws.value());
      require(u.has_value(), errc::precision_cap_exceeded,
              "sibling cluster residue cannot be certified for the norm route");
      FFElem ut = rs.tower->embed_res(*u, e.level, top);
      prod = Rtop->mul(prod, Rtop->inv(Rtop->pow(ut, Int(e.count))));
    }
  }
  return ff_nth_root(Rtop, prod, r.count);
}

}  // namespace

FFElem certified_ratio_residue(RootSet& rs, size_t idx, const Poly& R_base, const FieldElement& rx,
                               const Poly& S_base, const FieldElement& sx, const Rat& vR,
                               const Rat& vS) {
  ApproxRoot& r = rs.roots[idx];

  if (r.kind == ApproxRoot::Kind::single) {
    Poly R = rs.tower->embed_poly(R_base, 0, r.level);
    Poly S = rs.tower->embed_poly(S_base, 0, r.level);
    if (r.exact) {
      FieldElement num = R.eval(r.value) * rx;
      FieldElement den = S.eval(r.value) * sx;
      FieldElement ratio = num * den.inverse();
      require(ratio.valuation() == Valuation(Rat(0)), errc::internal_invariant_violation,
              "ratio is not a unit");
      return ratio.residue();
    }
    FFElem uR = single_unit_residue(rs, idx, R_base, vR);
    FFElem uS = single_unit_residue(rs, idx, S_base, vS);
    const FieldPtr& K = rs.tower->field(r.level);
    const auto& Rf = K->residue_field();
    FFElem scale = Rf->mul(unit_residue_of(K, rx), Rf->inv(unit_residue_of(K, sx)));
    return Rf->mul(Rf->mul(uR, Rf->inv(uS)), scale);
  }

  int top = rs.tower->top();
  rs.relocate(idx, top);
  const FieldPtr& K = rs.tower->field(top);
  const auto& Rf = K->residue_field();
  FFElem uR = branch_unit_residue(rs, idx, R_base, vR);
  FFElem uS = branch_unit_residue(rs, idx, S_base, vS);
  FFElem scale = Rf->mul(unit_residue_of(K, rx), Rf->inv(unit_residue_of(K, sx)));
  return Rf->mul(Rf->mul(uR, Rf->inv(uS)), scale);
}

/* ---------------- difference data ---------------- */

DifferenceData difference_data(RootSet& rs, const std::vector<Rat>* radii) {
  size_t n = rs.size();
  DifferenceData dd;
  dd.per.assign(n, std::vector<PairMultiset>(n));

  /* cross entries: exact meeting depths from the digit histories */
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!(rs.roots[i].defining_base == rs.roots[j].defining_base)) {
        /* roots of coprime factors: still certified by histories when they
         * share the isolation tree; distinct factors were isolated
         * independently, so fall back to the product polynomial: their
         * histories live in different trees.  Distinct-factor roots are
         * never equal; their difference data is only needed for clustering,
         * so compute it from the two values when both are singles and fail
         * otherwise (multiplicities beyond squarefree factors are rare). */
        ApproxRoot& a = rs.roots[i];
        ApproxRoot& b = rs.roots[j];
        if (a.kind == ApproxRoot::Kind::single && b.kind == ApproxRoot::Kind::single) {
          while (true) {
            int t = rs.tower->top();
            FieldElement ya = rs.tower->embed(a.value, a.level, t);
            FieldElement yb = rs.tower->embed(b.value, b.level, t);
            Valuation dv = (ya - yb).valuation();
            bool cert = dv.is_finite();
            if (cert && !a.exact && !(dv < Valuation(a.gamma))) cert = false;
            if (cert && !b.exact && !(dv < Valuation(b.gamma))) cert = false;
            if ((a.exact && b.exact) || cert) {
              dd.per[i][j].entries = {{dv, 1}};
              break;
            }
            Rat bump = dv.is_finite() ? Rat(dv.value() + 1) : Rat(1);
            if (!a.exact) rs.refine(i, std::max(Rat(a.gamma * 2), bump));
            if (!b.exact) rs.refine(j, std::max(Rat(b.gamma * 2), bump));
          }
          continue;
        }
        fail(errc::precision_cap_exceeded,
             "cross-factor difference with cluster entries is not supported");
      }
      Valuation d = history_cross_depth(rs.roots[i], rs.roots[j]);
      dd.per[i][j].entries = {{d, rs.roots[j].count}};
    }

  /* within-branch multisets, pooled per squarefree factor */
  std::set<size_t> done;
  for (size_t i = 0; i < n; ++i) {
    if (rs.roots[i].kind != ApproxRoot::Kind::branch) continue;
    if (done.count(i)) continue;
    std::vector<size_t> sibs = factor_entries(rs, i);
    std::vector<size_t> branches;
    long branch_total = 0;
    for (size_t s : sibs)
      if (rs.roots[s].kind == ApproxRoot::Kind::branch) {
        branches.push_back(s);
        branch_total += rs.roots[s].count;
        done.insert(s);
      }

    VMultiset m = difference_multiset(rs.roots[i].defining_base);
    /* subtract all ordered cross-entry pairs */
    for (size_t a : sibs)
      for (size_t b : sibs) {
        if (a == b) continue;
        Valuation d = history_cross_depth(rs.roots[a], rs.roots[b]);
        ms_remove(m, d, rs.roots[a].count * rs.roots[b].count);
      }
    ms_normalize(m);
    (void)branch_total;

    /* leftover = sum of ordered within-cluster pairs over the branches.
     * Within-cluster differences sit at or above the cluster's certified
     * ladder depth.  Values below some feasible cluster's radius must be
     * attributed uniquely (they shape that cluster's profile); values at or
     * above every feasible radius only fill exact pair capacities and can
     * be distributed freely. */
    std::map<size_t, VMultiset> within;
    std::map<size_t, long> capacity;
    for (size_t b : branches) capacity[b] = rs.roots[b].count * (rs.roots[b].count - 1);
    auto radius_of = [&](size_t b) -> Rat {
      if (radii) return (*radii)[b];
      return rs.roots[b].center_gamma;  // conservative when radii are unknown
    };
    std::vector<std::pair<Valuation, long>> pending(m.begin(), m.end());
    bool progress = true;
    while (!pending.empty() && progress) {
      progress = false;
      for (auto it2 = pending.begin(); it2 != pending.end();) {
        std::vector<size_t> feas;
        for (size_t b : branches)
          if (capacity[b] > 0 && it2->first >= Valuation(rs.roots[b].center_gamma))
            feas.push_back(b);
        require(!feas.empty(), errc::internal_invariant_violation,
                "within-cluster difference below every cluster depth");
        if (feas.size() == 1) {
          size_t b = feas[0];
          require(capacity[b] >= it2->second, errc::precision_cap_exceeded,
                  "cluster difference attribution exceeds its capacity");
          ms_add(within[b], it2->first, it2->second);
          capacity[b] -= it2->second;
          it2 = pending.erase(it2);
          progress = true;
        } else {
          bool high_everywhere = true;
          for (size_t b : feas)
            if (it2->first < Valuation(radius_of(b))) high_everywhere = false;
          if (high_everywhere) {
            /* capacity filling; the split cannot affect profiles or ball
             * counts, which are pinned by the exact capacities */
            long left = it2->second;
            for (size_t b : feas) {
              long take = std::min(left, capacity[b]);
              if (take > 0) {
                ms_add(within[b], it2->first, take);
                capacity[b] -= take;
                left -= take;
              }
            }
            require(left == 0, errc::internal_invariant_violation,
                    "cluster capacities cannot absorb the difference pool");
            it2 = pending.erase(it2);
            progress = true;
          } else {
            ++it2;
          }
        }
      }
    }
    require(pending.empty(), errc::precision_cap_exceeded,
            "ambiguous attribution of within-cluster differences");
    for (size_t b : branches) {
      VMultiset mb = within.count(b) ? within[b] : VMultiset{};
      require(capacity[b] == 0, errc::internal_invariant_violation,
              "cluster difference attribution left a capacity gap");
      if (!mb.empty()) ms_divide(mb, rs.roots[b].count);
      dd.per[b][b].entries = std::move(mb);
    }
  }
  return dd;
}

}  // namespace stablered
