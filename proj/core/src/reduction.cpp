#include "stablered/reduction.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "stablered/errors.hpp"

namespace stablered {

ValidationResult validate_input(const Poly& f) {
  const auto& K = f.field();
  const Int& p = K->p();
  ValidationResult res;
  require(!f.is_zero(), errc::precondition_violation, "f must be nonzero");
  res.n = f.degree();
  require(res.n >= 1, errc::precondition_violation, "f must be nonconstant");
  require(f.lc() == FieldElement::one(K), errc::precondition_violation, "f must be monic");
  require(f.is_integral(), errc::precondition_violation, "f must have integral coefficients");

  auto sqf = squarefree_decomposition(f);
  for (const auto& [part, mult] : sqf)
    require(Int(mult) % p != 0, errc::multiplicity_divisible_by_p,
            "a zero of f has multiplicity divisible by p");
  require(Int(res.n) % p != 0, errc::degree_divisible_by_p, "p divides deg f");

  Poly W = squarefree_part(f);
  res.m = W.degree();

  /* equidistance: distinct zeros stay distinct in reduction, i.e. the
   * reduction of W is squarefree of the same degree */
  require(W.is_integral(), errc::internal_invariant_violation, "squarefree part not integral");
  const auto& R = K->residue_field();
  std::vector<FFElem> wc;
  for (const auto& c : W.coeffs()) wc.push_back(c.residue());
  FFPoly Wbar = ffpoly_from(R, std::move(wc));
  require(Wbar.degree() == res.m, errc::not_equidistant,
          "zeros of f escape to infinity in reduction");
  require(ffpoly_is_squarefree(Wbar), errc::not_equidistant,
          "two zeros of f have the same specialization");

  res.genus_c = Rat(p - 1) * Rat(res.m - 1) / 2;
  res.small_m_warning = Rat(res.m) * Rat(p - 1) < Rat(res.n);
  return res;
}

Rat radius_valuation(const std::map<long, Valuation>& tail_vals, const Rat& lambda_p_val) {
  bool have = false;
  Rat best;
  for (const auto& [i, v] : tail_vals) {
    if (!v.is_finite()) continue;  // A_i(y) = 0 exactly: no constraint from this index
    Rat cand = (lambda_p_val - v.value()) / Rat(i);
    if (!have || cand > best) {
      best = cand;
      have = true;
    }
  }
  require(have, errc::empty_tail, "all tail coefficients vanished at the center");
  return best;
}

std::map<long, Valuation> tail_valuations(const SpecialDecomposition& dec, RootSet& rs, size_t idx) {
  std::map<long, Valuation> out;
  /* v(A_i(y)) = v(c_i) + v(N_i(y)) - i * v(s0(y)); s0(y) must be a unit */
  Valuation vs0 = certified_eval_valuation(rs, idx, dec.s0);
  require(vs0 == Valuation(Rat(0)), errc::non_unit_s0_at_center,
          "s0 does not reduce to a unit at a center");
  for (long i = dec.rep.r + 1; i <= dec.rep.n; ++i) {
    Valuation vN = certified_eval_valuation(rs, idx, dec.N(i));
    Valuation vc = dec.c(i).valuation();
    out[i] = vc + vN;
  }
  return out;
}

std::vector<std::pair<long, FFElem>> artin_schreier_normalize(
    const FiniteFieldPtr& R, std::vector<std::pair<long, FFElem>> rhs, const Int& p) {
  long pl = p.get_si();
  std::map<long, FFElem> terms;
  for (auto& [i, c] : rhs) {
    auto it = terms.find(i);
    if (it == terms.end())
      terms.emplace(i, c);
    else
      it->second = R->add(it->second, c);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = terms.begin(); it != terms.end(); ++it) {
      if (it->first % pl != 0 || it->first == 0) continue;
      if (R->is_zero(it->second)) continue;
      long j = it->first / pl;
      FFElem root = R->frobenius_inverse(it->second);
      auto jt = terms.find(j);
      if (jt == terms.end())
        terms.emplace(j, root);
      else
        jt->second = R->add(jt->second, root);
      it->second = R->zero();
      changed = true;
      break;
    }
  }
  std::vector<std::pair<long, FFElem>> out;
  for (auto& [i, c] : terms)
    if (!R->is_zero(c)) out.emplace_back(i, c);
  return out;
}

ComponentData reduced_equation(const SpecialDecomposition& dec, RootSet& rs, size_t idx,
                               const Rat& rho_val) {
  require(rho_val > 0, errc::internal_invariant_violation, "radius valuation must be positive");
  const Int& p = dec.rep.p;
  const Rat lambda_p = rs.tower->field(0)->lambda_p_valuation();

  ComponentData cd;
  cd.root_index = idx;
  cd.radius_valuation = rho_val;
  cd.residues_up_to_unit = p != 2;
  cd.residues_pooled = rs.roots[idx].kind == ApproxRoot::Kind::branch;

  /* host level must represent rho = pi^{e v(rho)} and lambda^p as pi-powers */
  long need = std::lcm(rat_den(rho_val).get_si(), rat_den(lambda_p).get_si());
  int lvl = rs.tower->ensure_ramification(need);
  rs.relocate(idx, std::max(lvl, rs.roots[idx].level));
  lvl = rs.roots[idx].level;
  const FieldPtr& K = rs.tower->field(lvl);
  const auto& R = K->residue_field();
  cd.as_field = R;

  auto tails = tail_valuations(dec, rs, idx);

  /* surviving indices: equality in v(A_i(y)) + i v(rho) >= v(lambda^p) */
  std::vector<long> surv;
  for (const auto& [i, v] : tails) {
    if (!v.is_finite()) continue;
    Rat total = v.value() + Rat(i) * rho_val;
    require(total >= lambda_p, errc::internal_invariant_violation,
            "tail monomial below the lambda^p line");
    if (total == lambda_p) surv.push_back(i);
  }
  require(!surv.empty(), errc::internal_invariant_violation, "no surviving monomials");
  for (long i : surv)
    require(Int(i) != dec.rep.p_alpha, errc::internal_invariant_violation,
            "p^alpha monomial survived at a zero of the monodromy polynomial");

  /* pairwise distinct prime-to-p parts */
  {
    std::vector<Int> parts;
    for (long i : surv) {
      Int v(i);
      while (v % p == 0) v /= p;
      parts.push_back(v);
    }
    std::sort(parts.begin(), parts.end());
    require(std::adjacent_find(parts.begin(), parts.end()) == parts.end(),
            errc::internal_invariant_violation, "surviving exponents share a prime-to-p part");
  }

  /* residue of A_i(y) rho^i / lambda^p as the certified unit ratio
   *   [c_i rho^i N_i(y)] / [lambda^p-normalizer s0(y)^i];
   * for p = 2 the normalizer 4 = (pi^e)^2 is exact, for odd p it is a
   * pi-power and residues carry one global unknown unit. */
  Rat e_rat(K->e());
  for (long i : surv) {
    Valuation vN = tails.at(i) + (-dec.c(i).valuation());  // v(N_i(y)), s0-part is 0
    require(vN.is_finite(), errc::internal_invariant_violation, "surviving index with zero tail");

    Rat rho_shift = rho_val * Rat(i) * e_rat;
    Rat lam_shift = lambda_p * e_rat;
    require(rho_shift.get_den() == 1 && lam_shift.get_den() == 1,
            errc::internal_invariant_violation, "normalizers not representable at this level");
    FieldElement rx = rs.tower->embed(dec.c(i), 0, lvl) *
                      FieldElement::pi_pow(K, rho_shift.get_num().get_si());
    FieldElement sx = FieldElement::pi_pow(K, lam_shift.get_num().get_si());

    Poly s0i = dec.s0;
    for (long t = 1; t < i; ++t) s0i = s0i * dec.s0;
    FFElem res = certified_ratio_residue(rs, idx, dec.N(i), rx, s0i, sx, vN.value(), Rat(0));
    cd.surviving.emplace_back(i, res);
  }

  cd.as_rhs = artin_schreier_normalize(R, cd.surviving, p);
  require(!cd.as_rhs.empty(), errc::internal_invariant_violation, "empty Artin-Schreier equation");
  cd.conductor = 0;
  for (const auto& [i, c] : cd.as_rhs) cd.conductor = std::max(cd.conductor, i);
  require(cd.conductor >= 2, errc::internal_invariant_violation,
          "conductor degree 1: component would have genus 0");
  require(Int(cd.conductor) % p != 0, errc::internal_invariant_violation,
          "conductor degree divisible by p after normalization");
  cd.genus = ((p.get_si() - 1) * (cd.conductor - 1)) / 2;
  require(cd.genus >= 1, errc::internal_invariant_violation, "component of genus 0");
  return cd;
}

bool verify_reduction(const SpecialDecomposition& dec, RootSet& rs, size_t idx, const Rat& rho_val) {
  const Rat lambda_p = rs.tower->field(0)->lambda_p_valuation();

  /* head: v(a_i(y)) + i v(rho) >= 0 for 1 <= i <= r; an unconditional
   * lower bound on the numerator settles the inequality in almost every
   * case, with the exact certified value as the tiebreaker */
  for (long i = 1; i <= dec.rep.r; ++i) {
    const RatFunc& a = dec.head[static_cast<size_t>(i - 1)];
    Valuation vd = certified_eval_valuation(rs, idx, a.den());
    require(vd.is_finite(), errc::internal_invariant_violation, "head denominator vanishes");
    Valuation lb = certified_lower_bound(rs, idx, a.num());
    Valuation va_lb = lb + (-vd);
    if (!va_lb.is_finite() || va_lb.value() + Rat(i) * rho_val >= 0) continue;
    Valuation vn = certified_eval_valuation(rs, idx, a.num());
    Valuation va = vn + (-vd);
    if (va.is_finite() && va.value() + Rat(i) * rho_val < 0) return false;
  }

  /* tail: min_i (v(A_i(y)) + i v(rho)) == v(lambda^p) */
  auto tails = tail_valuations(dec, rs, idx);
  Valuation mn = Valuation::infinity();
  for (const auto& [i, v] : tails) mn = min(mn, v + Valuation(Rat(Rat(i) * rho_val)));
  return mn == Valuation(lambda_p);
}

bool verify_reduction_exact(const SpecialDecomposition& dec, const FieldElement& y,
                            const FieldElement& rho) {
  const auto& K = y.field();
  const Rat lambda_p = K->lambda_p_valuation();
  require(!rho.is_zero(), errc::precondition_violation, "rho must be nonzero");

  FieldElement s0y = dec.s0.eval(y);
  require(!s0y.is_zero(), errc::non_unit_s0_at_center, "s0(y) = 0");
  FieldElement rpow = FieldElement::one(K);
  for (long i = 1; i <= dec.rep.r; ++i) {
    rpow = rpow * rho;
    const RatFunc& a = dec.head[static_cast<size_t>(i - 1)];
    FieldElement den = a.den().eval(y);
    require(!den.is_zero(), errc::internal_invariant_violation, "head denominator vanishes at y");
    FieldElement val = a.num().eval(y) * den.inverse() * rpow;
    Valuation v = val.valuation();
    if (v.is_finite() && v.value() < 0) return false;
  }

  /* min coefficient valuation of f(rho X + y)/s0(y) - H(rho X, y)^p, which
   * equals -sum A_i(y) rho^i X^i */
  Valuation mn = Valuation::infinity();
  rpow = FieldElement::one(K);
  for (long i = 1; i <= dec.rep.n; ++i) {
    rpow = rpow * rho;
    if (i <= dec.rep.r) continue;
    const RatFunc& A = dec.A(i);
    FieldElement den = A.den().eval(y);
    require(!den.is_zero(), errc::internal_invariant_violation, "tail denominator vanishes at y");
    FieldElement val = A.num().eval(y) * den.inverse() * rpow;
    mn = min(mn, val.valuation());
  }
  return mn == Valuation(lambda_p);
}

std::vector<CenterClass> dedupe_centers(const RootSet& rs, const std::vector<Rat>& radii,
                                        const DifferenceData& diff) {
  size_t n = radii.size();
  require(rs.size() == n, errc::precondition_violation, "radius list does not match the roots");

  /* union-find: entries are linked when some pair of their roots is close
   * at the smaller radius scale */
  std::vector<size_t> parent(n);
  for (size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<size_t(size_t)> find = [&](size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      Rat rmin = std::min(radii[i], radii[j]);
      if (diff.per[i][j].count_at_least(Valuation(rmin)) > 0) {
        require(radii[i] == radii[j], errc::inconsistent_radii_in_class,
                "close centers with different radii");
        parent[find(i)] = find(j);
      }
    }

  std::map<size_t, std::vector<size_t>> clusters;
  for (size_t i = 0; i < n; ++i) clusters[find(i)].push_back(i);

  std::vector<CenterClass> out;
  for (auto& [root, members] : clusters) {
    CenterClass cc;
    cc.groups = members;
    std::sort(cc.groups.begin(), cc.groups.end());
    cc.rep = cc.groups.front();
    cc.radius = radii[cc.rep];
    long total = 0;
    for (size_t g : cc.groups) total += rs.roots[g].count;

    /* ball size at the radius level, from any member's perspective; the
     * class partition is checked to be consistent from every side */
    long ball = -1;
    for (size_t g : cc.groups) {
      long s = 1;
      for (size_t h : cc.groups) s += diff.per[g][h].count_at_least(Valuation(cc.radius));
      if (ball < 0) ball = s;
      require(ball == s, errc::internal_invariant_violation,
              "inhomogeneous class sizes inside a cluster");
    }
    require(ball >= 1 && total % ball == 0, errc::internal_invariant_violation,
            "class size does not divide the cluster");
    cc.class_size = ball;
    cc.n_classes = total / ball;
    out.push_back(std::move(cc));
  }
  std::sort(out.begin(), out.end(),
            [](const CenterClass& a, const CenterClass& b) { return a.rep < b.rep; });
  return out;
}

std::vector<int> ReductionTree::leaves() const {
  std::vector<int> out;
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].component) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

/* regular internal tree of one CenterClass with n_classes > 1: meeting
 * levels and ball counts come from the within-cluster difference profile,
 * which is Galois-homogeneous */
void expand_class_subtree(ReductionTree& tree, int parent, const CenterClass& cc,
                          const std::vector<std::pair<Valuation, long>>& profile, size_t comp_idx,
                          long n_classes, size_t level_pos, long total_roots) {
  /* profile: distinct depths below radius, ascending, with per-root counts
   * of strictly-closer pairs; at each level the classes split evenly */
  if (n_classes == 1) {
    TreeNode leaf;
    leaf.parent = parent;
    leaf.depth = Valuation(cc.radius);
    leaf.component = comp_idx;
    tree.nodes.push_back(leaf);
    tree.nodes[static_cast<size_t>(parent)].children.push_back(
        static_cast<int>(tree.nodes.size()) - 1);
    return;
  }
  require(level_pos < profile.size(), errc::unrecognized_shape,
          "class subtree exhausted its difference profile");
  const auto& [depth, closer] = profile[level_pos];
  /* ball size at the next level: roots with difference >= next depth */
  long ball_here = total_roots;  // all current roots meet at `depth`
  long ball_next = 1;
  for (size_t t = level_pos + 1; t < profile.size(); ++t) ball_next += profile[t].second;
  ball_next += cc.class_size - 1;  // within-class pairs sit at >= radius
  (void)ball_here;
  require(total_roots % ball_next == 0, errc::unrecognized_shape,
          "inhomogeneous split in a class subtree");
  long parts = total_roots / ball_next;
  require(parts > 1, errc::unrecognized_shape, "degenerate split in a class subtree");

  TreeNode inner;
  inner.parent = parent;
  inner.depth = depth;
  tree.nodes.push_back(inner);
  int me = static_cast<int>(tree.nodes.size()) - 1;
  tree.nodes[static_cast<size_t>(parent)].children.push_back(me);
  long sub_classes = n_classes / parts;
  require(sub_classes * parts == n_classes, errc::unrecognized_shape,
          "class count does not split evenly");
  for (long q = 0; q < parts; ++q)
    expand_class_subtree(tree, me, cc, profile, comp_idx, sub_classes, level_pos + 1, ball_next);
}

/* per-root difference profile of a cluster: distinct values below radius */
std::vector<std::pair<Valuation, long>> cluster_profile(const CenterClass& cc, RootSet& rs,
                                                        const DifferenceData& diff) {
  std::map<std::pair<bool, Rat>, long> acc;  // (finite, value) -> count
  size_t g = cc.rep;
  (void)rs;
  for (size_t h : cc.groups)
    for (const auto& [v, c] : diff.per[g][h].entries) {
      if (v >= Valuation(cc.radius)) continue;
      acc[{true, v.value()}] += c;
    }
  std::vector<std::pair<Valuation, long>> out;
  for (auto& [k, c] : acc) out.emplace_back(Valuation(k.second), c);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace

ReductionTree build_tree(const std::vector<CenterClass>& classes,
                         const std::vector<ComponentData>& components, RootSet& rs,
                         const DifferenceData& diff) {
  ReductionTree tree;
  tree.components = components;
  TreeNode root;
  root.parent = -1;
  root.depth = Valuation(Rat(0));
  tree.nodes.push_back(root);
  if (classes.empty()) return tree;

  size_t nc = classes.size();
  /* pairwise meeting depth between clusters: representative-independent,
   * certified single-valued */
  std::vector<std::vector<Valuation>> delta(nc, std::vector<Valuation>(nc, Valuation::infinity()));
  for (size_t a = 0; a < nc; ++a)
    for (size_t b = a + 1; b < nc; ++b) {
      std::set<Rat> vals;
      for (size_t g : classes[a].groups)
        for (size_t h : classes[b].groups)
          for (const auto& [v, c] : diff.per[g][h].entries) {
            require(v.is_finite(), errc::internal_invariant_violation,
                    "coincident centers in distinct clusters");
            vals.insert(v.value());
          }
      require(vals.size() == 1, errc::unrecognized_shape,
              "cluster pair with non-constant meeting depth");
      delta[a][b] = delta[b][a] = Valuation(*vals.begin());
      require(delta[a][b] < Valuation(std::min(classes[a].radius, classes[b].radius)),
              errc::internal_invariant_violation, "distinct clusters meet above a radius");
    }

  /* ultrametric check at cluster level */
  for (size_t a = 0; a < nc; ++a)
    for (size_t b = 0; b < nc; ++b)
      for (size_t c = 0; c < nc; ++c) {
        if (a == b || b == c || a == c) continue;
        require(delta[a][c] >= min(delta[a][b], delta[b][c]),
                errc::internal_invariant_violation, "cluster depths violate the ultrametric");
      }

  /* recursive clustering over the class-objects */
  std::function<void(int, const std::vector<size_t>&, const Valuation&)> build =
      [&](int parent, const std::vector<size_t>& members, const Valuation& level) {
        std::vector<int> part(members.size(), -1);
        int nparts = 0;
        for (size_t i = 0; i < members.size(); ++i) {
          if (part[i] >= 0) continue;
          std::vector<size_t> stack{i};
          part[i] = nparts;
          while (!stack.empty()) {
            size_t x = stack.back();
            stack.pop_back();
            for (size_t y = 0; y < members.size(); ++y) {
              if (part[y] >= 0) continue;
              if (delta[members[x]][members[y]] > level) {
                part[y] = part[i];
                stack.push_back(y);
              }
            }
          }
          ++nparts;
        }
        for (int pc = 0; pc < nparts; ++pc) {
          std::vector<size_t> sub;
          for (size_t i = 0; i < members.size(); ++i)
            if (part[i] == pc) sub.push_back(members[i]);
          if (sub.size() == 1) {
            size_t ci = sub[0];
            const CenterClass& cc = classes[ci];
            if (cc.n_classes == 1) {
              TreeNode leaf;
              leaf.parent = parent;
              leaf.depth = Valuation(cc.radius);
              leaf.component = ci;
              tree.nodes.push_back(leaf);
              tree.nodes[static_cast<size_t>(parent)].children.push_back(
                  static_cast<int>(tree.nodes.size()) - 1);
            } else {
              auto profile = cluster_profile(cc, rs, diff);
              long total = 0;
              for (size_t g : cc.groups) total += rs.roots[g].count;
              expand_class_subtree(tree, parent, cc, profile, ci, cc.n_classes, 0, total);
            }
            continue;
          }
          Valuation meet = Valuation::infinity();
          for (size_t x = 0; x < sub.size(); ++x)
            for (size_t y = x + 1; y < sub.size(); ++y) meet = min(meet, delta[sub[x]][sub[y]]);
          TreeNode inner;
          inner.parent = parent;
          inner.depth = meet;
          tree.nodes.push_back(inner);
          int me = static_cast<int>(tree.nodes.size()) - 1;
          tree.nodes[static_cast<size_t>(parent)].children.push_back(me);
          build(me, sub, meet);
        }
      };
  std::vector<size_t> all(nc);
  for (size_t i = 0; i < nc; ++i) all[i] = i;
  build(0, all, Valuation(Rat(0)));
  return tree;
}

int classify_genus2(const ReductionTree& tree, long m, const Int& p) {
  require(p == 2 && m == 5, errc::not_genus2_case, "classification applies to p = 2, m = 5 only");
  auto lv = tree.leaves();
  if (lv.size() == 1) {
    const auto& cd = tree.components[*tree.nodes[static_cast<size_t>(lv[0])].component];
    if (cd.genus == 2) return 3;
    fail(errc::unrecognized_shape, "single end of genus != 2");
  }
  if (lv.size() == 2) {
    const auto& c0 = tree.components[*tree.nodes[static_cast<size_t>(lv[0])].component];
    const auto& c1 = tree.components[*tree.nodes[static_cast<size_t>(lv[1])].component];
    if (c0.genus != 1 || c1.genus != 1) fail(errc::unrecognized_shape, "two ends not both genus 1");
    int p0 = tree.nodes[static_cast<size_t>(lv[0])].parent;
    int p1 = tree.nodes[static_cast<size_t>(lv[1])].parent;
    if (p0 == 0 && p1 == 0) return 1;
    if (p0 == p1 && p0 != 0) return 2;
    fail(errc::unrecognized_shape, "two genus-1 ends in an unexpected arrangement");
  }
  fail(errc::unrecognized_shape, "unexpected number of positive-genus ends");
}

bool genus_sum_check(const ReductionTree& tree, long m, const Int& p) {
  long sum = 0;
  for (int leaf : tree.leaves())
    sum += tree.components[*tree.nodes[static_cast<size_t>(leaf)].component].genus;
  Rat expect = Rat(p - 1) * Rat(m - 1) / 2;
  return Rat(sum) == expect;
}

}  // namespace stablered
