#include "stablered/monodromy_bound.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "stablered/errors.hpp"

namespace stablered {

RemarkCase remark_gg_case(long m, const Int& p) {
  require(m >= 1, errc::precondition_violation, "m must be >= 1");
  RemarkCase rc;
  long pl = p.get_si();
  long rem = m % pl;
  if (rem != 0) {
    rc.d = rem;
  } else {
    rc.d = pl - 1;
    rc.ambiguous = pl > 2;  // for p = 2 the only valid d is 1
  }
  long rest = m - rc.d;
  rc.s = 0;
  if (rest > 0) {
    while (rest % pl == 0) {
      rest /= pl;
      ++rc.s;
    }
    rc.l = rest;
  } else {
    rc.l = 0;  // m <= p-1: no wild part
    rc.s = 0;
  }
  if (rc.d != 1) {
    rc.case_label = 1;
    rc.wild_bound_exponent = 1;
  } else if (rc.l > 1) {
    rc.case_label = 2;
    rc.wild_bound_exponent = pl == 2 ? rc.s : rc.s + 1;
  } else {
    rc.case_label = 3;
    rc.wild_bound_exponent = 2 * rc.s + 1;
  }
  return rc;
}

namespace {
Int int_lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}
}  // namespace

MonodromyBoundReport bound_report(const MonodromyData& md, const Poly& s0, RootSet& rs,
                                  const std::vector<CenterClass>& classes,
                                  const std::vector<Rat>& radii) {
  MonodromyBoundReport rep;
  const FieldPtr& base = rs.tower->field(0);
  Rat e0(base->e());

  /* denominators relative to the base value group: den(q * e0) is the
   * ramification needed over K to realize the value q */
  auto rel_den = [&](const Rat& q) { return rat_den(Rat(q * e0)); };

  {
    std::set<Int> dens;
    NewtonPolygon np = newton_polygon(md.L);
    for (const auto& seg : np.segments) dens.insert(rel_den(seg.slope));
    rep.slope_denominators.assign(dens.begin(), dens.end());
  }
  {
    std::set<Int> dens;
    for (const auto& r : radii) dens.insert(rel_den(r));
    rep.radius_denominators.assign(dens.begin(), dens.end());
  }

  rep.branch_degrees.assign(rs.family_sizes.begin(), rs.family_sizes.end());
  for (const auto& cls : classes) {
    std::set<int> fams;
    for (size_t idx : cls.groups) fams.insert(rs.roots[idx].family);
    std::vector<long> degs;
    for (int f : fams) degs.push_back(rs.family_sizes[static_cast<size_t>(f)]);
    std::sort(degs.begin(), degs.end());
    rep.class_branch_degrees.push_back(std::move(degs));
  }

  /* s0(y) data per class (the p-th power flag is trivially true over a
   * finite residue field; kept as report data) */
  for (const auto& cls : classes) {
    Valuation vs0 = certified_eval_valuation(rs, cls.rep, s0);
    require(vs0.is_finite(), errc::internal_invariant_violation, "s0 vanishes at a center");
    rep.s0_valuations.push_back(vs0.value());
    rep.s0_residue_pth_power.push_back(true);
  }

  Int l = 1;
  for (const Int& d : rep.slope_denominators) l = int_lcm(l, d);
  for (const Int& d : rep.radius_denominators) l = int_lcm(l, d);
  Int prod = 1;
  for (long f : rep.branch_degrees) prod *= f;
  Int pcl = 1;
  long total_classes = 0;
  for (const auto& cls : classes) total_classes += cls.n_classes;
  for (long i = 0; i < total_classes; ++i) pcl *= base->p();
  rep.degree_bound = l * prod * pcl;

  rep.annotation = remark_gg_case(md.m, base->p());
  return rep;
}

}  // namespace stablered
