#ifndef STABLERED_MONODROMY_BOUND_HPP
#define STABLERED_MONODROMY_BOUND_HPP

#include <vector>

#include "stablered/monopoly.hpp"
#include "stablered/padic_roots.hpp"
#include "stablered/reduction.hpp"

namespace stablered {

/* m = l p^s + d with (l,p) = 1 and 1 <= d <= p-1.  When p | m the
 * decomposition is not unique; we pick d = p-1 (the largest valid choice)
 * and flag the ambiguity. */
struct RemarkCase {
  long l = 0;
  long s = 0;
  long d = 0;
  int case_label = 0;        // 1: d != 1;  2: d = 1, l > 1;  3: d = l = 1
  long wild_bound_exponent = 0;
  bool ambiguous = false;
};

RemarkCase remark_gg_case(long m, const Int& p);

/* Splitting data of L and the coarse upper bound for the degree of the
 * field E = F(rho_i, s0(y_i)^{1/p}) over K that contains the finite
 * monodromy extension:
 *   lcm(slope and radius denominators, relative to the base value group)
 *   x product of conjugacy-family sizes x p^{#classes}.
 * Explicitly coarse; no minimality is claimed.
 */
struct MonodromyBoundReport {
  std::vector<Int> slope_denominators;    // of the polygon slopes of L
  std::vector<Int> radius_denominators;   // of the v(rho_j)
  std::vector<long> branch_degrees;       // conjugacy-family sizes, one per family
  std::vector<std::vector<long>> class_branch_degrees;  // per dedupe class
  /* per class: v(s0(y)) (always 0 here) and the p-th-power flag of its
   * residue (always true over a finite field; reported for completeness) */
  std::vector<Rat> s0_valuations;
  std::vector<bool> s0_residue_pth_power;
  Int degree_bound;
  RemarkCase annotation;
};

/* s0 is f(Y) itself (the radicand of Cor-df's p-th roots). */
MonodromyBoundReport bound_report(const MonodromyData& md, const Poly& s0, RootSet& rs,
                                  const std::vector<CenterClass>& classes,
                                  const std::vector<Rat>& radii);

}  // namespace stablered

#endif
