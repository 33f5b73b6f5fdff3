#ifndef STABLERED_PADIC_ROOTS_HPP
#define STABLERED_PADIC_ROOTS_HPP

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "stablered/poly.hpp"

namespace stablered {

/* A strictly increasing chain of fields K_0 c K_1 c ... with exact
 * embeddings between consecutive levels.  Every host field used during root
 * isolation is a member, so any two certified values can be compared after
 * embedding into the top level.  The chain only grows.
 */
class FieldTower {
 public:
  FieldTower(FieldPtr base, long max_extension, std::optional<Rat> precision_cap);

  int top() const { return static_cast<int>(fields_.size()) - 1; }
  const FieldPtr& field(int level) const { return fields_[static_cast<size_t>(level)]; }
  const std::optional<Rat>& precision_cap() const { return cap_; }
  long max_extension() const { return max_extension_; }

  /* top level whose ramification index is divisible by d (extends if needed) */
  int ensure_ramification(long d);
  /* top level whose residue field splits phi completely; phi lives over the
   * residue field of `level` */
  int ensure_residue_split(int level, const FFPoly& phi);

  FieldElement embed(const FieldElement& x, int from, int to) const;
  FFElem embed_res(const FFElem& a, int from, int to) const;
  FFPoly embed_res_poly(const FFPoly& f, int from, int to) const;
  Poly embed_poly(const Poly& f, int from, int to) const;

 private:
  std::vector<FieldPtr> fields_;
  std::vector<FieldEmbedding> steps_;  // steps_[i]: level i -> level i+1
  long max_extension_;
  std::optional<Rat> cap_;

  void push_level(FieldPtr f, FieldEmbedding step);
};

using TowerPtr = std::shared_ptr<FieldTower>;

/* One step of the digit history of an entry: at some recursion level the
 * entry's roots chose `(segment, residual factor, digit)`, and any root
 * with a different choice differs from ours at valuation exactly `depth`
 * (or min of the two segment depths when the segments differ). */
struct HistStep {
  Valuation depth;  // v(B sigma): agreement depth bought by this digit
  long seg = 0;
  long fac = 0;
  long digit = 0;

  bool same_choice(const HistStep& o) const {
    return seg == o.seg && fac == o.fac && digit == o.digit;
  }
};

/* One entry of the root list.  Two kinds:
 *
 * single: a certified approximation of one root y of a squarefree factor Q:
 * v(y - value) >= gamma, witnessed by a Hensel certificate (or exact).
 *
 * branch: a cluster of `count` roots, all sharing the digit ladder up to
 * `center` with v(y - center) >= center_gamma, whose further digits live
 * outside every host of the radical shape Q(u, pi).  When `transitive` the
 * cluster is one Galois orbit over the completion of the host (certified by
 * Ore's regularity criterion: single Newton segment, lattice step times
 * residual degree = cluster size, residual irreducible of multiplicity 1).
 * Cluster data is computed exactly from resultant Newton polygons over the
 * base field; non-transitive clusters additionally require the computed
 * multisets to be single-valued, and the genus-sum check guards the class
 * bookkeeping downstream.
 */
struct ApproxRoot {
  enum class Kind { single, branch };
  Kind kind = Kind::single;

  int level = 0;
  long count = 1;
  int multiplicity = 1;
  int family = 0;
  Valuation slope;  // common v(y); infinite for the zero root
  std::vector<HistStep> hist;

  /* single */
  FieldElement value;
  bool exact = false;
  Rat gamma;
  Poly defining;        // squarefree factor over `level`
  Poly defining_deriv;
  Poly defining_base;   // the same factor over the tower base

  /* branch */
  bool transitive = false;
  FieldElement center;
  Rat center_gamma;

  Valuation gamma_val() const {
    if (kind == Kind::branch) return Valuation(center_gamma);
    return exact ? Valuation::infinity() : Valuation(gamma);
  }
};

struct IsolationOptions {
  std::optional<Rat> precision_cap;  // overrides the tower's when set
  long max_refine_rounds = 64;
  /* emit an Ore-certified branch once the next digit would push e*k past
   * this; irregular clusters ladder four times further before stalling */
  long branch_degree_soft_cap = 64;
};

class RootSet {
 public:
  TowerPtr tower;
  std::vector<ApproxRoot> roots;
  std::vector<long> family_sizes;  // indexed by family id, counts roots
  IsolationOptions opts;

  size_t size() const { return roots.size(); }
  long root_count() const;
  /* Newton-refine a single root until gamma >= target (no-op when exact;
   * branch ladders cannot be deepened after emission) */
  void refine(size_t idx, const Rat& target);
  /* move the entry's data to a higher tower level */
  void relocate(size_t idx, int level);

  const Rat& cap_or_default() const;
};

RootSet isolate_roots(const Poly& F, TowerPtr tower, IsolationOptions opts = {});

/* One entry per polygon segment, residual polynomial in the segment
 * variable (degree = length / lattice step); zero roots must be removed
 * beforehand. */
struct SlopeBranch {
  Rat slope;
  long length = 0;
  FFPoly residual;
};
std::vector<SlopeBranch> slope_split(const Poly& F);

/* Certified valuation of P(y) at (any) root y tracked by roots[idx]; exact
 * vanishing is detected and reported as an infinite valuation.  Branch
 * entries share one value per cluster, extracted from the Newton polygon of
 * Res_Y(Q, T - P(Y)) over the base after removing the other entries'
 * certified contributions. */
Valuation certified_eval_valuation(RootSet& rs, size_t idx, const Poly& P_base);

/* Unconditional lower bound for v(P(y)) (exact for singles; the Taylor
 * bound at the center for clusters). */
Valuation certified_lower_bound(RootSet& rs, size_t idx, const Poly& P_base);

/* Certified residue of the unit R(y) * rx / (S(y) * sx), rx and sx exact
 * elements of the entry's host level; vR, vS are the certified valuations
 * of R(y), S(y) and the total must be a unit. */
FFElem certified_ratio_residue(RootSet& rs, size_t idx, const Poly& R_base, const FieldElement& rx,
                               const Poly& S_base, const FieldElement& sx, const Rat& vR,
                               const Rat& vS);

/* per[i][j]: multiset of v(y - z) for one fixed root y of entry i against
 * all roots z of entry j (for i != j this is pinned exactly by the digit
 * history; within-branch data comes from a difference-resultant polygon
 * over the base). */
struct PairMultiset {
  std::vector<std::pair<Valuation, long>> entries;  // sorted by valuation

  long total() const;
  long count_at_least(const Valuation& t) const;
  bool single_valued() const { return entries.size() == 1; }
};

struct DifferenceData {
  std::vector<std::vector<PairMultiset>> per;
};

/* radii: per-entry v(rho), used to attribute pooled within-cluster
 * differences.  Values at or above the radius of every feasible cluster
 * only fill exact pair capacities (they cannot change any profile below a
 * radius or any ball count), so they may be distributed freely; values
 * below some feasible radius must be attributable by the certified ladder
 * depths or the computation fails. */
DifferenceData difference_data(RootSet& rs, const std::vector<Rat>* radii = nullptr);

}  // namespace stablered

#endif
