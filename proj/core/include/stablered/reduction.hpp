#ifndef STABLERED_REDUCTION_HPP
#define STABLERED_REDUCTION_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stablered/decomp.hpp"
#include "stablered/monopoly.hpp"
#include "stablered/padic_roots.hpp"

namespace stablered {

struct ValidationResult {
  long n = 0;
  long m = 0;            // number of distinct zeros of f
  Rat genus_c;           // (p-1)(m-1)/2
  bool small_m_warning = false;  // m(p-1) < n
};

/* f monic integral, (n,p) = 1, multiplicities prime to p, distinct zeros
 * with distinct specializations (reduction of the squarefree part stays
 * squarefree of full degree). */
ValidationResult validate_input(const Poly& f);

/* v(rho_j) = max over finite tail valuations of (v(lambda^p) - v(A_i(y)))/i */
Rat radius_valuation(const std::map<long, Valuation>& tail_vals, const Rat& lambda_p_val);

/* tail valuations v(A_i(y_j)) for i in M0, certified; common to all roots
 * described by entry idx */
std::map<long, Valuation> tail_valuations(const SpecialDecomposition& dec, RootSet& rs, size_t idx);

struct ComponentData {
  size_t root_index = 0;  // representative entry in the RootSet
  Rat radius_valuation;
  std::vector<std::pair<long, FFElem>> surviving;  // (i, residue of A_i(y) rho^i / lambda^p)
  std::vector<std::pair<long, FFElem>> as_rhs;     // Artin-Schreier right-hand side
  FiniteFieldPtr as_field;
  long conductor = 0;  // d: prime-to-p degree of the normalized right-hand side
  long genus = 0;      // (p-1)(d-1)/2
  bool residues_up_to_unit = false;  // odd p: coefficients known up to one global unit
  /* center is an unsplit cluster: residues recovered from the Galois-stable
   * norm product (conductor and genus are exponent data and unaffected) */
  bool residues_pooled = false;
};

ComponentData reduced_equation(const SpecialDecomposition& dec, RootSet& rs, size_t idx,
                               const Rat& rho_val);

/* Z^p - Z = g(x) normalization: while some exponent is divisible by p,
 * replace c x^{p i} by c^{1/p} x^i (substituting Z -> Z + c^{1/p} x^i). */
std::vector<std::pair<long, FFElem>> artin_schreier_normalize(
    const FiniteFieldPtr& R, std::vector<std::pair<long, FFElem>> rhs, const Int& p);

/* Prop-deg style verification at (y, rho): H(rho X, y) integral and the
 * tail minimum exactly v(lambda^p).  Valuation-level for certified entries;
 * fully symbolic when the root is exact and rho concrete. */
bool verify_reduction(const SpecialDecomposition& dec, RootSet& rs, size_t idx, const Rat& rho_val);
bool verify_reduction_exact(const SpecialDecomposition& dec, const FieldElement& y,
                            const FieldElement& rho);

/* A maximal set of equivalent Gauss valuations (y, rho): the entry groups
 * whose roots participate, how many parallel identical classes they form
 * (conjugate components), and the number of roots per class. */
struct CenterClass {
  std::vector<size_t> groups;  // RootSet entry indices merged by closeness
  long n_classes = 1;          // parallel conjugate classes described
  long class_size = 1;         // roots per class
  Rat radius;
  size_t rep = 0;              // representative entry index
};

std::vector<CenterClass> dedupe_centers(const RootSet& rs, const std::vector<Rat>& radii,
                                        const DifferenceData& diff);

struct TreeNode {
  int parent = -1;
  Valuation depth;                      // 0 at the root, v(rho) at leaves
  std::optional<size_t> component;      // leaf: index into components
  std::vector<int> children;
};

struct ReductionTree {
  std::vector<TreeNode> nodes;  // node 0 = original component
  std::vector<ComponentData> components;

  std::vector<int> leaves() const;
};

/* Cluster tree over the classes: every class becomes a leaf at depth
 * v(rho); conjugate classes of one CenterClass expand into the regular
 * subtree dictated by the within-group difference profile. */
ReductionTree build_tree(const std::vector<CenterClass>& classes,
                         const std::vector<ComponentData>& components, RootSet& rs,
                         const DifferenceData& diff);

/* degeneration types for p = 2, m = 5 (genus-2 covers): 1 = two genus-1
 * ends on the original component, 2 = two genus-1 ends on a common
 * intermediate component, 3 = one genus-2 end */
int classify_genus2(const ReductionTree& tree, long m, const Int& p);

bool genus_sum_check(const ReductionTree& tree, long m, const Int& p);

}  // namespace stablered

#endif
