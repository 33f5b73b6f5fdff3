#ifndef STABLERED_NUMFIELD_HPP
#define STABLERED_NUMFIELD_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stablered/finite_field.hpp"
#include "stablered/rational.hpp"

namespace stablered {

class FieldDescriptor;
using FieldPtr = std::shared_ptr<const FieldDescriptor>;

/* The working coefficient field K = Q(u, pi) with pi^e = p and u a root of
 * a monic integral polynomial U that is irreducible mod p.  K carries the
 * unique extension of the p-adic valuation, normalized by v(p) = 1, with
 * value group (1/e)Z and residue field F_{p^k}, k = deg U.
 *
 * Elements are stored in the reduced basis u^i pi^j (0 <= i < k, 0 <= j < e)
 * with rational coordinates; reduction modulo (U(u), pi^e - p) is eager.
 * In this basis the valuation is exact:
 *     v(sum c_ij u^i pi^j) = min over c_ij != 0 of (v_p(c_ij) + j/e),
 * because {u^i} reduces to an F_p-basis of the residue field and distinct j
 * give values in distinct classes mod 1.
 */
class FieldDescriptor : public std::enable_shared_from_this<FieldDescriptor> {
 public:
  /* residue_modulus: ascending coefficients over F_p, monic, irreducible.
   * The lift modulus is the {0..p-1}-coefficient lift. */
  static FieldPtr make(const Int& p, int e, const std::vector<int64_t>& residue_modulus);

  /* Arbitrary monic integral lift (needed by exact tower extensions, whose
   * minimal polynomials have large integer coefficients). Must still be
   * irreducible mod p. */
  static FieldPtr make_with_lift(const Int& p, int e, std::vector<Int> lift_modulus,
                                 std::optional<Rat> precision_cap = {});

  const Int& p() const { return p_; }
  int e() const { return e_; }
  int k() const { return k_; }
  long degree() const { return static_cast<long>(e_) * k_; }
  const std::vector<Int>& lift_modulus() const { return lift_modulus_; }
  const FiniteFieldPtr& residue_field() const { return residue_field_; }
  /* v(lambda^p) = p/(p-1) with lambda = zeta_p - 1 */
  const Rat& lambda_p_valuation() const { return lambda_p_val_; }
  const std::optional<Rat>& precision_cap() const { return precision_cap_; }

  bool same_as(const FieldDescriptor& o) const;

 private:
  Int p_;
  int e_ = 1;
  int k_ = 1;
  std::vector<Int> lift_modulus_;
  FiniteFieldPtr residue_field_;
  Rat lambda_p_val_;
  std::optional<Rat> precision_cap_;
};

class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(FieldPtr F, const Rat& r);  // rational constant

  static FieldElement zero(const FieldPtr& F);
  static FieldElement one(const FieldPtr& F);
  static FieldElement u_gen(const FieldPtr& F);
  static FieldElement pi_pow(const FieldPtr& F, long t);  // pi^t, any integer t
  static FieldElement from_coords(FieldPtr F, std::vector<Rat> coords);
  /* canonical lift of a residue element: integer coordinates in [0,p) at pi^0 */
  static FieldElement lift_residue(const FieldPtr& F, const FFElem& a);

  const FieldPtr& field() const { return F_; }
  /* coordinate of u^i pi^j */
  const Rat& coord(int i, int j) const { return c_[static_cast<size_t>(i + k_ * j)]; }
  const std::vector<Rat>& coords() const { return c_; }

  bool is_zero() const;
  bool operator==(const FieldElement& o) const;
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

  FieldElement operator-() const;
  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator*(const Rat& s) const;
  FieldElement inverse() const;
  FieldElement operator/(const FieldElement& o) const { return *this * o.inverse(); }
  FieldElement pow(long n) const;

  Valuation valuation() const;
  /* reduction mod the maximal ideal; requires v >= 0 (NonIntegral otherwise) */
  FFElem residue() const;

  /* replace by a congruent element mod pi^{e N} with small integer
   * coordinates; the difference has valuation >= N */
  FieldElement truncate(const Rat& N) const;

  std::string str() const;

  /* total order on canonical coordinates (for deterministic sorting only) */
  static int compare(const FieldElement& a, const FieldElement& b);

 private:
  FieldPtr F_;
  int k_ = 0, e_ = 0;
  std::vector<Rat> c_;  // size k*e

  friend class FieldEmbedding;
};

/* An exact embedding between two descriptors in a tower:
 * pi_from -> pi_to^{pi_power}, u_from -> u_image (exact root of the old lift
 * modulus in the new field).  Applying it is a ring homomorphism, so it
 * preserves valuations and residues on the nose.
 */
class FieldEmbedding {
 public:
  FieldEmbedding() = default;
  FieldEmbedding(FieldPtr from, FieldPtr to, long pi_power, FieldElement u_image);

  const FieldPtr& from() const { return from_; }
  const FieldPtr& to() const { return to_; }
  long pi_power() const { return pi_power_; }
  const FieldElement& u_image() const { return u_image_; }

  FieldElement apply(const FieldElement& x) const;
  FFElem apply_residue(const FFElem& a) const;

  static FieldEmbedding identity(const FieldPtr& F);
  static FieldEmbedding compose(const FieldEmbedding& first, const FieldEmbedding& second);

 private:
  FieldPtr from_, to_;
  long pi_power_ = 1;
  FieldElement u_image_;
  std::vector<FieldElement> u_pows_;  // u_image^0..^{k_from-1}
  FFElem u_res_;                      // residue of u_image
};

/* make_field per the external surface: validates p prime, e >= 1, modulus
 * monic irreducible over F_p. */
FieldPtr make_field(const Int& p, int e, const std::vector<int64_t>& residue_modulus);

/* Totally ramified step: same residue field, e | new_e, pi -> pi'^{new_e/e}. */
std::pair<FieldPtr, FieldEmbedding> extend_ramification(const FieldPtr& F, int new_e);

/* Unramified step: adjoin a root of (a lift of) phi, an irreducible
 * polynomial over the residue field of F.  The new field is presented in
 * the same two-generator shape: its lift modulus is the exact minimal
 * polynomial over Q of theta = w + c*u (w the adjoined root, c a small
 * integer making the residue of theta generate F_{p^{k d}}), and the old u
 * has an exact polynomial image.  Everything is computed with exact
 * rational arithmetic; U_old(u_image) = 0 holds identically.
 */
std::pair<FieldPtr, FieldEmbedding> adjoin_residue_root(const FieldPtr& F, const FFPoly& phi);

/* Spec surface: target given as (new_e, new residue modulus over F_p).
 * Exact embeddings exist when k = 1 (u is rational) or the modulus is
 * unchanged; other combinations raise IncompatibleExtension, since a
 * generic pair of number fields with the same completion admits no exact
 * embedding.  Internal escalation uses adjoin_residue_root instead.
 */
std::pair<FieldPtr, FieldEmbedding> extend_field(const FieldPtr& F, int new_e,
                                                 const std::vector<int64_t>& new_residue_modulus);

}  // namespace stablered

#endif
