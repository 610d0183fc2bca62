#pragma once

// The duality built from a Diers context: B-spaces fibred over finite spaces
// with cartesian and opcartesian lifts, global sections through the lift,
// recovery of the local units from the point fibre, and transport along
// morphisms of Diers contexts.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "diers/bspace.hpp"

namespace diers {

// Lift of a B-space along a continuous map, with the lifting morphism.
struct Lift {
  BSpace object;
  BSpaceMorphism morphism;
};

// f : X2 -> X1 and a B-space over X1; the lift B -> f^*B lies over f.
Lift cartesian_lift(const PointMap& f, const FinTopSpace& x2, const BSpace& b);
// f : X1 -> X2 and a B-space over X1; the lift f_*B -> B lies over f.
Lift opcartesian_lift(const PointMap& f, const FinTopSpace& x2, const BSpace& b);

struct LiftCheck {
  bool ok = true;
  long competitors = 0;
  std::string failure;
};
// Every competitor morphism factors through the lift exactly once.
LiftCheck verify_cartesian(const PointMap& f, const BSpace& b, const Lift& l, const std::vector<BSpace>& others,
                           size_t cap = 4096);
LiftCheck verify_opcartesian(const PointMap& f, const BSpace& b, const Lift& l, const std::vector<BSpace>& others,
                             size_t cap = 4096);

// B viewed as a B-space over the one-point space.
BSpace point_bspace(const DiersContext& ctx, Obj b);

class Duality {
 public:
  explicit Duality(const DiersContext& ctx) : ctx_(ctx) {}
  const DiersContext& context() const { return ctx_; }

  // Spec of a B-space, with its unit.
  BSpaceStructure spec(const BSpace& b) const { return bspace_structural_sheaf(ctx_, b); }
  BSpace iota(const USpace& a) const { return iota_U(a); }
  Lift cartesian(const PointMap& f, const FinTopSpace& x2, const BSpace& b) const {
    return cartesian_lift(f, x2, b);
  }
  Lift opcartesian(const PointMap& f, const FinTopSpace& x2, const BSpace& b) const {
    return opcartesian_lift(f, x2, b);
  }

 private:
  const DiersContext& ctx_;
};

// Codomain of the opcartesian lift of iota(a) along the map to the point.
Obj global_sections_via_lift(const Duality& d, const USpace& a);
// Gamma(m) read off the unique factorization between the two lifts.
std::optional<Mor> global_sections_via_lift(const Duality& d, const USpace& s, const USpace& t,
                                            const USpaceMorphism& m);

struct RestrictedAdjunctionReport {
  size_t maps = 0;        // hom(B, Gamma a)
  size_t bmorphisms = 0;  // B-space morphisms from the point to iota(a)
  size_t umorphisms = 0;  // U-space morphisms Spec(B) -> a
  bool lift_bijection = false;
  bool spec_bijection = false;
  bool gamma_matches = false;
  std::string failure;
  bool ok() const { return lift_bijection && spec_bijection && gamma_matches; }
  json to_json() const;
};
RestrictedAdjunctionReport verify_restricted_adjunction(const Duality& d, Obj b, const USpace& a,
                                                        size_t cap = 4096);

struct ExtractedFamily {
  Obj base = -1;
  std::vector<Mor> maps;           // B -> U(A_x), one per point of Spec(B)
  std::vector<Obj> locals;
  bool multi_initial = false;      // every B -> U(A) factors through exactly one member, uniquely
  bool matches_units = false;      // one-to-one with local_units(B) up to iso
  long tested = 0;
  std::string failure;
  bool ok() const { return multi_initial && matches_units; }
  json to_json(const DiersContext& ctx) const;
  std::string to_dot(const DiersContext& ctx) const;
};
ExtractedFamily extract_multiadjoint(const Duality& d, Obj b);

// Functor given by its action; only the enumerated part is ever queried.
struct FunctorData {
  std::function<Obj(Obj)> obj;
  std::function<Mor(Mor)> mor;
};

struct ContextMorphism {
  std::string name;
  const DiersContext* c1 = nullptr;
  const DiersContext* c2 = nullptr;
  FunctorData F;                      // A1 -> A2
  FunctorData G;                      // B1 -> B2
  FunctorData Gstar;                  // B2 -> B1, left adjoint of G
  std::function<Mor(Obj)> theta;      // A in A1: G U1 A -> U2 F A
  std::function<Mor(Obj)> unit;       // B2 -> G G* B2
  std::function<Mor(Obj)> counit;     // G* G B1 -> B1
  std::vector<std::shared_ptr<const DiersContext>> owned;
};

ContextMorphism identity_context_morphism(const DiersContext& ctx);
// {"source", "target", "F", "G", "Gstar"} with object maps by name; morphism maps,
// theta, unit and counit are read when given and otherwise taken as the unique map.
ContextMorphism load_context_morphism(const std::string& path);

struct ContextMorphismReport {
  bool functors = true;
  bool theta_iso = true;
  bool theta_natural = true;
  bool adjunction = true;
  bool preserves_limits = true;       // terminal and binary products of samples
  bool gstar_preserves_du = true;
  bool factorization_lemma = true;    // unit of G(f) = unit of G(unit of f)
  std::string failure;
  bool ok() const { return functors && theta_iso && theta_natural && adjunction && preserves_limits; }
  json to_json() const;
};
ContextMorphismReport validate_context_morphism(const ContextMorphism& cm);

struct Mate {
  Mor sigma = -1;   // L2_{F A}(G f) -> F(L1_A f), in A2
  Mor l1 = -1, l2 = -1;
  Factorization f1, f2;
  bool commutes = false;
  bool iso = false;
};
std::optional<Mate> mate_comparison(const ContextMorphism& cm, Obj a, Mor f);

USpace transport_uspace(const ContextMorphism& cm, const USpace& x);
BSpace transport_bspace(const ContextMorphism& cm, const BSpace& b);

struct TransportReport {
  BSpace gb;
  USpace fx;                        // F applied to Spec_1(B)
  USpaceMorphism sigma;             // Spec_2(G B) -> F(Spec_1 B)
  bool sheaf_ok = false;            // G B is still a sheaf
  bool uspace_ok = false;
  bool continuous = false;
  bool preimage_formula = false;    // s^-1 D2_(u,n) = D1_(u, pushout of G* n along the counit)
  bool sigma_ok = false;            // sharp part exists and the stalk condition holds
  bool flat_is_mate = false;        // sigma flat at each point equals the canonical mate
  bool sigma_iso = false;
  std::string failure;
  bool ok() const { return sheaf_ok && uspace_ok && continuous && preimage_formula && sigma_ok && flat_is_mate; }
  json to_json(const DiersContext& c2) const;
};
TransportReport transport(const ContextMorphism& cm, const BSpace& b);

}  // namespace diers
