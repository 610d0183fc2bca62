#pragma once

// Spaces carrying a sheaf of ambient objects, their glued Diers spectrum,
// the generalized structural sheaf and the Spec -| iota_U adjunction.

#include <string>
#include <vector>

#include "diers/structsheaf.hpp"

namespace diers {

struct BSpace {
  Presheaf sheaf;

  const FinTopSpace& space() const { return sheaf.space; }
  int size() const { return sheaf.space.size(); }
  Obj stalk(int x) const { return sheaf.stalk(x); }
  json to_json() const { return sheaf.to_json(); }
};

bool check_bspace(const BSpace& s, std::string* why = nullptr);
// {"space": {"points", "subbasis"}, "values": [{"open", "object"}], "restrictions": [...]}.
// Restrictions left out are filled in when the hom-set has a single map.
BSpace bspace_from_json(const DiersContext& ctx, const json& j);
BSpace load_bspace(const DiersContext& ctx, const std::string& path);
// Discrete space on the family with J -> product of the B_i over J.
BSpace discrete_embedding(const DiersContext& ctx, const std::vector<Obj>& family);
BSpace iota_U(const USpace& x);

struct GluedPoint {
  int base = -1;  // point x of the base space
  int unit = -1;  // position in local_units(stalk x)
  LocalUnit xi;
};

struct GluedBasic {
  int open = -1;  // open index u of the base
  int elem = -1;  // index into d_poset(B(u))
  Mor n = -1;
  PointSet set = 0;
};

struct GluedSpectrum {
  std::vector<GluedPoint> points;
  std::vector<PointSet> fiber;             // per base point
  std::vector<GluedBasic> basis;
  std::vector<std::vector<Mor>> reach;     // per basic, per point inside: cod(n) -> U(A_xi)
  bool reach_unique = true;
  FinTopSpace space;
  PointMap eta;                            // glued point -> base point
  bool eta_continuous = false;
  bool eta_open = false;                   // images of opens are open
  bool eta_image_basic = false;            // eta(D_(u,n)) = u for every n
  bool eta_image_unit = false;             // eta(D_(u,1)) = u
  bool eta_preimage = false;               // eta^-1(u) = D_(u,1)
  std::vector<PointMap> iota;              // per base point: Spec(stalk) -> glued
  bool iota_embeddings = false;
  bool coproduct_topology = false;         // the disjoint union of the stalk spectra
  std::vector<PointMap> p;                 // per open u: points of D_(u,1) in order -> Spec(B(u))
  std::vector<std::vector<Mor>> p_local;   // matching local parts A_(p_u y) -> A_xi
  bool p_ok = false;
  bool intersection_law = false;
  bool key_lemma = false;
  bool stalk_lemma = false;
  std::string failure;

  int basic_index(int open, int elem) const;
  json to_json(const DiersContext& ctx) const;
  std::string to_dot(const DiersContext& ctx) const;
};

// (x, xi) lies in D_(u,n) for any map n out of B(u); returns the witness cod(n) -> U(A_xi).
std::optional<Mor> glued_member(const DiersContext& ctx, const BSpace& s, int u, Mor n, const GluedPoint& pt);
GluedSpectrum bspace_spec_space(const DiersContext& ctx, const BSpace& s);

// Open subspace with the restricted sheaf.
USpace restrict_uspace(const USpace& x, PointSet open, std::vector<int>* points = nullptr);

struct BSpaceStructure : KanSheaf {
  GluedSpectrum glued;
  std::vector<Mor> unit;                   // per open w of the base: B(w) -> tilde(eta^-1 w)
  bool unit_natural = false;
  bool iota_iso = false;                   // iota_x^* tilde is the structural sheaf of the stalk
  std::vector<std::optional<SheafMor>> p_sharp;  // per open u: structural sheaf of B(u) -> (p_u)_*
  bool p_sharp_ok = false;
  std::string failure;

  json to_json(const DiersContext& ctx) const;
};
BSpaceStructure bspace_structural_sheaf(const DiersContext& ctx, const BSpace& s);

// Same conventions as U-space morphisms: points of t go to points of s.
struct BSpaceMorphism {
  PointMap f;
  SheafMor sharp;  // s.sheaf -> f_* t.sheaf

  bool operator==(const BSpaceMorphism& o) const { return f == o.f && sharp.comp == o.sharp.comp; }
};
bool check_bspace_morphism(const BSpace& s, const BSpace& t, const BSpaceMorphism& m, std::string* why = nullptr);
BSpaceMorphism identity_morphism(const BSpace& s);
// m2 after m1, for m1 : s1 -> s2 and m2 : s2 -> s3.
BSpaceMorphism compose(const Category& c, const BSpace& s1, const BSpace& s2, const BSpaceMorphism& m2,
                       const BSpaceMorphism& m1);
std::vector<BSpaceMorphism> enumerate_bspace_morphisms(const BSpace& s, const BSpace& t, size_t cap = 4096);
BSpaceMorphism iota_U(const USpaceMorphism& m);
// eta_B : B -> iota_U Spec(B)
BSpaceMorphism bspace_unit(const BSpaceStructure& st);

struct BSpaceSpecMorphism {
  USpaceMorphism morphism;  // Spec(s) -> Spec(t)
  bool spectral = false;    // Spec(m)^-1 D_(u,n) = D_(f^-1 u, pushout of n along the sharp part)
};
std::optional<BSpaceSpecMorphism> bspace_spec_morphism(const DiersContext& ctx, const BSpace& s, const BSpace& t,
                                                       const BSpaceStructure& ss, const BSpaceStructure& st,
                                                       const BSpaceMorphism& m, std::string* why = nullptr);

// Spec(B) -> a transposed from B -> iota_U a.
std::optional<USpaceMorphism> generalized_transpose(const DiersContext& ctx, const BSpace& s,
                                                    const BSpaceStructure& st, const USpace& a,
                                                    const BSpaceMorphism& m, std::string* why = nullptr);
// iota_U(m) after eta_B.
BSpaceMorphism generalized_untranspose(const Category& c, const BSpace& s, const BSpaceStructure& st,
                                       const USpaceMorphism& m);

struct GeneralizedAdjunctionReport {
  size_t left = 0;   // B-space morphisms B -> iota_U a
  size_t right = 0;  // U-space morphisms Spec(B) -> a
  bool bijective = false;
  bool triangle = false;  // both round trips are identities, transpose(eta_B) = id
  std::string failure;
  bool ok() const { return bijective && triangle; }
  json to_json() const;
};
GeneralizedAdjunctionReport verify_generalized_adjunction(const DiersContext& ctx, const BSpace& s,
                                                          const USpace& a, size_t cap = 4096);

std::vector<Obj> stalks_functor(const BSpace& s);
std::vector<Obj> stalks_functor(const USpace& x);  // the local family

struct BeckChevalleyReport {
  bool forgetful = false;  // stalks of iota_U x are U of its local family
  bool spectrum = false;   // locals of Spec(discrete family) are the pointwise local units
  bool coproduct = false;
  bool sections = false;   // Gamma of the glued sheaf is the product of the Gamma(Spec B_i)
  std::string failure;
  bool ok() const { return forgetful && spectrum && coproduct && sections; }
  json to_json() const;
};
BeckChevalleyReport beck_chevalley_check(const DiersContext& ctx, const std::vector<Obj>& family);

}  // namespace diers
