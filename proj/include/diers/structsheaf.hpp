#pragma once

// Structural sheaves, U-spaces, the Spec and Gamma functors, and the
// enumerative check of the Spec -| Gamma adjunction.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diers/sheaf.hpp"

namespace diers {

struct USpace {
  Presheaf sheaf;
  std::vector<Obj> local;      // A_x
  std::vector<Mor> stalk_iso;  // sheaf.stalk(x) -> U(A_x)
  Obj base = -1;               // B when this is Spec(B)

  const FinTopSpace& space() const { return sheaf.space; }
  int size() const { return sheaf.space.size(); }
  json to_json(const DiersContext& ctx) const;
  std::string to_dot(const DiersContext& ctx) const;
};

bool check_uspace(const DiersContext& ctx, const USpace& x, std::string* why = nullptr);
// Discrete U-space on a family of local objects; values are products of the U(A_i).
USpace discrete_uspace(const DiersContext& ctx, const std::vector<Obj>& family);

// A morphism s -> t: points of t go to points of s.
struct USpaceMorphism {
  PointMap f;
  SheafMor sharp;          // s.sheaf -> f_* t.sheaf, per open of s
  std::vector<Mor> local;  // per point y of t: A^s_{f(y)} -> A^t_y

  bool operator==(const USpaceMorphism& o) const {
    return f == o.f && sharp.comp == o.sharp.comp && local == o.local;
  }
};

bool check_uspace_morphism(const DiersContext& ctx, const USpace& s, const USpace& t,
                           const USpaceMorphism& m, std::string* why = nullptr);
USpaceMorphism identity_morphism(const DiersContext& ctx, const USpace& s);
// m2 after m1, for m1 : s1 -> s2 and m2 : s2 -> s3.
USpaceMorphism compose(const DiersContext& ctx, const USpace& s1, const USpace& s2,
                       const USpaceMorphism& m2, const USpaceMorphism& m1);
// Every morphism s -> t (stops after `cap`).
std::vector<USpaceMorphism> enumerate_uspace_morphisms(const DiersContext& ctx, const USpace& s,
                                                       const USpace& t, size_t cap = 4096);
// Inverse comorphism part f^* s -> t obtained by transposing the sharp part.
struct FlatPart {
  InverseImage pulled;
  SheafMor flat;
};
std::optional<FlatPart> flat_part(const USpace& s, const USpace& t, const USpaceMorphism& m);

// Left Kan extension of cod over a family of basic opens, then sheafified.
// Element i is an object cod[i] carried by the open opens[i]; edges are the
// maps cod[i] -> cod[j] of the indexing category; reach[i][p] : cod[i] -> U(A_p)
// is the canonical map at each point p of opens[i].
struct KanBasis {
  FinTopSpace space;
  std::vector<PointSet> opens;
  std::vector<Obj> cod;
  std::vector<Diagram::Edge> edges;
  std::vector<std::vector<Mor>> reach;
  std::vector<Obj> local;  // A_p
};

struct KanSheaf {
  Presheaf pre;
  std::vector<std::vector<int>> index;      // elements i with u inside opens[i], per open
  std::vector<Diagram> diagrams;
  std::vector<Cocone> colims;
  std::vector<Mor> zeta;                    // per element: cod(i) -> pre(opens[i])
  std::vector<std::vector<Mor>> reach;
  Sheafification tilde;
  USpace uspace;
  bool stalks_ok = true;                    // every stalk comparison is an iso

  const Presheaf& sheaf() const { return tilde.sheaf; }
};
KanSheaf build_kan_sheaf(const DiersContext& ctx, const KanBasis& basis);

// Sharp part src -> f_* x determined by points f(y) and local maps A_{f(y)} -> A_y.
std::optional<SheafMor> kan_sharp(const DiersContext& ctx, const KanSheaf& src, const USpace& x, const PointMap& f,
                                  const std::vector<Mor>& locals, std::string* why = nullptr);

struct StructuralSheaf : KanSheaf {
  Obj base = -1;
  Spectrum spec;
  Mor eta = -1;                             // B -> Gamma of the sheaf
  bool eta_iso = false;
  bool order_reflecting = false;            // D_m inside D_n implies n <= m
  bool zeta_iso_on_basis = false;

  json to_json(const DiersContext& ctx) const;
};
StructuralSheaf structural_sheaf(const DiersContext& ctx, Obj b);

Obj global_sections(const USpace& x);
Mor global_sections(const USpace& s, const USpaceMorphism& m);

// Spec(f) for f : B1 -> B2, a morphism Spec(B1) -> Spec(B2).
std::optional<USpaceMorphism> spec_functor_morphism(const DiersContext& ctx, Mor f, const StructuralSheaf& s1,
                                                    const StructuralSheaf& s2, std::string* why = nullptr);

// The morphism Spec(B) -> x transposed from phi : B -> Gamma(x).
struct Transpose {
  USpaceMorphism morphism;
  // per basis element n: for each point y of x over D_n, the neighbourhood used
  std::vector<std::vector<std::pair<int, PointSet>>> neighbourhoods;
  bool continuous = true;
};
std::optional<Transpose> adjunction_transpose(const DiersContext& ctx, const StructuralSheaf& sb,
                                              const USpace& x, Mor phi, std::string* why = nullptr);

struct AdjunctionReport {
  size_t left = 0;   // hom(B, Gamma x)
  size_t right = 0;  // U-space morphisms Spec(B) -> x
  bool bijective = false;
  bool triangle = false;        // Gamma(transpose phi) . eta = phi, transpose(eta) = id
  bool natural_in_b = true;     // transpose(phi . g) = transpose(phi) . Spec(g), g in End(B)
  bool natural_in_space = true; // transpose(Gamma(h) . phi) = h . transpose(phi), h = Spec(k)
  std::string failure;
  bool ok() const { return bijective && triangle && natural_in_b && natural_in_space; }
  json to_json() const;
};
// Structural sheaves and Spec of endomorphisms, memoized per object across calls.
class SpecCache {
 public:
  explicit SpecCache(const DiersContext& ctx) : ctx_(ctx) {}
  const StructuralSheaf& sheaf(Obj b);
  // Spec(g) for g in hom(b, b), in hom order
  const std::vector<std::optional<USpaceMorphism>>& endos(Obj b);

 private:
  const DiersContext& ctx_;
  std::map<Obj, StructuralSheaf> sheaves_;
  std::map<Obj, std::vector<std::optional<USpaceMorphism>>> endos_;
};

AdjunctionReport verify_adjunction(const DiersContext& ctx, Obj b, const USpace& x, size_t cap = 4096,
                                   SpecCache* cache = nullptr);

}  // namespace diers
