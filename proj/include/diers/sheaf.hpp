#pragma once

// Presheaves of ambient objects on finite spaces. Opens are addressed by their
// index in the space's open list.

#include <string>
#include <vector>

#include "diers/core.hpp"
#include "diers/spectrum.hpp"

namespace diers {

struct Presheaf {
  const Category* cat = nullptr;
  FinTopSpace space;
  std::vector<Obj> value;             // per open
  std::vector<std::vector<Mor>> res;  // res[v][u] : value(v) -> value(u) when u is inside v, else -1

  static Presheaf empty_on(const Category& c, const FinTopSpace& x);
  Obj at(PointSet u) const { return value[space.open_index(u)]; }
  Mor restrict(PointSet v, PointSet u) const { return res[space.open_index(v)][space.open_index(u)]; }
  Obj stalk(int x) const { return at(space.minimal_open(x)); }
  bool functorial(std::string* why = nullptr) const;
  json to_json() const;
};

// Points of u with their minimal-open values and the specialization restrictions.
Diagram point_diagram(const Presheaf& p, PointSet u, std::vector<int>* pts = nullptr);
// Restriction cone from p(u) over point_diagram(p, u).
Cone point_cone(const Presheaf& p, PointSet u);
// The unique map z -> s(u) with the given components into s(U_x), x in u.
std::optional<Mor> glue_points(const Presheaf& s, PointSet u, Obj z, const std::vector<Mor>& comps);
// Same, with point_diagram and point_cone already built.
std::optional<Mor> glue_points(const Category& c, const Diagram& d, const Cone& lim, Obj z,
                               const std::vector<Mor>& comps);

struct DescentResult {
  bool ok = true;
  PointSet open = 0;
  std::vector<PointSet> cover;
  json to_json() const;
};
// Minimal-open covers by default; `exhaustive` tries every cover on spaces of at most 3 points.
DescentResult check_descent(const Presheaf& p, bool exhaustive = false);

struct Sheafification {
  Presheaf sheaf;
  std::vector<Mor> gamma;     // per open: p(u) -> a p(u)
};
Sheafification sheafify(const Presheaf& p);

// One map per open.
struct SheafMor {
  std::vector<Mor> comp;
};
bool is_natural(const Presheaf& s, const Presheaf& t, const SheafMor& m);
SheafMor identity_mor(const Presheaf& s);
SheafMor compose_mor(const Category& c, const SheafMor& g, const SheafMor& f);
// Extends maps on minimal opens to every open by gluing in t.
std::optional<SheafMor> extend_from_points(const Presheaf& s, const Presheaf& t,
                                           const std::vector<Mor>& at_points);
// All morphisms s -> t (stops after `cap` results).
std::vector<SheafMor> enumerate_sheaf_morphisms(const Presheaf& s, const Presheaf& t, size_t cap = 4096);
// Extends p -> t (t a sheaf) along the sheafification unit of p.
std::optional<SheafMor> extend_along_unit(const Sheafification& ap, const Presheaf& p, const Presheaf& t,
                                          const SheafMor& m);

// Discrete space with J -> product of vals over J; legs[x] : value({x}) -> vals[x].
Presheaf product_sheaf(const Category& c, const std::vector<Obj>& vals, std::vector<Mor>* legs = nullptr);

// f : X -> Y continuous.  f_* S lives on Y, f^* T on X.
Presheaf direct_image(const PointMap& f, const FinTopSpace& y, const Presheaf& s);
struct InverseImage {
  Presheaf pre;                    // colimit presheaf before sheafification
  std::vector<Cocone> colims;      // per open u of X, over {v : f(u) inside v}
  std::vector<std::vector<int>> index;  // per open u: the opens v of Y used
  std::vector<Diagram> diagrams;
  Sheafification sheaf;
  const Presheaf& result() const { return sheaf.sheaf; }
};
InverseImage inverse_image(const PointMap& f, const FinTopSpace& x, const Presheaf& t);

// Transposes between f^*T -> S and T -> f_*S.
SheafMor to_direct(const PointMap& f, const InverseImage& ft, const Presheaf& t, const Presheaf& s,
                   const SheafMor& a);
std::optional<SheafMor> to_inverse(const PointMap& f, const InverseImage& ft, const Presheaf& t,
                                   const Presheaf& s, const SheafMor& b);

// Stalk map at y of a sharp part T -> f_* S.
Mor flat_at(const PointMap& f, const Presheaf& t, const Presheaf& s, const SheafMor& sharp, int y);

}  // namespace diers
