#include "diers/duality.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "diers/instances.hpp"

namespace diers {

Lift cartesian_lift(const PointMap& f, const FinTopSpace& x2, const BSpace& b) {
  auto ft = inverse_image(f, x2, b.sheaf);
  Lift l{BSpace{ft.result()}, {}};
  l.morphism.f = f;
  l.morphism.sharp = to_direct(f, ft, b.sheaf, l.object.sheaf, identity_mor(l.object.sheaf));
  return l;
}

Lift opcartesian_lift(const PointMap& f, const FinTopSpace& x2, const BSpace& b) {
  Lift l{BSpace{direct_image(f, x2, b.sheaf)}, {}};
  l.morphism.f = f;
  l.morphism.sharp = identity_mor(l.object.sheaf);
  return l;
}

namespace {

// Every continuous map a -> b with post(h) == want under `post`.
std::vector<PointMap> maps_over(const FinTopSpace& a, const FinTopSpace& b,
                                const std::function<bool(const PointMap&)>& keep) {
  std::vector<PointMap> out;
  int na = a.size(), nb = b.size();
  if (na > 0 && nb == 0) return out;
  PointMap h(na, 0);
  while (true) {
    if (is_continuous(a, b, h) && keep(h)) out.push_back(h);
    int i = 0;
    while (i < na && ++h[i] == nb) h[i++] = 0;
    if (i == na) break;
  }
  return out;
}

}  // namespace

LiftCheck verify_cartesian(const PointMap& f, const BSpace& b, const Lift& l, const std::vector<BSpace>& others,
                           size_t cap) {
  LiftCheck r;
  const Category& c = *b.sheaf.cat;
  if (!check_bspace_morphism(b, l.object, l.morphism)) {
    r.ok = false;
    r.failure = "lift is not a morphism";
    return r;
  }
  for (const auto& C : others) {
    auto chis = enumerate_bspace_morphisms(l.object, C, cap);
    for (const auto& psi : enumerate_bspace_morphisms(b, C, cap)) {
      auto hs = maps_over(C.space(), l.object.space(), [&](const PointMap& h) {
        for (size_t y = 0; y < h.size(); ++y)
          if (f[h[y]] != psi.f[y]) return false;
        return true;
      });
      for (const auto& h : hs) {
        ++r.competitors;
        int n = 0;
        for (const auto& chi : chis)
          if (chi.f == h && compose(c, b, l.object, chi, l.morphism) == psi) ++n;
        if (n != 1) {
          r.ok = false;
          r.failure = std::to_string(n) + " factorizations through the cartesian lift";
          return r;
        }
      }
    }
  }
  return r;
}

LiftCheck verify_opcartesian(const PointMap& f, const BSpace& b, const Lift& l, const std::vector<BSpace>& others,
                             size_t cap) {
  LiftCheck r;
  const Category& c = *b.sheaf.cat;
  if (!check_bspace_morphism(l.object, b, l.morphism)) {
    r.ok = false;
    r.failure = "lift is not a morphism";
    return r;
  }
  for (const auto& D : others) {
    auto chis = enumerate_bspace_morphisms(D, l.object, cap);
    for (const auto& psi : enumerate_bspace_morphisms(D, b, cap)) {
      auto ks = maps_over(l.object.space(), D.space(), [&](const PointMap& k) {
        for (size_t x = 0; x < f.size(); ++x)
          if (k[f[x]] != psi.f[x]) return false;
        return true;
      });
      for (const auto& k : ks) {
        ++r.competitors;
        int n = 0;
        for (const auto& chi : chis)
          if (chi.f == k && compose(c, D, l.object, l.morphism, chi) == psi) ++n;
        if (n != 1) {
          r.ok = false;
          r.failure = std::to_string(n) + " factorizations through the opcartesian lift";
          return r;
        }
      }
    }
  }
  return r;
}

BSpace point_bspace(const DiersContext& ctx, Obj b) {
  const Category& B = ctx.ambient();
  auto t = B.terminal();
  if (!t) throw category_error("point_bspace: ambient has no terminal object");
  BSpace s{Presheaf::empty_on(B, FinTopSpace::discrete(1))};
  s.sheaf.value = {*t, b};
  const auto& h = B.hom(b, *t);
  if (h.size() != 1) throw category_error("point_bspace: terminal is not terminal");
  s.sheaf.res[0][0] = B.id(*t);
  s.sheaf.res[1][0] = h[0];
  s.sheaf.res[1][1] = B.id(b);
  return s;
}

Obj global_sections_via_lift(const Duality& d, const USpace& a) {
  auto l = opcartesian_lift(PointMap(a.size(), 0), FinTopSpace::discrete(1), d.iota(a));
  return l.object.sheaf.at(1);
}

std::optional<Mor> global_sections_via_lift(const Duality& d, const USpace& s, const USpace& t,
                                            const USpaceMorphism& m) {
  const Category& B = d.context().ambient();
  auto pt = FinTopSpace::discrete(1);
  BSpace is = d.iota(s), it = d.iota(t);
  auto ls = opcartesian_lift(PointMap(s.size(), 0), pt, is);
  auto lt = opcartesian_lift(PointMap(t.size(), 0), pt, it);
  auto psi = compose(B, ls.object, is, iota_U(m), ls.morphism);
  std::optional<Mor> out;
  int n = 0;
  for (const auto& chi : enumerate_bspace_morphisms(ls.object, lt.object))
    if (compose(B, ls.object, lt.object, lt.morphism, chi) == psi) {
      ++n;
      out = chi.sharp.comp[1];
    }
  if (n != 1) return std::nullopt;
  return out;
}

json RestrictedAdjunctionReport::to_json() const {
  return {{"ok", ok()},
          {"maps", maps},
          {"bspace_morphisms", bmorphisms},
          {"uspace_morphisms", umorphisms},
          {"lift_bijection", lift_bijection},
          {"spec_bijection", spec_bijection},
          {"gamma_matches", gamma_matches},
          {"failure", failure}};
}

RestrictedAdjunctionReport verify_restricted_adjunction(const Duality& d, Obj b, const USpace& a, size_t cap) {
  const DiersContext& ctx = d.context();
  const Category& B = ctx.ambient();
  RestrictedAdjunctionReport r;
  auto fail = [&](const std::string& w) {
    if (r.failure.empty()) r.failure = w;
  };
  Obj g = global_sections_via_lift(d, a);
  r.gamma_matches = g == global_sections(a);
  if (!r.gamma_matches) fail("Gamma through the lift differs from the global sections");

  BSpace P = point_bspace(ctx, b);
  BSpace ia = d.iota(a);
  auto lift = opcartesian_lift(PointMap(a.size(), 0), FinTopSpace::discrete(1), ia);
  const auto& maps = B.hom(b, g);
  auto bm = enumerate_bspace_morphisms(P, ia, cap);
  r.maps = maps.size();
  r.bmorphisms = bm.size();
  bool bij = maps.size() == bm.size();
  std::vector<char> hit(bm.size(), 0);
  for (Mor phi : maps) {
    BSpaceMorphism chi{{0}, {}};
    chi.sharp.comp = {B.hom(P.sheaf.value[0], lift.object.sheaf.value[0]).at(0), phi};
    auto whole = compose(B, P, lift.object, lift.morphism, chi);
    auto it = std::find(bm.begin(), bm.end(), whole);
    if (it == bm.end() || hit[it - bm.begin()]) {
      bij = false;
      fail("a map into Gamma has no matching B-space morphism");
    } else {
      hit[it - bm.begin()] = 1;
    }
  }
  r.lift_bijection = bij;
  auto g2 = verify_generalized_adjunction(ctx, P, a, cap);
  r.umorphisms = g2.right;
  r.spec_bijection = g2.ok() && g2.left == bm.size();
  if (!r.spec_bijection) fail("Spec side: " + g2.failure);
  return r;
}

json ExtractedFamily::to_json(const DiersContext& ctx) const {
  const Category& B = ctx.ambient();
  json j;
  j["object"] = B.obj_name(base);
  j["family"] = json::array();
  for (size_t i = 0; i < maps.size(); ++i)
    j["family"].push_back({{"map", B.mor_json(maps[i])}, {"local", ctx.local().obj_name(locals[i])}});
  j["multi_initial"] = multi_initial;
  j["matches_units"] = matches_units;
  j["tested"] = tested;
  if (!failure.empty()) j["failure"] = failure;
  return j;
}

std::string ExtractedFamily::to_dot(const DiersContext& ctx) const {
  const Category& B = ctx.ambient();
  std::ostringstream s;
  s << "digraph family {\n  b [label=\"" << B.obj_name(base) << "\"];\n";
  for (size_t i = 0; i < maps.size(); ++i) {
    s << "  a" << i << " [label=\"U(" << ctx.local().obj_name(locals[i]) << ")\"];\n";
    s << "  b -> a" << i << " [label=\"" << B.mor_name(maps[i]) << "\"];\n";
  }
  s << "}\n";
  return s.str();
}

ExtractedFamily extract_multiadjoint(const Duality& d, Obj b) {
  const DiersContext& ctx = d.context();
  const Category& B = ctx.ambient();
  const Category& A = ctx.local();
  ExtractedFamily e;
  e.base = b;
  auto fail = [&](const std::string& w) {
    if (e.failure.empty()) e.failure = w;
  };
  BSpace P = point_bspace(ctx, b);
  auto S = d.spec(P);
  if (!S.stalks_ok || !S.unit_natural) {
    fail("spectrum of the point object is not a U-space");
    return e;
  }
  BSpace iS = d.iota(S.uspace);
  auto unit = bspace_unit(S);
  auto pt = FinTopSpace::discrete(1);
  for (int x = 0; x < S.uspace.size(); ++x) {
    PointMap f{x};
    auto l = cartesian_lift(f, pt, iS);
    auto whole = compose(B, P, iS, l.morphism, unit);
    // the pulled value at the point against the stalk
    auto ft = inverse_image(f, pt, S.sheaf());
    PointSet ux = S.sheaf().space.minimal_open(x);
    int ui = S.sheaf().space.open_index(ux);
    const auto& idx = ft.index[1];
    auto at = std::find(idx.begin(), idx.end(), ui) - idx.begin();
    Mor c = B.compose(ft.sheaf.gamma[1], ft.colims[1].legs[at]);
    auto ci = inverse(B, c);
    if (!ci || B.cod(c) != l.object.sheaf.at(1)) {
      fail("pulled value at point " + std::to_string(x) + " is not the stalk");
      return e;
    }
    e.maps.push_back(compose_chain(B, {S.uspace.stalk_iso[x], *ci, whole.sharp.comp[1]}));
    e.locals.push_back(S.uspace.local[x]);
  }

  e.multi_initial = true;
  for (Obj a : ctx.local_objects())
    for (Mor g : B.hom(b, ctx.U_obj(a))) {
      ++e.tested;
      int n = 0;
      for (size_t i = 0; i < e.maps.size(); ++i)
        for (Mor l : A.hom(e.locals[i], a))
          if (B.compose(ctx.U_mor(l), e.maps[i]) == g) ++n;
      if (n != 1) {
        e.multi_initial = false;
        fail(B.mor_name(g) + " factors " + std::to_string(n) + " times");
      }
    }

  const auto& us = ctx.local_units(b);
  e.matches_units = us.size() == e.maps.size();
  std::vector<char> used(us.size(), 0);
  for (size_t i = 0; i < e.maps.size() && e.matches_units; ++i) {
    bool found = false;
    for (size_t j = 0; j < us.size() && !found; ++j) {
      if (used[j]) continue;
      for (Mor l : A.hom(e.locals[i], us[j].local))
        if (is_iso(A, l) && B.compose(ctx.U_mor(l), e.maps[i]) == us[j].unit) {
          used[j] = 1;
          found = true;
          break;
        }
    }
    if (!found) {
      e.matches_units = false;
      fail("extracted map " + std::to_string(i) + " matches no local unit");
    }
  }
  return e;
}

ContextMorphism identity_context_morphism(const DiersContext& ctx) {
  ContextMorphism cm;
  cm.name = "identity(" + ctx.name() + ")";
  cm.c1 = cm.c2 = &ctx;
  FunctorData id{[](Obj o) { return o; }, [](Mor m) { return m; }};
  cm.F = cm.G = cm.Gstar = id;
  const DiersContext* c = &ctx;
  cm.theta = [c](Obj a) { return c->ambient().id(c->U_obj(a)); };
  cm.unit = [c](Obj b) { return c->ambient().id(b); };
  cm.counit = cm.unit;
  return cm;
}

namespace {

// Object and morphism tables between two table categories.
FunctorData table_functor(const TableCategory& from, const TableCategory& to, const json& spec,
                          const std::string& what) {
  std::vector<Obj> om(from.objects().size(), -1);
  const json& objs = spec.contains("objects") ? spec.at("objects") : spec;
  for (Obj o : from.objects()) {
    const std::string n = from.obj_name(o);
    if (!objs.contains(n)) throw category_error(what + " undefined on " + n);
    auto t = to.find_object(objs.at(n).get<std::string>());
    if (!t) throw category_error(what + ": unknown object " + objs.at(n).get<std::string>());
    om[o] = *t;
  }
  json ms = spec.value("morphisms", json::object());
  std::vector<Mor> mm(from.num_morphisms(), -1);
  for (Mor m = 0; m < from.num_morphisms(); ++m) {
    const std::string n = from.mor_name(m);
    if (m == from.id(from.dom(m))) {
      mm[m] = to.id(om[from.dom(m)]);
    } else if (ms.contains(n)) {
      auto t = to.find_morphism(ms.at(n).get<std::string>());
      if (!t) throw category_error(what + ": unknown morphism " + ms.at(n).get<std::string>());
      mm[m] = *t;
    } else {
      const auto& h = to.hom(om[from.dom(m)], om[from.cod(m)]);
      if (h.size() != 1) throw category_error(what + "(" + n + ") not given and not determined");
      mm[m] = h[0];
    }
  }
  return {[om](Obj o) { return om.at(o); }, [mm](Mor m) { return mm.at(m); }};
}

// Per-object component: named in `spec` or the unique map dom(o) -> cod(o).
std::function<Mor(Obj)> table_component(const TableCategory& cat, const TableCategory& objs, const json& spec,
                                        const std::function<Obj(Obj)>& dom, const std::function<Obj(Obj)>& cod,
                                        const std::string& what) {
  std::vector<Mor> out;
  for (Obj o : objs.objects()) {
    const std::string n = objs.obj_name(o);
    if (spec.contains(n)) {
      auto m = cat.find_morphism(spec.at(n).get<std::string>());
      if (!m) throw category_error(what + ": unknown morphism " + spec.at(n).get<std::string>());
      out.push_back(*m);
      continue;
    }
    const auto& h = cat.hom(dom(o), cod(o));
    if (h.size() != 1) throw category_error(what + " at " + n + " not given and not determined");
    out.push_back(h[0]);
  }
  return [out](Obj o) { return out.at(o); };
}

}  // namespace

ContextMorphism load_context_morphism(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw category_error("cannot open " + path);
  json j = json::parse(in);
  auto dir = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path q(p);
    return (q.is_absolute() ? q : dir / q).string();
  };
  std::shared_ptr<TableContext> t1 = TableContext::load(resolve(j.at("source").get<std::string>()));
  std::shared_ptr<TableContext> t2 = TableContext::load(resolve(j.at("target").get<std::string>()));
  ContextMorphism cm;
  cm.name = j.value("name", std::filesystem::path(path).stem().string());
  cm.owned = {t1, t2};
  cm.c1 = t1.get();
  cm.c2 = t2.get();
  cm.F = table_functor(t1->A(), t2->A(), j.at("F"), "F");
  cm.G = table_functor(t1->B(), t2->B(), j.at("G"), "G");
  cm.Gstar = table_functor(t2->B(), t1->B(), j.at("Gstar"), "G*");
  auto F = cm.F, G = cm.G, Gs = cm.Gstar;
  const TableContext* c1 = t1.get();
  const TableContext* c2 = t2.get();
  cm.theta = table_component(
      t2->B(), t1->A(), j.value("theta", json::object()), [=](Obj a) { return G.obj(c1->U_obj(a)); },
      [=](Obj a) { return c2->U_obj(F.obj(a)); }, "theta");
  cm.unit = table_component(
      t2->B(), t2->B(), j.value("unit", json::object()), [](Obj c) { return c; },
      [=](Obj c) { return G.obj(Gs.obj(c)); }, "unit");
  cm.counit = table_component(
      t1->B(), t1->B(), j.value("counit", json::object()), [=](Obj b) { return Gs.obj(G.obj(b)); },
      [](Obj b) { return b; }, "counit");
  return cm;
}

json ContextMorphismReport::to_json() const {
  return {{"ok", ok()},
          {"functors", functors},
          {"theta_iso", theta_iso},
          {"theta_natural", theta_natural},
          {"adjunction", adjunction},
          {"preserves_limits", preserves_limits},
          {"gstar_preserves_du", gstar_preserves_du},
          {"factorization_lemma", factorization_lemma},
          {"failure", failure}};
}

namespace {

constexpr size_t kSampleBound = 8;

std::vector<Obj> first(const std::vector<Obj>& v, size_t k) {
  return {v.begin(), v.begin() + static_cast<long>(std::min(k, v.size()))};
}

bool functorial_on(const Category& from, const Category& to, const FunctorData& f, const std::vector<Obj>& objs) {
  for (Obj x : objs) {
    if (f.mor(from.id(x)) != to.id(f.obj(x))) return false;
    for (Obj y : objs)
      for (Mor g : from.hom(x, y)) {
        Mor fg = f.mor(g);
        if (to.dom(fg) != f.obj(x) || to.cod(fg) != f.obj(y)) return false;
        for (Obj z : objs)
          for (Mor h : from.hom(y, z))
            if (f.mor(from.compose(h, g)) != to.compose(f.mor(h), fg)) return false;
      }
  }
  return true;
}

}  // namespace

ContextMorphismReport validate_context_morphism(const ContextMorphism& cm) {
  const DiersContext& c1 = *cm.c1;
  const DiersContext& c2 = *cm.c2;
  const Category& B1 = c1.ambient();
  const Category& B2 = c2.ambient();
  ContextMorphismReport r;
  auto fail = [&](bool& flag, const std::string& w) {
    flag = false;
    if (r.failure.empty()) r.failure = w;
  };
  auto s1 = first(c1.sample_objects(), kSampleBound);
  auto s2 = first(c2.sample_objects(), kSampleBound);
  auto l1 = first(c1.local_objects(), kSampleBound);

  if (!functorial_on(c1.local(), c2.local(), cm.F, l1)) fail(r.functors, "F is not a functor on the samples");
  if (!functorial_on(B1, B2, cm.G, s1)) fail(r.functors, "G is not a functor on the samples");
  if (!functorial_on(B2, B1, cm.Gstar, s2)) fail(r.functors, "G* is not a functor on the samples");

  for (Obj a : l1) {
    Mor t = cm.theta(a);
    if (B2.dom(t) != cm.G.obj(c1.U_obj(a)) || B2.cod(t) != c2.U_obj(cm.F.obj(a)) || !is_iso(B2, t))
      fail(r.theta_iso, "theta at " + c1.local().obj_name(a) + " is not an iso G U1 A -> U2 F A");
    for (Obj a2 : l1)
      for (Mor l : c1.local().hom(a, a2))
        if (B2.compose(c2.U_mor(cm.F.mor(l)), t) != B2.compose(cm.theta(a2), cm.G.mor(c1.U_mor(l))))
          fail(r.theta_natural, "theta is not natural at " + c1.local().mor_name(l));
  }

  for (Obj c : s2) {
    Mor u = cm.unit(c);
    Obj gs = cm.Gstar.obj(c);
    if (B2.dom(u) != c || B2.cod(u) != cm.G.obj(gs)) {
      fail(r.adjunction, "unit has wrong ends at " + B2.obj_name(c));
      continue;
    }
    if (B1.compose(cm.counit(gs), cm.Gstar.mor(u)) != B1.id(gs))
      fail(r.adjunction, "triangle fails at " + B2.obj_name(c));
    for (Obj b : s1)
      if (B1.hom(gs, b).size() != B2.hom(c, cm.G.obj(b)).size())
        fail(r.adjunction, "hom(G* C, B) and hom(C, G B) differ in size");
  }
  for (Obj b : s1) {
    Mor e = cm.counit(b);
    if (B1.dom(e) != cm.Gstar.obj(cm.G.obj(b)) || B1.cod(e) != b) {
      fail(r.adjunction, "counit has wrong ends at " + B1.obj_name(b));
      continue;
    }
    if (B2.compose(cm.G.mor(e), cm.unit(cm.G.obj(b))) != B2.id(cm.G.obj(b)))
      fail(r.adjunction, "triangle fails at G(" + B1.obj_name(b) + ")");
  }

  // terminal and binary products of samples
  auto t1 = B1.terminal();
  auto t2 = B2.terminal();
  if (t1 && (!t2 || !find_iso(B2, cm.G.obj(*t1), *t2)))
    fail(r.preserves_limits, "G does not preserve the terminal object");
  for (size_t i = 0; i < s1.size(); ++i)
    for (size_t k = i; k < s1.size(); ++k) {
      Diagram d;
      d.add_node(s1[i]);
      d.add_node(s1[k]);
      Diagram gd;
      gd.add_node(cm.G.obj(s1[i]));
      gd.add_node(cm.G.obj(s1[k]));
      std::optional<Cone> l, gl;
      try {
        l = B1.limit(d);
        if (l) gl = B2.limit(gd);
      } catch (const category_error&) {
        continue;  // product outside the enumerated universe
      }
      if (!l) continue;
      Cone img{cm.G.obj(l->apex), {cm.G.mor(l->legs[0]), cm.G.mor(l->legs[1])}};
      auto m = gl ? B2.mediate_limit(gd, *gl, img) : std::nullopt;
      if (!m || !is_iso(B2, *m)) fail(r.preserves_limits, "G does not preserve a binary product");
    }

  for (Obj c : s2)
    for (Mor n : c2.dum(c))
      if (!is_diagonally_universal(c1, cm.Gstar.mor(n)))
        fail(r.gstar_preserves_du, "G* of " + B2.mor_name(n) + " is not diagonally universal");

  for (Obj b : s1)
    for (Obj a : c1.local_objects())
      for (Mor f : B1.hom(b, c1.U_obj(a))) {
        auto m = mate_comparison(cm, a, f);
        if (!m || m->f2.index < 0 || !m->commutes)
          fail(r.factorization_lemma, "unit of G(f) differs from unit of G(unit of f) at " + B1.mor_name(f));
      }
  return r;
}

std::optional<Mate> mate_comparison(const ContextMorphism& cm, Obj a, Mor f) {
  const DiersContext& c1 = *cm.c1;
  const DiersContext& c2 = *cm.c2;
  const Category& B2 = c2.ambient();
  auto f1 = c1.factorize(f, a);
  if (!f1) return std::nullopt;
  auto f2 = c2.factorize(B2.compose(cm.theta(a), cm.G.mor(f)), cm.F.obj(a));
  Mor h = B2.compose(cm.theta(f1->unit.local), cm.G.mor(f1->unit.unit));
  auto f3 = c2.factorize(h, cm.F.obj(f1->unit.local));
  if (!f2 || !f3) return std::nullopt;
  Mate m;
  m.f1 = *f1;
  m.f2 = *f2;
  m.l1 = f1->local_part;
  m.l2 = f2->local_part;
  m.sigma = f3->local_part;
  const Category& A2 = c2.local();
  m.commutes = f3->index == f2->index && A2.compose(cm.F.mor(m.l1), m.sigma) == m.l2 &&
               B2.compose(c2.U_mor(m.sigma), f2->unit.unit) == h;
  m.iso = is_iso(A2, m.sigma);
  return m;
}

USpace transport_uspace(const ContextMorphism& cm, const USpace& x) {
  const Category& B2 = cm.c2->ambient();
  USpace y;
  y.sheaf = Presheaf::empty_on(B2, x.space());
  for (size_t i = 0; i < x.sheaf.value.size(); ++i) {
    y.sheaf.value[i] = cm.G.obj(x.sheaf.value[i]);
    for (size_t k = 0; k < x.sheaf.value.size(); ++k)
      if (x.sheaf.res[i][k] >= 0) y.sheaf.res[i][k] = cm.G.mor(x.sheaf.res[i][k]);
  }
  for (size_t p = 0; p < x.local.size(); ++p) {
    y.local.push_back(cm.F.obj(x.local[p]));
    y.stalk_iso.push_back(B2.compose(cm.theta(x.local[p]), cm.G.mor(x.stalk_iso[p])));
  }
  return y;
}

BSpace transport_bspace(const ContextMorphism& cm, const BSpace& b) {
  const Category& B2 = cm.c2->ambient();
  BSpace y{Presheaf::empty_on(B2, b.space())};
  for (size_t i = 0; i < b.sheaf.value.size(); ++i) {
    y.sheaf.value[i] = cm.G.obj(b.sheaf.value[i]);
    for (size_t k = 0; k < b.sheaf.value.size(); ++k)
      if (b.sheaf.res[i][k] >= 0) y.sheaf.res[i][k] = cm.G.mor(b.sheaf.res[i][k]);
  }
  return y;
}

json TransportReport::to_json(const DiersContext& c2) const {
  json j;
  j["ok"] = ok();
  j["sheaf_ok"] = sheaf_ok;
  j["uspace_ok"] = uspace_ok;
  j["continuous"] = continuous;
  j["preimage_formula"] = preimage_formula;
  j["sigma_ok"] = sigma_ok;
  j["flat_is_mate"] = flat_is_mate;
  j["sigma_iso"] = sigma_iso;
  j["point_map"] = sigma.f;
  j["flat"] = json::array();
  for (Mor l : sigma.local) j["flat"].push_back(l >= 0 ? c2.local().mor_name(l) : "");
  if (!failure.empty()) j["failure"] = failure;
  return j;
}

TransportReport transport(const ContextMorphism& cm, const BSpace& b) {
  const DiersContext& c1 = *cm.c1;
  const DiersContext& c2 = *cm.c2;
  const Category& B1 = c1.ambient();
  const Category& B2 = c2.ambient();
  TransportReport r;
  auto fail = [&](const std::string& w) {
    if (r.failure.empty()) r.failure = w;
  };
  r.gb = transport_bspace(cm, b);
  std::string why;
  r.sheaf_ok = check_bspace(r.gb, &why);
  if (!r.sheaf_ok) {
    fail("G B: " + why);
    return r;
  }
  auto S1 = bspace_structural_sheaf(c1, b);
  auto S2 = bspace_structural_sheaf(c2, r.gb);
  r.fx = transport_uspace(cm, S1.uspace);
  r.uspace_ok = check_uspace(c2, r.fx, &why);
  if (!r.uspace_ok) fail("F Spec: " + why);

  // s : (x, xi) -> (x, unit of G(xi))
  r.flat_is_mate = true;
  for (const auto& pt : S1.glued.points) {
    auto m = mate_comparison(cm, pt.xi.local, pt.xi.unit);
    if (!m) {
      fail("G of a point has no unique factorization");
      return r;
    }
    int q = -1;
    for (int i : members(S2.glued.fiber[pt.base]))
      if (S2.glued.points[i].unit == m->f2.index) q = i;
    r.sigma.f.push_back(q);
    r.sigma.local.push_back(m->l2);
    if (!m->commutes || m->sigma != m->l2) r.flat_is_mate = false;
  }
  if (!r.flat_is_mate) fail("flat part differs from the canonical mate");
  r.continuous = is_continuous(S1.glued.space, S2.glued.space, r.sigma.f);
  if (!r.continuous) fail("point map s is not continuous");

  r.preimage_formula = true;
  const auto& os = b.space().opens();
  for (const auto& bb : S2.glued.basis) {
    Mor gs = cm.Gstar.mor(bb.n);
    Mor eps = cm.counit(b.sheaf.value[bb.open]);
    auto po = B1.pushout(gs, eps);
    if (!po) {
      r.preimage_formula = false;
      fail("no pushout of G* n along the counit");
      break;
    }
    PointSet want = 0;
    for (size_t i = 0; i < S1.glued.points.size(); ++i)
      if (glued_member(c1, b, bb.open, po->legs[1], S1.glued.points[i])) want |= bit(static_cast<int>(i));
    if (preimage(r.sigma.f, bb.set) != want) {
      r.preimage_formula = false;
      fail("preimage formula fails on open " + std::to_string(os[bb.open]));
      break;
    }
  }

  if (r.continuous && r.uspace_ok) {
    auto sh = kan_sharp(c2, S2, r.fx, r.sigma.f, r.sigma.local, &why);
    if (sh) {
      r.sigma.sharp = *sh;
      r.sigma_ok = check_uspace_morphism(c2, S2.uspace, r.fx, r.sigma, &why);
    }
    if (!r.sigma_ok) fail("sigma: " + why);
  }
  if (r.sigma_ok) {
    r.sigma_iso = true;
    for (Mor c : r.sigma.sharp.comp) r.sigma_iso = r.sigma_iso && is_iso(B2, c);
    for (Mor l : r.sigma.local) r.sigma_iso = r.sigma_iso && is_iso(c2.local(), l);
  }
  return r;
}

}  // namespace diers
