#include "diers/bspace.hpp"
#include "diers/instances.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace diers {

bool check_bspace(const BSpace& s, std::string* why) {
  std::string w;
  if (!s.sheaf.functorial(&w)) {
    if (why) *why = w;
    return false;
  }
  auto d = check_descent(s.sheaf, true);
  if (!d.ok) {
    if (why) *why = "descent fails on open " + d.to_json()["open"].dump();
    return false;
  }
  return true;
}

namespace {

PointSet set_of(const json& a) {
  PointSet s = 0;
  for (const auto& x : a) s |= bit(x.get<int>());
  return s;
}

}  // namespace

BSpace bspace_from_json(const DiersContext& ctx, const json& j) {
  const Category& B = ctx.ambient();
  const json& sp = j.at("space");
  int n = sp.at("points").get<int>();
  if (n < 0 || n > kMaxPoints) throw category_error("bspace: bad point count");
  FinTopSpace X;
  if (sp.value("discrete", false)) {
    X = FinTopSpace::discrete(n);
  } else {
    std::vector<PointSet> sub;
    for (const auto& o : sp.value("subbasis", sp.value("opens", json::array()))) sub.push_back(set_of(o));
    X = FinTopSpace::generated(n, sub);
  }
  BSpace s;
  s.sheaf = Presheaf::empty_on(B, X);
  for (const auto& v : j.at("values")) {
    PointSet o = set_of(v.at("open"));
    if (!X.is_open(o)) throw category_error("bspace: value given on a non-open set");
    s.sheaf.value[X.open_index(o)] = find_object(ctx, v.at("object").get<std::string>());
  }
  const auto& os = X.opens();
  for (size_t i = 0; i < os.size(); ++i)
    if (s.sheaf.value[i] < 0) throw category_error("bspace: no value on open " + json(members(os[i])).dump());
  for (const auto& r : j.value("restrictions", json::array())) {
    PointSet from = set_of(r.at("from")), to = set_of(r.at("to"));
    if (!X.is_open(from) || !X.is_open(to)) throw category_error("bspace: restriction between non-opens");
    int v = X.open_index(from), u = X.open_index(to);
    Mor pick = -1;
    json want = r.contains("map") && r["map"].is_object() ? r["map"].value("map", json()) : r.value("map", json());
    for (Mor h : B.hom(s.sheaf.value[v], s.sheaf.value[u])) {
      json mj = B.mor_json(h);
      if ((r.contains("map") && mj.contains("map") && mj["map"] == want) ||
          (r.contains("name") && B.mor_name(h) == r["name"].get<std::string>()))
        pick = h;
    }
    if (pick < 0) throw category_error("bspace: restriction map not found");
    s.sheaf.res[v][u] = pick;
  }
  for (size_t v = 0; v < os.size(); ++v)
    for (size_t u = 0; u < os.size(); ++u) {
      if ((os[u] & ~os[v]) != 0 || s.sheaf.res[v][u] >= 0) continue;
      if (u == v) {
        s.sheaf.res[v][u] = B.id(s.sheaf.value[v]);
        continue;
      }
      const auto& h = B.hom(s.sheaf.value[v], s.sheaf.value[u]);
      if (h.size() != 1)
        throw category_error("bspace: restriction " + json(members(os[v])).dump() + " -> " +
                             json(members(os[u])).dump() + " not given and not determined");
      s.sheaf.res[v][u] = h[0];
    }
  std::string why;
  if (!check_bspace(s, &why)) throw category_error("bspace: " + why);
  return s;
}

BSpace load_bspace(const DiersContext& ctx, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw category_error("cannot open " + path);
  return bspace_from_json(ctx, json::parse(in));
}

BSpace discrete_embedding(const DiersContext& ctx, const std::vector<Obj>& family) {
  return BSpace{product_sheaf(ctx.ambient(), family)};
}

BSpace iota_U(const USpace& x) { return BSpace{x.sheaf}; }

int GluedSpectrum::basic_index(int open, int elem) const {
  for (size_t i = 0; i < basis.size(); ++i)
    if (basis[i].open == open && basis[i].elem == elem) return static_cast<int>(i);
  return -1;
}

namespace {

std::vector<Mor> member_witnesses(const DiersContext& ctx, const BSpace& s, int u, Mor n, const GluedPoint& pt) {
  const Category& B = ctx.ambient();
  const auto& X = s.space();
  PointSet o = X.opens()[u];
  if (!has(o, pt.base)) return {};
  Mor want = B.compose(pt.xi.unit, s.sheaf.restrict(o, X.minimal_open(pt.base)));
  return B.extensions(n, want);
}

PointSet members_of(const DiersContext& ctx, const BSpace& s, const GluedSpectrum& g, int u, Mor n) {
  PointSet r = 0;
  for (size_t i = 0; i < g.points.size(); ++i)
    if (glued_member(ctx, s, u, n, g.points[i])) r |= bit(static_cast<int>(i));
  return r;
}

}  // namespace

std::optional<Mor> glued_member(const DiersContext& ctx, const BSpace& s, int u, Mor n, const GluedPoint& pt) {
  auto w = member_witnesses(ctx, s, u, n, pt);
  if (w.empty()) return std::nullopt;
  return w[0];
}

GluedSpectrum bspace_spec_space(const DiersContext& ctx, const BSpace& s) {
  const Category& B = ctx.ambient();
  const auto& X = s.space();
  const auto& os = X.opens();
  GluedSpectrum g;
  auto fail = [&](const std::string& w) {
    if (g.failure.empty()) g.failure = w;
  };
  g.fiber.assign(X.size(), 0);
  for (int x = 0; x < X.size(); ++x) {
    const auto& us = ctx.local_units(s.stalk(x));
    for (size_t i = 0; i < us.size(); ++i) {
      g.fiber[x] |= bit(static_cast<int>(g.points.size()));
      g.points.push_back({x, static_cast<int>(i), us[i]});
      if (g.points.size() > kMaxPoints) throw category_error("glued spectrum has more than 64 points");
    }
  }
  int np = static_cast<int>(g.points.size());
  std::vector<PointSet> sets;
  for (size_t u = 0; u < os.size(); ++u) {
    const auto& p = ctx.d_poset(s.sheaf.value[u]);
    for (size_t e = 0; e < p.size(); ++e) {
      GluedBasic b{static_cast<int>(u), static_cast<int>(e), p.elems[e], 0};
      std::vector<Mor> reach(np, -1);
      for (int i = 0; i < np; ++i) {
        auto w = member_witnesses(ctx, s, static_cast<int>(u), b.n, g.points[i]);
        if (w.empty()) continue;
        if (w.size() > 1) g.reach_unique = false;
        b.set |= bit(i);
        reach[i] = w[0];
      }
      g.basis.push_back(b);
      g.reach.push_back(std::move(reach));
      sets.push_back(b.set);
    }
  }
  g.space = FinTopSpace::generated(np, sets);
  for (const auto& pt : g.points) g.eta.push_back(pt.base);

  g.eta_continuous = is_continuous(g.space, X, g.eta);
  g.eta_open = true;
  for (PointSet w : g.space.opens())
    if (!X.is_open(image(g.eta, w))) g.eta_open = false;
  g.eta_image_basic = true;
  g.eta_image_unit = true;
  for (const auto& b : g.basis)
    if (image(g.eta, b.set) != os[b.open]) {
      g.eta_image_basic = false;
      if (is_identity(B, b.n)) g.eta_image_unit = false;
    }
  g.eta_preimage = true;
  for (size_t u = 0; u < os.size(); ++u) {
    Obj bu = s.sheaf.value[u];
    int k = g.basic_index(static_cast<int>(u), dposet_index(ctx, bu, B.id(bu)));
    if (k < 0 || g.basis[k].set != preimage(g.eta, os[u])) g.eta_preimage = false;
  }
  if (!g.eta_continuous) fail("eta is not continuous");

  // stalk spectra inside the glued space
  g.iota_embeddings = true;
  std::vector<PointSet> union_sub;
  for (int x = 0; x < X.size(); ++x) {
    Spectrum sx = spec_space(ctx, s.stalk(x));
    PointMap io;
    for (int q : members(g.fiber[x])) io.push_back(q);
    bool emb = is_continuous(sx.space, g.space, io);
    for (PointSet o : sx.space.opens()) {
      PointSet img = 0;
      for (int y : members(o)) img |= bit(io[y]);
      union_sub.push_back(img);
      bool hit = false;
      for (PointSet w : g.space.opens()) hit = hit || preimage(io, w) == o;
      emb = emb && hit;
    }
    if (!emb) {
      g.iota_embeddings = false;
      fail("stalk spectrum at " + std::to_string(x) + " is not embedded");
    }
    g.iota.push_back(std::move(io));
  }
  g.coproduct_topology = FinTopSpace::generated(np, union_sub).opens() == g.space.opens();

  // p_u : D_(u,1) -> Spec(B(u))
  g.p_ok = true;
  for (size_t u = 0; u < os.size(); ++u) {
    Obj bu = s.sheaf.value[u];
    PointSet d = preimage(g.eta, os[u]);
    PointMap pu;
    std::vector<Mor> loc;
    bool ok = true;
    for (int i : members(d)) {
      const auto& pt = g.points[i];
      Mor q = B.compose(pt.xi.unit, s.sheaf.restrict(os[u], X.minimal_open(pt.base)));
      auto fac = ctx.factorize(q, pt.xi.local);
      if (!fac) {
        ok = false;
        pu.push_back(-1);
        loc.push_back(-1);
        continue;
      }
      pu.push_back(fac->index);
      loc.push_back(fac->local_part);
    }
    if (ok) {
      Spectrum su = spec_space(ctx, bu);
      auto inside = members(d);
      std::vector<PointSet> sub;
      for (PointSet w : g.space.opens())
        if ((w & ~d) == 0) {
          PointSet r = 0;
          for (size_t k = 0; k < inside.size(); ++k)
            if (has(w, inside[k])) r |= bit(static_cast<int>(k));
          sub.push_back(r);
        }
      auto D = FinTopSpace::generated(static_cast<int>(inside.size()), sub);
      ok = is_continuous(D, su.space, pu);
      const auto& p = ctx.d_poset(bu);
      for (size_t e = 0; e < p.size() && ok; ++e) {
        PointSet back = 0;
        for (size_t k = 0; k < inside.size(); ++k)
          if (has(su.basis[e], pu[k])) back |= bit(inside[k]);
        int bi = g.basic_index(static_cast<int>(u), static_cast<int>(e));
        ok = bi >= 0 && back == g.basis[bi].set;
      }
    }
    if (!ok) {
      g.p_ok = false;
      fail("p_u fails on open " + std::to_string(os[u]));
    }
    g.p.push_back(std::move(pu));
    g.p_local.push_back(std::move(loc));
  }

  // D_(u,n) meet D_(v,m) = D_(u meet v, pushed n join pushed m)
  g.intersection_law = true;
  for (size_t a = 0; a < g.basis.size() && g.intersection_law; ++a)
    for (size_t b = a; b < g.basis.size() && g.intersection_law; ++b) {
      PointSet ou = os[g.basis[a].open], ov = os[g.basis[b].open];
      PointSet w = ou & ov;
      int wi = X.open_index(w);
      auto pa = B.pushout(g.basis[a].n, s.sheaf.restrict(ou, w));
      auto pb = B.pushout(g.basis[b].n, s.sheaf.restrict(ov, w));
      std::optional<Mor> jn;
      if (pa && pb) jn = join(ctx, pa->legs[1], pb->legs[1]);
      if (!jn || members_of(ctx, s, g, wi, *jn) != (g.basis[a].set & g.basis[b].set)) {
        g.intersection_law = false;
        fail("intersection law fails");
      }
    }

  // every basic map at a stalk is pushed from some neighbourhood
  g.key_lemma = true;
  for (int x = 0; x < X.size() && g.key_lemma; ++x) {
    Obj bx = s.stalk(x);
    const auto& px = ctx.d_poset(bx);
    for (size_t e = 0; e < px.size(); ++e) {
      bool found = false;
      for (size_t u = 0; u < os.size() && !found; ++u) {
        if (!has(os[u], x)) continue;
        Mor q = s.sheaf.restrict(os[u], X.minimal_open(x));
        for (Mor m : ctx.d_poset(s.sheaf.value[u]).elems) {
          auto po = B.pushout(m, q);
          if (po && dposet_index(ctx, bx, po->legs[1]) == static_cast<int>(e)) {
            found = true;
            break;
          }
        }
      }
      if (!found) {
        g.key_lemma = false;
        fail("a basic map at a stalk is not pushed from a neighbourhood");
        break;
      }
    }
  }

  // xi as the colimit of the pushed units over neighbourhoods of x
  g.stalk_lemma = true;
  for (const auto& pt : g.points) {
    std::vector<int> nb;
    for (size_t u = 0; u < os.size(); ++u)
      if (has(os[u], pt.base)) nb.push_back(static_cast<int>(u));
    std::vector<Factorization> fac;
    Diagram d;
    Cocone legs{ctx.U_obj(pt.xi.local), {}};
    bool ok = true;
    for (int u : nb) {
      auto f = ctx.factorize(B.compose(pt.xi.unit, s.sheaf.restrict(os[u], X.minimal_open(pt.base))), pt.xi.local);
      if (!f) {
        ok = false;
        break;
      }
      fac.push_back(*f);
      d.add_node(ctx.U_obj(f->unit.local));
      legs.legs.push_back(ctx.U_mor(f->local_part));
    }
    for (size_t i = 0; i < nb.size() && ok; ++i)
      for (size_t k = 0; k < nb.size() && ok; ++k) {
        if (i == k || (os[nb[k]] & ~os[nb[i]]) != 0) continue;
        Mor via = B.compose(fac[k].unit.unit, s.sheaf.restrict(os[nb[i]], os[nb[k]]));
        auto t = ctx.factorize(via, fac[k].unit.local);
        if (!t || t->index != fac[i].index) {
          ok = false;
          break;
        }
        d.add_edge(static_cast<int>(i), static_cast<int>(k), ctx.U_mor(t->local_part));
      }
    if (ok) ok = is_cocone(B, d, legs);
    if (ok) {
      auto cc = B.colimit(d);
      auto m = cc ? B.mediate_colimit(d, *cc, legs) : std::nullopt;
      ok = m && is_iso(B, *m);
    }
    if (!ok) {
      g.stalk_lemma = false;
      fail("stalk lemma cocone is not colimiting");
    }
  }
  return g;
}

json GluedSpectrum::to_json(const DiersContext& ctx) const {
  const Category& B = ctx.ambient();
  json j;
  j["points"] = json::array();
  for (size_t i = 0; i < points.size(); ++i)
    j["points"].push_back({{"index", i},
                           {"base", points[i].base},
                           {"unit", B.mor_name(points[i].xi.unit)},
                           {"local", ctx.local().obj_name(points[i].xi.local)}});
  j["basis"] = json::array();
  for (const auto& b : basis)
    j["basis"].push_back({{"open", b.open}, {"n", B.mor_name(b.n)}, {"set", members(b.set)}});
  j["space"] = space.to_json();
  j["eta"] = eta;
  j["checks"] = {{"eta_continuous", eta_continuous},
                 {"eta_open", eta_open},
                 {"eta_image_basic", eta_image_basic},
                 {"eta_image_unit", eta_image_unit},
                 {"eta_preimage", eta_preimage},
                 {"iota_embeddings", iota_embeddings},
                 {"coproduct_topology", coproduct_topology},
                 {"p_ok", p_ok},
                 {"intersection_law", intersection_law},
                 {"key_lemma", key_lemma},
                 {"stalk_lemma", stalk_lemma},
                 {"reach_unique", reach_unique}};
  if (!failure.empty()) j["failure"] = failure;
  return j;
}

std::string GluedSpectrum::to_dot(const DiersContext& ctx) const {
  std::ostringstream s;
  s << "digraph glued {\n  rankdir=BT;\n";
  for (size_t x = 0; x < fiber.size(); ++x) {
    s << "  subgraph cluster_" << x << " {\n    label=\"base " << x << "\";\n";
    for (int i : members(fiber[x]))
      s << "    p" << i << " [label=\"" << ctx.ambient().mor_name(points[i].xi.unit) << "\"];\n";
    s << "  }\n";
  }
  int n = space.size();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (x == y || !space.specializes(x, y)) continue;
      bool cover = true;
      for (int z = 0; z < n && cover; ++z)
        if (z != x && z != y && space.specializes(x, z) && space.specializes(z, y)) cover = false;
      if (cover) s << "  p" << x << " -> p" << y << ";\n";
    }
  s << "}\n";
  return s.str();
}

USpace restrict_uspace(const USpace& x, PointSet open, std::vector<int>* points) {
  const auto& X = x.space();
  auto inside = members(open);
  int k = static_cast<int>(inside.size());
  auto relabel = [&](PointSet w) {
    PointSet r = 0;
    for (int i = 0; i < k; ++i)
      if (has(w, inside[i])) r |= bit(i);
    return r;
  };
  std::vector<PointSet> sub;
  for (PointSet w : X.opens())
    if ((w & ~open) == 0) sub.push_back(relabel(w));
  auto D = FinTopSpace::generated(k, sub);
  USpace r;
  r.sheaf = Presheaf::empty_on(*x.sheaf.cat, D);
  const auto& ds = D.opens();
  std::vector<PointSet> up(ds.size());
  for (size_t i = 0; i < ds.size(); ++i) {
    for (int q : members(ds[i])) up[i] |= bit(inside[q]);
    r.sheaf.value[i] = x.sheaf.at(up[i]);
  }
  for (size_t v = 0; v < ds.size(); ++v)
    for (size_t u = 0; u < ds.size(); ++u)
      if ((ds[u] & ~ds[v]) == 0) r.sheaf.res[v][u] = x.sheaf.restrict(up[v], up[u]);
  for (int q : inside) {
    r.local.push_back(x.local[q]);
    r.stalk_iso.push_back(x.stalk_iso[q]);
  }
  if (points) *points = inside;
  return r;
}

BSpaceStructure bspace_structural_sheaf(const DiersContext& ctx, const BSpace& s) {
  const Category& B = ctx.ambient();
  const auto& X = s.space();
  const auto& os = X.opens();
  BSpaceStructure st;
  st.glued = bspace_spec_space(ctx, s);
  const auto& g = st.glued;
  auto fail = [&](const std::string& w) {
    if (st.failure.empty()) st.failure = w;
  };

  KanBasis kb;
  kb.space = g.space;
  for (const auto& b : g.basis) {
    kb.opens.push_back(b.set);
    kb.cod.push_back(B.cod(b.n));
  }
  for (size_t a = 0; a < g.basis.size(); ++a)
    for (size_t b = 0; b < g.basis.size(); ++b) {
      PointSet ov = os[g.basis[a].open], ou = os[g.basis[b].open];
      if (a == b || (ou & ~ov) != 0) continue;
      Mor want = B.compose(g.basis[b].n, s.sheaf.restrict(ov, ou));
      for (Mor k : B.extensions(g.basis[a].n, want))
        kb.edges.push_back({static_cast<int>(a), static_cast<int>(b), k});
    }
  kb.reach = g.reach;
  for (const auto& pt : g.points) kb.local.push_back(pt.xi.local);
  static_cast<KanSheaf&>(st) = build_kan_sheaf(ctx, kb);
  if (!st.stalks_ok) fail("a stalk of the structural sheaf is not U of its local object");

  // unit B -> eta_* tilde
  if (g.eta_preimage) {
    for (size_t w = 0; w < os.size(); ++w) {
      Obj bw = s.sheaf.value[w];
      int k = g.basic_index(static_cast<int>(w), dposet_index(ctx, bw, B.id(bw)));
      int o = g.space.open_index(g.basis[k].set);
      st.unit.push_back(B.compose(st.tilde.gamma[o], st.zeta[k]));
    }
    st.unit_natural = is_natural(s.sheaf, direct_image(g.eta, X, st.sheaf()), SheafMor{st.unit});
  }
  if (!st.unit_natural) fail("unit is not a sheaf morphism");

  // iota_x^* tilde against the structural sheaf of the stalk
  st.iota_iso = st.stalks_ok;
  for (int x = 0; x < X.size() && st.iota_iso; ++x) {
    auto sx = structural_sheaf(ctx, s.stalk(x));
    const auto& io = g.iota[x];
    std::vector<Mor> ids;
    for (int q : io) ids.push_back(ctx.local().id(g.points[q].xi.local));
    auto sh = kan_sharp(ctx, st, sx.uspace, io, ids);
    std::optional<SheafMor> back;
    if (sh) {
      auto pulled = inverse_image(io, sx.uspace.space(), st.sheaf());
      back = to_inverse(io, pulled, st.sheaf(), sx.sheaf(), *sh);
    }
    bool iso = back.has_value();
    if (back)
      for (Mor c : back->comp) iso = iso && is_iso(B, c);
    if (!iso) {
      st.iota_iso = false;
      fail("pullback along iota_" + std::to_string(x) + " is not the stalk structural sheaf");
    }
  }

  // p_u sharp parts into the restriction of tilde to D_(u,1)
  st.p_sharp_ok = st.stalks_ok && g.p_ok;
  for (size_t u = 0; u < os.size(); ++u) {
    PointSet d = preimage(g.eta, os[u]);
    if (!st.p_sharp_ok || d == 0) {
      st.p_sharp.push_back(std::nullopt);
      continue;
    }
    auto su = structural_sheaf(ctx, s.sheaf.value[u]);
    auto r = restrict_uspace(st.uspace, d);
    auto sh = kan_sharp(ctx, su, r, g.p[u], g.p_local[u]);
    if (sh && !check_uspace_morphism(ctx, su.uspace, r, USpaceMorphism{g.p[u], *sh, g.p_local[u]})) sh.reset();
    if (!sh) {
      st.p_sharp_ok = false;
      fail("p_u has no sharp part on open " + std::to_string(os[u]));
    }
    st.p_sharp.push_back(sh);
  }
  return st;
}

json BSpaceStructure::to_json(const DiersContext& ctx) const {
  const Category& B = ctx.ambient();
  json j;
  j["glued"] = glued.to_json(ctx);
  j["presheaf"] = pre.to_json();
  j["uspace"] = uspace.to_json(ctx);
  j["unit"] = json::array();
  for (Mor m : unit) j["unit"].push_back(B.mor_json(m));
  j["checks"] = {{"stalks_ok", stalks_ok},
                 {"unit_natural", unit_natural},
                 {"iota_iso", iota_iso},
                 {"p_sharp_ok", p_sharp_ok}};
  if (!failure.empty()) j["failure"] = failure;
  return j;
}

bool check_bspace_morphism(const BSpace& s, const BSpace& t, const BSpaceMorphism& m, std::string* why) {
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  if (static_cast<int>(m.f.size()) != t.size()) return fail("point map has wrong size");
  for (int y : m.f)
    if (y < 0 || y >= s.size()) return fail("point map leaves the space");
  if (!is_continuous(t.space(), s.space(), m.f)) return fail("point map is not continuous");
  if (!is_natural(s.sheaf, direct_image(m.f, s.space(), t.sheaf), m.sharp)) return fail("sharp part is not natural");
  return true;
}

BSpaceMorphism identity_morphism(const BSpace& s) {
  BSpaceMorphism m;
  for (int x = 0; x < s.size(); ++x) m.f.push_back(x);
  m.sharp = identity_mor(s.sheaf);
  return m;
}

BSpaceMorphism compose(const Category& c, const BSpace& s1, const BSpace& s2, const BSpaceMorphism& m2,
                       const BSpaceMorphism& m1) {
  BSpaceMorphism m;
  for (int y : m2.f) m.f.push_back(m1.f[y]);
  const auto& os = s1.space().opens();
  for (size_t v = 0; v < os.size(); ++v) {
    int w = s2.space().open_index(preimage(m1.f, os[v]));
    m.sharp.comp.push_back(c.compose(m2.sharp.comp[w], m1.sharp.comp[v]));
  }
  return m;
}

std::vector<BSpaceMorphism> enumerate_bspace_morphisms(const BSpace& s, const BSpace& t, size_t cap) {
  std::vector<BSpaceMorphism> out;
  int ns = s.size(), nt = t.size();
  if (nt > 0 && ns == 0) return out;
  PointMap f(nt, 0);
  while (true) {
    if (is_continuous(t.space(), s.space(), f)) {
      auto T = direct_image(f, s.space(), t.sheaf);
      for (auto& sh : enumerate_sheaf_morphisms(s.sheaf, T, cap)) {
        out.push_back({f, std::move(sh)});
        if (out.size() >= cap) return out;
      }
    }
    int i = 0;
    while (i < nt && ++f[i] == ns) f[i++] = 0;
    if (i == nt) break;
  }
  return out;
}

BSpaceMorphism iota_U(const USpaceMorphism& m) { return {m.f, m.sharp}; }

BSpaceMorphism bspace_unit(const BSpaceStructure& st) { return {st.glued.eta, SheafMor{st.unit}}; }

namespace {

int glued_point(const GluedSpectrum& g, int base, int unit) {
  for (int i : members(g.fiber[base]))
    if (g.points[i].unit == unit) return i;
  return -1;
}

}  // namespace

std::optional<BSpaceSpecMorphism> bspace_spec_morphism(const DiersContext& ctx, const BSpace& s, const BSpace& t,
                                                       const BSpaceStructure& ss, const BSpaceStructure& st,
                                                       const BSpaceMorphism& m, std::string* why) {
  const Category& B = ctx.ambient();
  auto fail = [&](const std::string& w) -> std::optional<BSpaceSpecMorphism> {
    if (why) *why = w;
    return std::nullopt;
  };
  if (!check_bspace_morphism(s, t, m, why)) return std::nullopt;
  BSpaceSpecMorphism r;
  auto& mm = r.morphism;
  for (const auto& pt : st.glued.points) {
    Mor fl = flat_at(m.f, s.sheaf, t.sheaf, m.sharp, pt.base);
    auto fac = ctx.factorize(B.compose(pt.xi.unit, fl), pt.xi.local);
    if (!fac) return fail("point after the stalk map has no unique factorization");
    mm.f.push_back(glued_point(ss.glued, m.f[pt.base], fac->index));
    mm.local.push_back(fac->local_part);
  }
  if (!is_continuous(st.glued.space, ss.glued.space, mm.f)) return fail("point map is not continuous");
  auto sh = kan_sharp(ctx, ss, st.uspace, mm.f, mm.local, why);
  if (!sh) return std::nullopt;
  mm.sharp = *sh;
  if (!check_uspace_morphism(ctx, ss.uspace, st.uspace, mm, why)) return std::nullopt;

  r.spectral = true;
  const auto& os = s.space().opens();
  for (const auto& b : ss.glued.basis) {
    int w = t.space().open_index(preimage(m.f, os[b.open]));
    auto po = B.pushout(b.n, m.sharp.comp[b.open]);
    if (!po || preimage(mm.f, b.set) != members_of(ctx, t, st.glued, w, po->legs[1])) {
      r.spectral = false;
      break;
    }
  }
  return r;
}

std::optional<USpaceMorphism> generalized_transpose(const DiersContext& ctx, const BSpace& s,
                                                    const BSpaceStructure& st, const USpace& a,
                                                    const BSpaceMorphism& m, std::string* why) {
  const Category& B = ctx.ambient();
  auto fail = [&](const std::string& w) -> std::optional<USpaceMorphism> {
    if (why) *why = w;
    return std::nullopt;
  };
  USpaceMorphism r;
  for (int y = 0; y < a.size(); ++y) {
    Mor q = B.compose(a.stalk_iso[y], flat_at(m.f, s.sheaf, a.sheaf, m.sharp, y));
    auto fac = ctx.factorize(q, a.local[y]);
    if (!fac) return fail("stalk map at " + std::to_string(y) + " has no unique factorization");
    r.f.push_back(glued_point(st.glued, m.f[y], fac->index));
    r.local.push_back(fac->local_part);
  }
  if (!is_continuous(a.space(), st.glued.space, r.f)) return fail("transposed point map is not continuous");
  auto sh = kan_sharp(ctx, st, a, r.f, r.local, why);
  if (!sh) return std::nullopt;
  r.sharp = *sh;
  if (!check_uspace_morphism(ctx, st.uspace, a, r, why)) return std::nullopt;
  return r;
}

BSpaceMorphism generalized_untranspose(const Category& c, const BSpace& s, const BSpaceStructure& st,
                                       const USpaceMorphism& m) {
  return compose(c, s, iota_U(st.uspace), iota_U(m), bspace_unit(st));
}

json GeneralizedAdjunctionReport::to_json() const {
  return {{"ok", ok()},
          {"left", left},
          {"right", right},
          {"bijective", bijective},
          {"triangle", triangle},
          {"failure", failure}};
}

GeneralizedAdjunctionReport verify_generalized_adjunction(const DiersContext& ctx, const BSpace& s,
                                                          const USpace& a, size_t cap) {
  const Category& B = ctx.ambient();
  GeneralizedAdjunctionReport r;
  auto fail = [&](const std::string& w) {
    if (r.failure.empty()) r.failure = w;
  };
  auto st = bspace_structural_sheaf(ctx, s);
  if (!st.stalks_ok || !st.unit_natural) {
    fail("structural sheaf is not a U-space: " + st.failure);
    return r;
  }
  auto left = enumerate_bspace_morphisms(s, iota_U(a), cap);
  auto right = enumerate_uspace_morphisms(ctx, st.uspace, a, cap);
  r.left = left.size();
  r.right = right.size();

  bool bij = left.size() == right.size();
  bool tri = true;
  std::vector<char> hit(right.size(), 0);
  for (const auto& l : left) {
    std::string why;
    auto t = generalized_transpose(ctx, s, st, a, l, &why);
    if (!t) {
      fail("transpose failed: " + why);
      bij = false;
      continue;
    }
    auto it = std::find(right.begin(), right.end(), *t);
    if (it == right.end() || hit[it - right.begin()]) {
      fail("transpose is missing or repeated");
      bij = false;
    } else {
      hit[it - right.begin()] = 1;
    }
    if (!(generalized_untranspose(B, s, st, *t) == l)) tri = false;
  }
  for (const auto& m : right) {
    auto back = generalized_untranspose(B, s, st, m);
    if (!check_bspace_morphism(s, iota_U(a), back)) {
      tri = false;
      continue;
    }
    auto t = generalized_transpose(ctx, s, st, a, back);
    if (!t || !(*t == m)) tri = false;
  }
  auto te = generalized_transpose(ctx, s, st, st.uspace, bspace_unit(st));
  if (!te || !(*te == identity_morphism(ctx, st.uspace))) tri = false;
  if (!tri) fail("triangle identity fails");
  r.bijective = bij;
  r.triangle = tri;
  return r;
}

std::vector<Obj> stalks_functor(const BSpace& s) {
  std::vector<Obj> out;
  for (int x = 0; x < s.size(); ++x) out.push_back(s.stalk(x));
  return out;
}

std::vector<Obj> stalks_functor(const USpace& x) { return x.local; }

json BeckChevalleyReport::to_json() const {
  return {{"ok", ok()},
          {"forgetful", forgetful},
          {"spectrum", spectrum},
          {"coproduct", coproduct},
          {"sections", sections},
          {"failure", failure}};
}

BeckChevalleyReport beck_chevalley_check(const DiersContext& ctx, const std::vector<Obj>& family) {
  const Category& B = ctx.ambient();
  BeckChevalleyReport r;
  auto fail = [&](const std::string& w) {
    if (r.failure.empty()) r.failure = w;
  };
  auto s = discrete_embedding(ctx, family);
  auto st = bspace_structural_sheaf(ctx, s);

  // the stalks of iota_U x are U of the locals, for Spec of the family and for the discrete locals
  auto du = discrete_uspace(ctx, stalks_functor(st.uspace));
  r.forgetful = st.stalks_ok;
  for (const USpace* x : {&st.uspace, &du}) {
    auto stalks = stalks_functor(iota_U(*x));
    auto locals = stalks_functor(*x);
    for (size_t i = 0; i < stalks.size(); ++i)
      if (!find_iso(B, stalks[i], ctx.U_obj(locals[i]))) r.forgetful = false;
  }
  if (!r.forgetful) fail("stalks of the underlying space differ from U of the locals");

  r.spectrum = st.glued.points.size() == [&] {
    size_t n = 0;
    for (Obj b : family) n += ctx.local_units(b).size();
    return n;
  }();
  for (size_t i = 0; i < family.size() && r.spectrum; ++i) {
    const auto& us = ctx.local_units(family[i]);
    auto over = members(st.glued.fiber[i]);
    if (over.size() != us.size()) {
      r.spectrum = false;
      break;
    }
    for (size_t k = 0; k < us.size(); ++k)
      if (!find_iso(ctx.local(), st.uspace.local[over[k]], us[k].local)) r.spectrum = false;
  }
  if (!r.spectrum) fail("locals of the spectrum differ from the pointwise local units");

  r.coproduct = st.glued.coproduct_topology;
  if (!r.coproduct) fail("glued space is not the coproduct of the stalk spectra");
  std::vector<Obj> gammas;
  for (Obj b : family) gammas.push_back(global_sections(structural_sheaf(ctx, b).uspace));
  auto prod = product_sheaf(B, gammas);
  r.sections = st.unit_natural && find_iso(B, global_sections(st.uspace), prod.at(prod.space.all())).has_value();
  if (!r.sections) fail("global sections differ from the product of the pointwise global sections");
  return r;
}

}  // namespace diers
