#include "diers/sheaf.hpp"

#include <algorithm>

namespace diers {

Presheaf Presheaf::empty_on(const Category& c, const FinTopSpace& x) {
  Presheaf p;
  p.cat = &c;
  p.space = x;
  size_t k = x.opens().size();
  p.value.assign(k, -1);
  p.res.assign(k, std::vector<Mor>(k, -1));
  return p;
}

bool Presheaf::functorial(std::string* why) const {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  const auto& os = space.opens();
  size_t k = os.size();
  if (value.size() != k || res.size() != k) return fail("table size does not match the open lattice");
  for (size_t v = 0; v < k; ++v)
    for (size_t u = 0; u < k; ++u) {
      bool sub = (os[u] & ~os[v]) == 0;
      Mor r = res[v][u];
      if (sub != (r >= 0)) return fail("restriction present exactly on inclusions");
      if (!sub) continue;
      if (cat->dom(r) != value[v] || cat->cod(r) != value[u]) return fail("restriction has wrong ends");
      if (u == v && r != cat->id(value[v])) return fail("restriction to itself is not the identity");
    }
  for (size_t w = 0; w < k; ++w)
    for (size_t v = 0; v < k; ++v) {
      if (res[w][v] < 0) continue;
      for (size_t u = 0; u < k; ++u)
        if (res[v][u] >= 0 && cat->compose(res[v][u], res[w][v]) != res[w][u])
          return fail("restrictions do not compose");
    }
  return true;
}

json Presheaf::to_json() const {
  json j;
  j["space"] = space.to_json();
  j["values"] = json::array();
  const auto& os = space.opens();
  for (size_t i = 0; i < os.size(); ++i)
    j["values"].push_back({{"open", members(os[i])}, {"object", cat->obj_name(value[i])}});
  j["restrictions"] = json::array();
  for (size_t v = 0; v < os.size(); ++v)
    for (size_t u = 0; u < os.size(); ++u)
      if (res[v][u] >= 0 && u != v)
        j["restrictions"].push_back({{"from", members(os[v])}, {"to", members(os[u])},
                                     {"map", cat->mor_json(res[v][u])}});
  return j;
}

Diagram point_diagram(const Presheaf& p, PointSet u, std::vector<int>* pts) {
  Diagram d;
  auto xs = members(u);
  for (int x : xs) d.add_node(p.stalk(x));
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < xs.size(); ++j)
      if (i != j && p.space.specializes(xs[i], xs[j]))
        d.add_edge(static_cast<int>(i), static_cast<int>(j),
                   p.restrict(p.space.minimal_open(xs[i]), p.space.minimal_open(xs[j])));
  if (pts) *pts = xs;
  return d;
}

Cone point_cone(const Presheaf& p, PointSet u) {
  Cone c{p.at(u), {}};
  for (int x : members(u)) c.legs.push_back(p.restrict(u, p.space.minimal_open(x)));
  return c;
}

std::optional<Mor> glue_points(const Category& c, const Diagram& d, const Cone& lim, Obj z,
                               const std::vector<Mor>& comps) {
  auto m = c.mediate_limit(d, lim, Cone{z, comps});
  if (!m) return std::nullopt;
  for (size_t i = 0; i < comps.size(); ++i)
    if (c.compose(lim.legs[i], *m) != comps[i]) return std::nullopt;
  return m;
}

std::optional<Mor> glue_points(const Presheaf& s, PointSet u, Obj z, const std::vector<Mor>& comps) {
  return glue_points(*s.cat, point_diagram(s, u), point_cone(s, u), z, comps);
}

json DescentResult::to_json() const {
  json j;
  j["ok"] = ok;
  if (!ok) {
    j["open"] = members(open);
    j["cover"] = json::array();
    for (PointSet c : cover) j["cover"].push_back(members(c));
  }
  return j;
}

namespace {

// P(u) versus the limit of the descent diagram of a cover of u.
bool cover_ok(const Presheaf& p, PointSet u, const std::vector<PointSet>& cover) {
  const Category& c = *p.cat;
  Diagram d;
  Cone cn{p.at(u), {}};
  for (PointSet ui : cover) {
    d.add_node(p.at(ui));
    cn.legs.push_back(p.restrict(u, ui));
  }
  int k = static_cast<int>(cover.size());
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      PointSet w = cover[i] & cover[j];
      int n = d.add_node(p.at(w));
      d.add_edge(i, n, p.restrict(cover[i], w));
      d.add_edge(j, n, p.restrict(cover[j], w));
      cn.legs.push_back(p.restrict(u, w));
    }
  auto lim = c.limit(d);
  if (!lim) return false;
  auto m = c.mediate_limit(d, *lim, cn);
  return m && is_iso(c, *m);
}

}  // namespace

DescentResult check_descent(const Presheaf& p, bool exhaustive) {
  DescentResult r;
  const auto& os = p.space.opens();
  for (PointSet u : os) {
    std::vector<PointSet> canon;
    for (int x : members(u)) {
      PointSet m = p.space.minimal_open(x);
      if (std::find(canon.begin(), canon.end(), m) == canon.end()) canon.push_back(m);
    }
    if (!cover_ok(p, u, canon)) {
      r.ok = false;
      r.open = u;
      r.cover = canon;
      return r;
    }
  }
  if (!exhaustive || p.space.size() > 3) return r;
  for (PointSet u : os) {
    std::vector<PointSet> inside;
    for (PointSet v : os)
      if (v && (v & ~u) == 0) inside.push_back(v);
    for (std::uint32_t mask = 1; mask < (1u << inside.size()); ++mask) {
      std::vector<PointSet> cover;
      PointSet un = 0;
      for (size_t i = 0; i < inside.size(); ++i)
        if ((mask >> i) & 1) {
          cover.push_back(inside[i]);
          un |= inside[i];
        }
      if (un != u) continue;
      if (!cover_ok(p, u, cover)) {
        r.ok = false;
        r.open = u;
        r.cover = cover;
        return r;
      }
    }
  }
  return r;
}

Sheafification sheafify(const Presheaf& p) {
  const Category& c = *p.cat;
  const auto& os = p.space.opens();
  size_t k = os.size();
  Sheafification s;
  s.sheaf = Presheaf::empty_on(c, p.space);
  std::vector<Diagram> ds(k);
  std::vector<Cone> lims(k);
  std::vector<std::vector<int>> pts(k);
  for (size_t i = 0; i < k; ++i) {
    ds[i] = point_diagram(p, os[i], &pts[i]);
    auto l = c.limit(ds[i]);
    if (!l) throw category_error("sheafify: ambient lacks a matching-family limit");
    lims[i] = *l;
    s.sheaf.value[i] = l->apex;
  }
  s.gamma.assign(k, -1);
  for (size_t i = 0; i < k; ++i) {
    auto g = c.mediate_limit(ds[i], lims[i], point_cone(p, os[i]));
    if (!g) throw category_error("sheafify: no comparison map");
    s.gamma[i] = *g;
    for (size_t j = 0; j < k; ++j) {
      if ((os[j] & ~os[i]) != 0) continue;
      if (i == j) {
        s.sheaf.res[i][j] = c.id(s.sheaf.value[i]);
        continue;
      }
      Cone sub{lims[i].apex, {}};
      for (int x : pts[j]) {
        auto at = std::find(pts[i].begin(), pts[i].end(), x) - pts[i].begin();
        sub.legs.push_back(lims[i].legs[at]);
      }
      auto r = c.mediate_limit(ds[j], lims[j], sub);
      if (!r) throw category_error("sheafify: no restriction map");
      s.sheaf.res[i][j] = *r;
    }
  }
  return s;
}

bool is_natural(const Presheaf& s, const Presheaf& t, const SheafMor& m) {
  const Category& c = *s.cat;
  size_t k = s.space.opens().size();
  if (m.comp.size() != k) return false;
  for (size_t i = 0; i < k; ++i) {
    if (m.comp[i] < 0 || c.dom(m.comp[i]) != s.value[i] || c.cod(m.comp[i]) != t.value[i]) return false;
    for (size_t j = 0; j < k; ++j)
      if (s.res[i][j] >= 0 && c.compose(t.res[i][j], m.comp[i]) != c.compose(m.comp[j], s.res[i][j]))
        return false;
  }
  return true;
}

SheafMor identity_mor(const Presheaf& s) {
  SheafMor m;
  for (Obj v : s.value) m.comp.push_back(s.cat->id(v));
  return m;
}

SheafMor compose_mor(const Category& c, const SheafMor& g, const SheafMor& f) {
  SheafMor m;
  for (size_t i = 0; i < f.comp.size(); ++i) m.comp.push_back(c.compose(g.comp[i], f.comp[i]));
  return m;
}

std::optional<SheafMor> extend_from_points(const Presheaf& s, const Presheaf& t,
                                           const std::vector<Mor>& at_points) {
  const Category& c = *s.cat;
  SheafMor m;
  for (PointSet u : s.space.opens()) {
    std::vector<Mor> comps;
    for (int x : members(u)) comps.push_back(c.compose(at_points[x], s.restrict(u, s.space.minimal_open(x))));
    auto g = glue_points(t, u, s.at(u), comps);
    if (!g) return std::nullopt;
    m.comp.push_back(*g);
  }
  if (!is_natural(s, t, m)) return std::nullopt;
  return m;
}

std::vector<SheafMor> enumerate_sheaf_morphisms(const Presheaf& s, const Presheaf& t, size_t cap) {
  const Category& c = *s.cat;
  const auto& X = s.space;
  int n = X.size();
  std::vector<SheafMor> out;
  std::vector<Mor> pick(n, -1);
  auto compatible = [&](int x) {
    for (int y = 0; y < x; ++y) {
      PointSet ux = X.minimal_open(x), uy = X.minimal_open(y);
      if ((uy & ~ux) == 0 &&
          c.compose(t.restrict(ux, uy), pick[x]) != c.compose(pick[y], s.restrict(ux, uy)))
        return false;
      if ((ux & ~uy) == 0 &&
          c.compose(t.restrict(uy, ux), pick[y]) != c.compose(pick[x], s.restrict(uy, ux)))
        return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, int x) -> void {
    if (out.size() >= cap) return;
    if (x == n) {
      if (auto m = extend_from_points(s, t, pick)) out.push_back(*m);
      return;
    }
    for (Mor m : c.hom(s.stalk(x), t.stalk(x))) {
      pick[x] = m;
      if (compatible(x)) self(self, x + 1);
    }
  };
  rec(rec, 0);
  return out;
}

std::optional<SheafMor> extend_along_unit(const Sheafification& ap, const Presheaf& p, const Presheaf& t,
                                          const SheafMor& m) {
  const Category& c = *p.cat;
  const auto& X = p.space;
  std::vector<Mor> at(X.size());
  for (int x = 0; x < X.size(); ++x) {
    int i = X.open_index(X.minimal_open(x));
    auto inv = inverse(c, ap.gamma[i]);
    if (!inv) return std::nullopt;
    at[x] = c.compose(m.comp[i], *inv);
  }
  return extend_from_points(ap.sheaf, t, at);
}

Presheaf product_sheaf(const Category& c, const std::vector<Obj>& vals, std::vector<Mor>* legs) {
  int n = static_cast<int>(vals.size());
  auto X = FinTopSpace::discrete(n);
  Presheaf p = Presheaf::empty_on(c, X);
  const auto& os = X.opens();
  std::vector<Diagram> ds(os.size());
  std::vector<Cone> lims(os.size());
  for (size_t k = 0; k < os.size(); ++k) {
    for (int i : members(os[k])) ds[k].add_node(vals[i]);
    auto l = c.limit(ds[k]);
    if (!l) throw category_error("product_sheaf: product absent");
    lims[k] = *l;
    p.value[k] = l->apex;
  }
  for (size_t k = 0; k < os.size(); ++k)
    for (size_t j = 0; j < os.size(); ++j) {
      if ((os[j] & ~os[k]) != 0) continue;
      if (j == k) {
        p.res[k][j] = c.id(p.value[k]);
        continue;
      }
      auto kk = members(os[k]);
      Cone sub{lims[k].apex, {}};
      for (int i : members(os[j]))
        sub.legs.push_back(lims[k].legs[std::find(kk.begin(), kk.end(), i) - kk.begin()]);
      auto r = c.mediate_limit(ds[j], lims[j], sub);
      if (!r) throw category_error("product_sheaf: no projection");
      p.res[k][j] = *r;
    }
  if (legs) {
    legs->clear();
    for (int x = 0; x < n; ++x) legs->push_back(lims[X.open_index(bit(x))].legs[0]);
  }
  return p;
}

Presheaf direct_image(const PointMap& f, const FinTopSpace& y, const Presheaf& s) {
  Presheaf p = Presheaf::empty_on(*s.cat, y);
  const auto& os = y.opens();
  for (size_t v = 0; v < os.size(); ++v) {
    PointSet pv = preimage(f, os[v]);
    p.value[v] = s.at(pv);
    for (size_t u = 0; u < os.size(); ++u)
      if ((os[u] & ~os[v]) == 0) p.res[v][u] = s.restrict(pv, preimage(f, os[u]));
  }
  return p;
}

InverseImage inverse_image(const PointMap& f, const FinTopSpace& x, const Presheaf& t) {
  const Category& c = *t.cat;
  const auto& ys = t.space.opens();
  const auto& xs = x.opens();
  InverseImage r;
  r.pre = Presheaf::empty_on(c, x);
  std::vector<Diagram> ds(xs.size());
  r.colims.resize(xs.size());
  r.index.resize(xs.size());
  for (size_t u = 0; u < xs.size(); ++u) {
    PointSet img = image(f, xs[u]);
    auto& idx = r.index[u];
    for (size_t v = 0; v < ys.size(); ++v)
      if ((img & ~ys[v]) == 0) idx.push_back(static_cast<int>(v));
    for (int v : idx) ds[u].add_node(t.value[v]);
    for (size_t a = 0; a < idx.size(); ++a)
      for (size_t b = 0; b < idx.size(); ++b)
        if (a != b && (ys[idx[b]] & ~ys[idx[a]]) == 0)
          ds[u].add_edge(static_cast<int>(a), static_cast<int>(b), t.res[idx[a]][idx[b]]);
    auto cc = c.colimit(ds[u]);
    if (!cc) throw category_error("inverse_image: colimit absent");
    r.colims[u] = *cc;
    r.pre.value[u] = cc->apex;
  }
  for (size_t u = 0; u < xs.size(); ++u)
    for (size_t w = 0; w < xs.size(); ++w) {
      if ((xs[w] & ~xs[u]) != 0) continue;
      Cocone other{r.colims[w].apex, {}};
      for (int v : r.index[u]) {
        auto at = std::find(r.index[w].begin(), r.index[w].end(), v) - r.index[w].begin();
        other.legs.push_back(r.colims[w].legs[at]);
      }
      auto m = c.mediate_colimit(ds[u], r.colims[u], other);
      if (!m) throw category_error("inverse_image: no restriction map");
      r.pre.res[u][w] = *m;
    }
  r.diagrams = std::move(ds);
  r.sheaf = sheafify(r.pre);
  return r;
}

SheafMor to_direct(const PointMap& f, const InverseImage& ft, const Presheaf& t, const Presheaf& s,
                   const SheafMor& a) {
  const Category& c = *t.cat;
  const auto& ys = t.space.opens();
  SheafMor b;
  for (size_t v = 0; v < ys.size(); ++v) {
    int u = s.space.open_index(preimage(f, ys[v]));
    const auto& idx = ft.index[u];
    auto at = std::find(idx.begin(), idx.end(), static_cast<int>(v)) - idx.begin();
    b.comp.push_back(compose_chain(c, {a.comp[u], ft.sheaf.gamma[u], ft.colims[u].legs[at]}));
  }
  return b;
}

std::optional<SheafMor> to_inverse(const PointMap& f, const InverseImage& ft, const Presheaf& t,
                                   const Presheaf& s, const SheafMor& b) {
  const Category& c = *t.cat;
  const auto& xs = s.space.opens();
  const auto& ys = t.space.opens();
  SheafMor pre;
  for (size_t u = 0; u < xs.size(); ++u) {
    Cocone other{s.value[u], {}};
    for (int v : ft.index[u]) other.legs.push_back(c.compose(s.restrict(preimage(f, ys[v]), xs[u]), b.comp[v]));
    auto m = c.mediate_colimit(ft.diagrams[u], ft.colims[u], other);
    if (!m) return std::nullopt;
    pre.comp.push_back(*m);
  }
  return extend_along_unit(ft.sheaf, ft.pre, s, pre);
}

Mor flat_at(const PointMap& f, const Presheaf& t, const Presheaf& s, const SheafMor& sharp, int y) {
  const Category& c = *t.cat;
  PointSet v = t.space.minimal_open(f[y]);
  PointSet pv = preimage(f, v);
  return c.compose(s.restrict(pv, s.space.minimal_open(y)), sharp.comp[t.space.open_index(v)]);
}

}  // namespace diers
