#include "diers/structsheaf.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace diers {

json USpace::to_json(const DiersContext& ctx) const {
  json j;
  j["sheaf"] = sheaf.to_json();
  j["local_family"] = json::array();
  for (size_t x = 0; x < local.size(); ++x)
    j["local_family"].push_back({{"point", x},
                                 {"local", ctx.local().obj_name(local[x])},
                                 {"stalk", ctx.ambient().obj_name(sheaf.stalk(static_cast<int>(x)))},
                                 {"stalk_iso", ctx.ambient().mor_json(stalk_iso[x])}});
  if (base >= 0) j["base"] = ctx.ambient().obj_name(base);
  return j;
}

std::string USpace::to_dot(const DiersContext& ctx) const {
  std::ostringstream s;
  s << "digraph uspace {\n  rankdir=BT;\n";
  int n = size();
  for (int x = 0; x < n; ++x)
    s << "  p" << x << " [label=\"#" << x << " " << ctx.local().obj_name(local[x]) << " | "
      << ctx.ambient().obj_name(sheaf.stalk(x)) << "\"];\n";
  const auto& X = space();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (x == y || !X.specializes(x, y)) continue;
      bool cover = true;
      for (int z = 0; z < n && cover; ++z)
        if (z != x && z != y && X.specializes(x, z) && X.specializes(z, y)) cover = false;
      if (cover) s << "  p" << x << " -> p" << y << ";\n";
    }
  s << "}\n";
  return s.str();
}

bool check_uspace(const DiersContext& ctx, const USpace& x, std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  const Category& B = ctx.ambient();
  std::string w;
  if (!x.sheaf.functorial(&w)) return fail(w);
  if (!check_descent(x.sheaf).ok) return fail("not a sheaf");
  int n = x.size();
  if (static_cast<int>(x.local.size()) != n || static_cast<int>(x.stalk_iso.size()) != n)
    return fail("local family is not total");
  for (int p = 0; p < n; ++p) {
    Mor i = x.stalk_iso[p];
    if (i < 0 || B.dom(i) != x.sheaf.stalk(p) || B.cod(i) != ctx.U_obj(x.local[p]) || !is_iso(B, i))
      return fail("stalk at " + std::to_string(p) + " is not U of its local object");
  }
  return true;
}

USpace discrete_uspace(const DiersContext& ctx, const std::vector<Obj>& family) {
  std::vector<Obj> vals;
  for (Obj a : family) vals.push_back(ctx.U_obj(a));
  USpace u;
  u.sheaf = product_sheaf(ctx.ambient(), vals, &u.stalk_iso);
  u.local = family;
  return u;
}

bool check_uspace_morphism(const DiersContext& ctx, const USpace& s, const USpace& t, const USpaceMorphism& m,
                           std::string* why) {
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  const Category& B = ctx.ambient();
  const Category& A = ctx.local();
  if (static_cast<int>(m.f.size()) != t.size()) return fail("point map has wrong size");
  for (int y : m.f)
    if (y < 0 || y >= s.size()) return fail("point map leaves the space");
  if (!is_continuous(t.space(), s.space(), m.f)) return fail("point map is not continuous");
  auto T = direct_image(m.f, s.space(), t.sheaf);
  if (!is_natural(s.sheaf, T, m.sharp)) return fail("sharp part is not natural");
  for (int y = 0; y < t.size(); ++y) {
    Mor l = m.local[y];
    int x = m.f[y];
    if (l < 0 || A.dom(l) != s.local[x] || A.cod(l) != t.local[y]) return fail("local map has wrong ends");
    Mor fl = flat_at(m.f, s.sheaf, t.sheaf, m.sharp, y);
    if (B.compose(t.stalk_iso[y], fl) != B.compose(ctx.U_mor(l), s.stalk_iso[x]))
      return fail("stalk map at " + std::to_string(y) + " is not U of the local map");
  }
  return true;
}

USpaceMorphism identity_morphism(const DiersContext& ctx, const USpace& s) {
  USpaceMorphism m;
  for (int x = 0; x < s.size(); ++x) {
    m.f.push_back(x);
    m.local.push_back(ctx.local().id(s.local[x]));
  }
  m.sharp = identity_mor(s.sheaf);
  return m;
}

USpaceMorphism compose(const DiersContext& ctx, const USpace& s1, const USpace& s2, const USpaceMorphism& m2,
                       const USpaceMorphism& m1) {
  const Category& B = ctx.ambient();
  USpaceMorphism m;
  for (int y : m2.f) m.f.push_back(m1.f[y]);
  const auto& os = s1.space().opens();
  for (size_t v = 0; v < os.size(); ++v) {
    int w = s2.space().open_index(preimage(m1.f, os[v]));
    m.sharp.comp.push_back(B.compose(m2.sharp.comp[w], m1.sharp.comp[v]));
  }
  for (size_t y = 0; y < m2.f.size(); ++y) m.local.push_back(ctx.local().compose(m2.local[y], m1.local[m2.f[y]]));
  return m;
}

std::vector<USpaceMorphism> enumerate_uspace_morphisms(const DiersContext& ctx, const USpace& s,
                                                       const USpace& t, size_t cap) {
  const Category& B = ctx.ambient();
  const Category& A = ctx.local();
  std::vector<USpaceMorphism> out;
  int ns = s.size(), nt = t.size();
  if (ns == 0 && nt > 0) return out;
  double total = 1;
  for (int i = 0; i < nt; ++i) total *= ns;
  if (total > 1e6) throw category_error("too many point maps to enumerate");
  std::vector<Mor> inv_s(ns);
  for (int x = 0; x < ns; ++x) inv_s[x] = *inverse(B, s.stalk_iso[x]);
  PointMap f(nt, 0);
  while (true) {
    if (is_continuous(t.space(), s.space(), f)) {
      auto T = direct_image(f, s.space(), t.sheaf);
      for (const auto& sharp : enumerate_sheaf_morphisms(s.sheaf, T, cap)) {
        std::vector<std::vector<Mor>> opts(nt);
        bool any = true;
        for (int y = 0; y < nt && any; ++y) {
          Mor want = compose_chain(B, {t.stalk_iso[y], flat_at(f, s.sheaf, t.sheaf, sharp, y), inv_s[f[y]]});
          for (Mor l : A.hom(s.local[f[y]], t.local[y]))
            if (ctx.U_mor(l) == want) opts[y].push_back(l);
          any = !opts[y].empty();
        }
        if (!any) continue;
        std::vector<size_t> pick(nt, 0);
        while (true) {
          USpaceMorphism m{f, sharp, {}};
          for (int y = 0; y < nt; ++y) m.local.push_back(opts[y][pick[y]]);
          out.push_back(std::move(m));
          if (out.size() >= cap) return out;
          int y = 0;
          while (y < nt && ++pick[y] == opts[y].size()) pick[y++] = 0;
          if (y == nt) break;
        }
      }
    }
    int i = 0;
    while (i < nt && ++f[i] == ns) f[i++] = 0;
    if (i == nt) break;
  }
  return out;
}

std::optional<FlatPart> flat_part(const USpace& s, const USpace& t, const USpaceMorphism& m) {
  FlatPart p{inverse_image(m.f, t.space(), s.sheaf), {}};
  auto fl = to_inverse(m.f, p.pulled, s.sheaf, t.sheaf, m.sharp);
  if (!fl) return std::nullopt;
  p.flat = *fl;
  return p;
}

json StructuralSheaf::to_json(const DiersContext& ctx) const {
  const Category& B = ctx.ambient();
  json j;
  j["object"] = B.obj_name(base);
  j["spectrum"] = spec.to_json(ctx);
  j["presheaf"] = pre.to_json();
  j["uspace"] = uspace.to_json(ctx);
  j["zeta"] = json::array();
  for (Mor z : zeta) j["zeta"].push_back(B.mor_json(z));
  j["eta"] = B.mor_json(eta);
  j["eta_iso"] = eta_iso;
  j["order_reflecting"] = order_reflecting;
  j["zeta_iso_on_basis"] = zeta_iso_on_basis;
  j["stalks_ok"] = stalks_ok;
  return j;
}

KanSheaf build_kan_sheaf(const DiersContext& ctx, const KanBasis& kb) {
  const Category& B = ctx.ambient();
  KanSheaf s;
  const auto& X = kb.space;
  const auto& os = X.opens();
  size_t k = os.size();
  s.reach = kb.reach;
  s.pre = Presheaf::empty_on(B, X);
  s.index.resize(k);
  s.diagrams.resize(k);
  s.colims.resize(k);
  for (size_t u = 0; u < k; ++u) {
    auto& idx = s.index[u];
    std::vector<int> pos(kb.opens.size(), -1);
    for (size_t i = 0; i < kb.opens.size(); ++i)
      if ((os[u] & ~kb.opens[i]) == 0) {
        pos[i] = static_cast<int>(idx.size());
        idx.push_back(static_cast<int>(i));
      }
    for (int i : idx) s.diagrams[u].add_node(kb.cod[i]);
    for (const auto& e : kb.edges)
      if (pos[e.src] >= 0 && pos[e.dst] >= 0) s.diagrams[u].add_edge(pos[e.src], pos[e.dst], e.mor);
    auto cc = B.colimit(s.diagrams[u]);
    if (!cc) throw category_error("Kan extension: colimit absent at open " + std::to_string(os[u]));
    s.colims[u] = *cc;
    s.pre.value[u] = cc->apex;
  }
  for (size_t v = 0; v < k; ++v)
    for (size_t u = 0; u < k; ++u) {
      if ((os[u] & ~os[v]) != 0) continue;
      Cocone other{s.colims[u].apex, {}};
      for (int i : s.index[v]) {
        auto at = std::find(s.index[u].begin(), s.index[u].end(), i) - s.index[u].begin();
        other.legs.push_back(s.colims[u].legs[at]);
      }
      auto m = B.mediate_colimit(s.diagrams[v], s.colims[v], other);
      if (!m) throw category_error("Kan extension: no restriction map");
      s.pre.res[v][u] = *m;
    }
  for (size_t i = 0; i < kb.opens.size(); ++i) {
    int u = X.open_index(kb.opens[i]);
    auto at = std::find(s.index[u].begin(), s.index[u].end(), static_cast<int>(i)) - s.index[u].begin();
    s.zeta.push_back(s.colims[u].legs[at]);
  }
  s.tilde = sheafify(s.pre);

  // stalk comparison: colimit over the elements whose open holds x, against U(A_x)
  s.uspace.sheaf = s.tilde.sheaf;
  s.uspace.local = kb.local;
  for (int x = 0; x < X.size(); ++x) {
    int u = X.open_index(X.minimal_open(x));
    Cocone canon{ctx.U_obj(kb.local[x]), {}};
    for (int i : s.index[u]) canon.legs.push_back(kb.reach[i][x]);
    std::optional<Mor> med;
    if (std::find(canon.legs.begin(), canon.legs.end(), -1) == canon.legs.end() &&
        is_cocone(B, s.diagrams[u], canon))
      med = B.mediate_colimit(s.diagrams[u], s.colims[u], canon);
    auto ginv = inverse(B, s.tilde.gamma[u]);
    if (!med || !ginv || !is_iso(B, *med)) {
      s.stalks_ok = false;
      s.uspace.stalk_iso.push_back(-1);
      continue;
    }
    s.uspace.stalk_iso.push_back(B.compose(*med, *ginv));
  }
  return s;
}

StructuralSheaf structural_sheaf(const DiersContext& ctx, Obj b) {
  const Category& B = ctx.ambient();
  StructuralSheaf s;
  s.base = b;
  s.spec = spec_space(ctx, b);
  const auto& p = ctx.d_poset(b);
  const auto& X = s.spec.space;
  KanBasis kb;
  kb.space = X;
  kb.opens = s.spec.basis;
  for (Mor n : p.elems) kb.cod.push_back(B.cod(n));
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = 0; j < p.size(); ++j)
      if (i != j && p.leq(static_cast<int>(i), static_cast<int>(j)))
        kb.edges.push_back({static_cast<int>(i), static_cast<int>(j), p.witness[i][j]});
  kb.reach.assign(p.size(), std::vector<Mor>(X.size(), -1));
  for (size_t i = 0; i < p.size(); ++i)
    for (int x : members(s.spec.basis[i]))
      kb.reach[i][x] = leq_factorization(ctx, p.elems[i], s.spec.points[x].unit).value_or(-1);
  for (const auto& pt : s.spec.points) kb.local.push_back(pt.local);
  static_cast<KanSheaf&>(s) = build_kan_sheaf(ctx, kb);
  s.uspace.base = b;

  int idb = dposet_index(ctx, b, B.id(b));
  if (idb >= 0) {
    s.eta = B.compose(s.tilde.gamma[X.open_index(X.all())], s.zeta[idb]);
    s.eta_iso = is_iso(B, s.eta);
  }
  s.order_reflecting = true;
  s.zeta_iso_on_basis = true;
  for (size_t i = 0; i < p.size(); ++i) {
    s.zeta_iso_on_basis = s.zeta_iso_on_basis && is_iso(B, s.zeta[i]);
    for (size_t j = 0; j < p.size(); ++j)
      if ((s.spec.basis[j] & ~s.spec.basis[i]) == 0 && !p.leq(static_cast<int>(i), static_cast<int>(j)))
        s.order_reflecting = false;
  }
  return s;
}

Obj global_sections(const USpace& x) { return x.sheaf.at(x.space().all()); }

Mor global_sections(const USpace& s, const USpaceMorphism& m) {
  return m.sharp.comp[s.space().open_index(s.space().all())];
}

std::optional<SheafMor> kan_sharp(const DiersContext& ctx, const KanSheaf& src, const USpace& x, const PointMap& f,
                                  const std::vector<Mor>& locals, std::string* why) {
  const Category& B = ctx.ambient();
  const auto& X = src.pre.space;
  const auto& os = X.opens();
  auto T = direct_image(f, X, x.sheaf);
  std::vector<Mor> inv(x.size());
  for (int y = 0; y < x.size(); ++y) {
    auto i = x.stalk_iso[y] >= 0 ? inverse(B, x.stalk_iso[y]) : std::nullopt;
    if (!i) {
      if (why) *why = "target stalk iso missing";
      return std::nullopt;
    }
    inv[y] = *i;
  }
  SheafMor pre;
  for (size_t u = 0; u < os.size(); ++u) {
    PointSet w = preimage(f, os[u]);
    const Diagram wd = point_diagram(x.sheaf, w);
    const Cone wl = point_cone(x.sheaf, w);
    const auto ws = members(w);
    Cocone other{T.value[u], {}};
    for (size_t a = 0; a < src.index[u].size(); ++a) {
      int i = src.index[u][a];
      std::vector<Mor> comps;
      for (int y : ws) {
        Mor r = src.reach[i][f[y]];
        if (r < 0) {
          if (why) *why = "basic open misses the image point";
          return std::nullopt;
        }
        comps.push_back(compose_chain(B, {inv[y], ctx.U_mor(locals[y]), r}));
      }
      auto g = glue_points(B, wd, wl, src.diagrams[u].nodes[a], comps);
      if (!g) {
        if (why) *why = "point components do not glue";
        return std::nullopt;
      }
      other.legs.push_back(*g);
    }
    if (!is_cocone(B, src.diagrams[u], other)) {
      if (why) *why = "glued maps do not form a cocone";
      return std::nullopt;
    }
    auto m = B.mediate_colimit(src.diagrams[u], src.colims[u], other);
    if (!m) {
      if (why) *why = "no map out of the Kan extension";
      return std::nullopt;
    }
    pre.comp.push_back(*m);
  }
  auto r = extend_along_unit(src.tilde, src.pre, T, pre);
  if (!r && why) *why = "no factorization through sheafification";
  return r;
}

std::optional<USpaceMorphism> spec_functor_morphism(const DiersContext& ctx, Mor f, const StructuralSheaf& s1,
                                                    const StructuralSheaf& s2, std::string* why) {
  const Category& B = ctx.ambient();
  if (B.dom(f) != s1.base || B.cod(f) != s2.base) throw category_error("spec_functor_morphism: wrong ends");
  USpaceMorphism m;
  for (const auto& pt : s2.spec.points) {
    auto fac = ctx.factorize(B.compose(pt.unit, f), pt.local);
    if (!fac) {
      if (why) *why = "unit after f has no unique factorization";
      return std::nullopt;
    }
    m.f.push_back(fac->index);
    m.local.push_back(fac->local_part);
  }
  if (!is_continuous(s2.spec.space, s1.spec.space, m.f)) {
    if (why) *why = "point map is not continuous";
    return std::nullopt;
  }
  auto sh = kan_sharp(ctx, s1, s2.uspace, m.f, m.local, why);
  if (!sh) return std::nullopt;
  m.sharp = *sh;
  if (!check_uspace_morphism(ctx, s1.uspace, s2.uspace, m, why)) return std::nullopt;
  return m;
}

std::optional<Transpose> adjunction_transpose(const DiersContext& ctx, const StructuralSheaf& sb, const USpace& x,
                                              Mor phi, std::string* why) {
  const Category& B = ctx.ambient();
  if (B.dom(phi) != sb.base || B.cod(phi) != global_sections(x))
    throw category_error("adjunction_transpose: phi is not B -> Gamma");
  Transpose t;
  const auto& X = x.space();
  for (int y = 0; y < x.size(); ++y) {
    Mor q = compose_chain(B, {x.stalk_iso[y], x.sheaf.restrict(X.all(), X.minimal_open(y)), phi});
    auto fac = ctx.factorize(q, x.local[y]);
    if (!fac) {
      if (why) *why = "stalk map at " + std::to_string(y) + " has no unique factorization";
      return std::nullopt;
    }
    t.morphism.f.push_back(fac->index);
    t.morphism.local.push_back(fac->local_part);
  }
  // every point over D_n has a neighbourhood still over D_n
  for (PointSet d : sb.spec.basis) {
    PointSet pre = preimage(t.morphism.f, d);
    std::vector<std::pair<int, PointSet>> cover;
    for (int y : members(pre)) {
      cover.emplace_back(y, X.minimal_open(y));
      if ((X.minimal_open(y) & ~pre) != 0) t.continuous = false;
    }
    t.neighbourhoods.push_back(std::move(cover));
  }
  if (!t.continuous) {
    if (why) *why = "preimage of a basic open is not open";
    return std::nullopt;
  }
  auto sh = kan_sharp(ctx, sb, x, t.morphism.f, t.morphism.local, why);
  if (!sh) return std::nullopt;
  t.morphism.sharp = *sh;
  if (!check_uspace_morphism(ctx, sb.uspace, x, t.morphism, why)) return std::nullopt;
  return t;
}

json AdjunctionReport::to_json() const {
  return {{"ok", ok()},
          {"left", left},
          {"right", right},
          {"bijective", bijective},
          {"triangle", triangle},
          {"natural_in_b", natural_in_b},
          {"natural_in_space", natural_in_space},
          {"failure", failure}};
}

const StructuralSheaf& SpecCache::sheaf(Obj b) {
  auto it = sheaves_.find(b);
  if (it == sheaves_.end()) it = sheaves_.emplace(b, structural_sheaf(ctx_, b)).first;
  return it->second;
}

const std::vector<std::optional<USpaceMorphism>>& SpecCache::endos(Obj b) {
  auto it = endos_.find(b);
  if (it != endos_.end()) return it->second;
  const auto& s = sheaf(b);
  std::vector<std::optional<USpaceMorphism>> v;
  for (Mor g : ctx_.ambient().hom(b, b)) v.push_back(spec_functor_morphism(ctx_, g, s, s));
  return endos_.emplace(b, std::move(v)).first->second;
}

AdjunctionReport verify_adjunction(const DiersContext& ctx, Obj b, const USpace& x, size_t cap, SpecCache* cache) {
  const Category& B = ctx.ambient();
  AdjunctionReport r;
  std::optional<SpecCache> local;
  if (!cache) cache = &local.emplace(ctx);
  const StructuralSheaf& sb = cache->sheaf(b);
  auto fail = [&](const std::string& w) {
    if (r.failure.empty()) r.failure = w;
  };
  const auto& left = B.hom(b, global_sections(x));
  auto right = enumerate_uspace_morphisms(ctx, sb.uspace, x, cap);
  r.left = left.size();
  r.right = right.size();

  // transposes into x, by phi
  std::unordered_map<Mor, std::optional<USpaceMorphism>> memo;
  auto transpose_of = [&](Mor phi) -> const std::optional<USpaceMorphism>& {
    auto it = memo.find(phi);
    if (it != memo.end()) return it->second;
    auto t = adjunction_transpose(ctx, sb, x, phi);
    return memo[phi] = t ? std::optional<USpaceMorphism>(t->morphism) : std::nullopt;
  };

  std::vector<USpaceMorphism> tr;
  std::vector<char> hit(right.size(), 0);
  bool bij = left.size() == right.size();
  for (Mor phi : left) {
    std::string why;
    auto t = adjunction_transpose(ctx, sb, x, phi, &why);
    if (!t) {
      fail("transpose of " + B.mor_name(phi) + ": " + why);
      bij = false;
      tr.push_back({});
      continue;
    }
    auto it = std::find(right.begin(), right.end(), t->morphism);
    if (it == right.end() || hit[it - right.begin()]) {
      fail("transpose of " + B.mor_name(phi) + " is missing or repeated");
      bij = false;
    } else {
      hit[it - right.begin()] = 1;
    }
    tr.push_back(t->morphism);
    memo[phi] = t->morphism;
  }
  r.bijective = bij;

  bool tri = true;
  for (size_t i = 0; i < left.size(); ++i)
    if (!tr[i].f.empty() && B.compose(global_sections(sb.uspace, tr[i]), sb.eta) != left[i]) tri = false;
  for (const auto& m : right) {
    Mor phi = B.compose(global_sections(sb.uspace, m), sb.eta);
    const auto& t = transpose_of(phi);
    if (!t || !(*t == m)) tri = false;
  }
  if (sb.eta >= 0) {
    auto t = adjunction_transpose(ctx, sb, sb.uspace, sb.eta);
    if (!t || !(t->morphism == identity_morphism(ctx, sb.uspace))) tri = false;
  } else {
    tri = false;
  }
  if (!tri) fail("triangle identity fails");
  r.triangle = tri;

  const auto& bs = B.hom(b, b);
  for (size_t gi = 0; gi < bs.size(); ++gi) {
    Mor g = bs[gi];
    const auto& sg = cache->endos(b)[gi];
    if (!sg) {
      r.natural_in_b = false;
      fail("Spec of an endomorphism of B is undefined");
      break;
    }
    for (size_t i = 0; i < left.size(); ++i) {
      if (tr[i].f.empty()) continue;
      const auto& t = transpose_of(B.compose(left[i], g));
      if (!t || !(*t == compose(ctx, sb.uspace, sb.uspace, tr[i], *sg))) {
        r.natural_in_b = false;
        fail("transpose is not natural in B");
      }
    }
  }
  if (x.base >= 0) {
    const auto& ks = B.hom(x.base, x.base);
    for (size_t ki = 0; ki < ks.size(); ++ki) {
      const auto& h = cache->endos(x.base)[ki];
      if (!h) {
        r.natural_in_space = false;
        fail("Spec of an endomorphism of the space base is undefined");
        break;
      }
      Mor gh = global_sections(x, *h);
      for (size_t i = 0; i < left.size(); ++i) {
        if (tr[i].f.empty()) continue;
        const auto& t = transpose_of(B.compose(gh, left[i]));
        if (!t || !(*t == compose(ctx, sb.uspace, x, *h, tr[i]))) {
          r.natural_in_space = false;
          fail("transpose is not natural in the U-space");
        }
      }
    }
  }
  return r;
}

}  // namespace diers
