#include "diers/spectrum.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

namespace diers {

std::vector<int> members(PointSet s) {
  std::vector<int> v;
  for (int x = 0; s; ++x, s >>= 1)
    if (s & 1) v.push_back(x);
  return v;
}

FinTopSpace FinTopSpace::generated(int n, const std::vector<PointSet>& subbasis) {
  if (n > kMaxPoints) throw category_error("spaces are limited to 64 points");
  FinTopSpace t;
  t.n_ = n;
  PointSet X = full_set(n);
  t.minimal_.assign(n, X);
  for (PointSet b : subbasis)
    for (int x = 0; x < n; ++x)
      if (has(b, x)) t.minimal_[x] &= b;
  std::set<PointSet> seen{0};
  std::vector<PointSet> todo{0};
  while (!todo.empty()) {
    PointSet o = todo.back();
    todo.pop_back();
    for (int x = 0; x < n; ++x) {
      PointSet u = o | t.minimal_[x];
      if (seen.insert(u).second) todo.push_back(u);
    }
  }
  t.opens_.assign(seen.begin(), seen.end());
  std::sort(t.opens_.begin(), t.opens_.end(), [](PointSet a, PointSet b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  for (size_t i = 0; i < t.opens_.size(); ++i) t.index_[t.opens_[i]] = static_cast<int>(i);
  return t;
}

FinTopSpace FinTopSpace::discrete(int n) {
  std::vector<PointSet> b;
  for (int x = 0; x < n; ++x) b.push_back(bit(x));
  return generated(n, b);
}

int FinTopSpace::open_index(PointSet s) const {
  auto it = index_.find(s);
  if (it == index_.end()) throw category_error("not an open set");
  return it->second;
}

bool FinTopSpace::t0() const {
  for (int x = 0; x < n_; ++x)
    for (int y = x + 1; y < n_; ++y)
      if (specializes(x, y) && specializes(y, x)) return false;
  return true;
}

bool FinTopSpace::t1() const {
  for (int x = 0; x < n_; ++x)
    if (minimal_[x] != bit(x)) return false;
  return true;
}

bool FinTopSpace::is_discrete() const { return t1(); }

json FinTopSpace::to_json() const {
  json j;
  j["points"] = n_;
  j["opens"] = json::array();
  for (PointSet o : opens_) j["opens"].push_back(members(o));
  j["minimal_opens"] = json::array();
  for (PointSet o : minimal_) j["minimal_opens"].push_back(members(o));
  return j;
}

PointSet preimage(const PointMap& f, PointSet s) {
  PointSet r = 0;
  for (size_t x = 0; x < f.size(); ++x)
    if (has(s, f[x])) r |= bit(static_cast<int>(x));
  return r;
}

PointSet image(const PointMap& f, PointSet s) {
  PointSet r = 0;
  for (int x : members(s)) r |= bit(f[x]);
  return r;
}

bool is_continuous(const FinTopSpace& from, const FinTopSpace& to, const PointMap& f) {
  if (static_cast<int>(f.size()) != from.size()) return false;
  for (PointSet o : to.opens())
    if (!from.is_open(preimage(f, o))) return false;
  return true;
}

PointSet basic_open(const DiersContext& ctx, Obj b, Mor n) {
  const auto& us = ctx.local_units(b);
  PointSet s = 0;
  for (size_t i = 0; i < us.size(); ++i)
    if (leq_factorization(ctx, n, us[i].unit)) s |= bit(static_cast<int>(i));
  return s;
}

PointSet focal_component(const DiersContext& ctx, Obj b, int x) {
  const auto& p = ctx.d_poset(b);
  PointSet s = full_set(static_cast<int>(ctx.local_units(b).size()));
  for (int i : unit_filter(ctx, b, x)) s &= basic_open(ctx, b, p.elems[i]);
  return s;
}

Spectrum spec_space(const DiersContext& ctx, Obj b) {
  Spectrum s;
  s.base = b;
  s.points = ctx.local_units(b);
  int n = static_cast<int>(s.points.size());
  if (n > kMaxPoints) throw category_error("spectrum has more than 64 points");
  const auto& p = ctx.d_poset(b);
  for (Mor e : p.elems) s.basis.push_back(basic_open(ctx, b, e));
  s.space = FinTopSpace::generated(n, s.basis);
  s.order.assign(n, std::vector<char>(n, 0));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      s.order[x][y] = leq_factorization(ctx, s.points[x].unit, s.points[y].unit).has_value();
      if (static_cast<bool>(s.order[x][y]) != s.space.specializes(x, y)) s.specialization_matches = false;
    }
  return s;
}

json Spectrum::to_json(const DiersContext& ctx) const {
  const Category& B = ctx.ambient();
  json j;
  j["object"] = B.obj_name(base);
  j["points"] = json::array();
  for (size_t i = 0; i < points.size(); ++i)
    j["points"].push_back({{"index", i},
                           {"unit", B.mor_name(points[i].unit)},
                           {"local", ctx.local().obj_name(points[i].local)}});
  const auto& p = ctx.d_poset(base);
  j["basis"] = json::array();
  for (size_t i = 0; i < basis.size(); ++i)
    j["basis"].push_back({{"n", B.mor_name(p.elems[i])}, {"open", members(basis[i])}});
  j["space"] = space.to_json();
  j["specialization"] = json::array();
  for (int x = 0; x < space.size(); ++x)
    for (int y = 0; y < space.size(); ++y)
      if (x != y && space.specializes(x, y)) j["specialization"].push_back({x, y});
  j["specialization_matches_order"] = specialization_matches;
  return j;
}

std::string Spectrum::to_dot(const DiersContext& ctx) const {
  const Category& B = ctx.ambient();
  std::ostringstream s;
  s << "digraph spec {\n  rankdir=BT;\n";
  for (size_t i = 0; i < points.size(); ++i)
    s << "  p" << i << " [label=\"" << ctx.local().obj_name(points[i].local) << " #" << i << "\"];\n";
  // Hasse diagram of the specialization order
  int n = space.size();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (x == y || !space.specializes(x, y)) continue;
      bool cover = true;
      for (int z = 0; z < n && cover; ++z)
        if (z != x && z != y && space.specializes(x, z) && space.specializes(z, y)) cover = false;
      if (cover) s << "  p" << x << " -> p" << y << ";\n";
    }
  s << "  subgraph cluster_basis {\n    label=\"basis\";\n";
  const auto& p = ctx.d_poset(base);
  for (size_t i = 0; i < basis.size(); ++i) {
    s << "    d" << i << " [shape=box,label=\"" << B.mor_name(p.elems[i]) << " {";
    auto m = members(basis[i]);
    for (size_t k = 0; k < m.size(); ++k) s << (k ? "," : "") << m[k];
    s << "}\"];\n";
  }
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = 0; j < basis.size(); ++j) {
      if (i == j || (basis[i] & ~basis[j]) != 0 || basis[i] == basis[j]) continue;
      bool cover = true;
      for (size_t k = 0; k < basis.size() && cover; ++k)
        if (basis[k] != basis[i] && basis[k] != basis[j] && (basis[i] & ~basis[k]) == 0 &&
            (basis[k] & ~basis[j]) == 0)
          cover = false;
      if (cover) s << "    d" << i << " -> d" << j << ";\n";
    }
  s << "  }\n}\n";
  return s.str();
}

SpecMap spec_map(const DiersContext& ctx, Mor f) {
  const Category& B = ctx.ambient();
  Obj b1 = B.dom(f), b2 = B.cod(f);
  SpecMap r;
  r.f = f;
  const auto& u2 = ctx.local_units(b2);
  for (const auto& y : u2) {
    auto fac = ctx.factorize(B.compose(y.unit, f), y.local);
    if (!fac) throw category_error("spec_map: " + B.mor_name(B.compose(y.unit, f)) + " does not factor uniquely");
    r.points.push_back(fac->index);
  }
  const auto& p1 = ctx.d_poset(b1);
  for (Mor n : p1.elems) {
    auto po = B.pushout(n, f);
    if (!po) {
      r.pushed.push_back(-1);
      r.basis_ok = false;
      r.failure = "no pushout of " + B.mor_name(n) + " along " + B.mor_name(f);
      continue;
    }
    Mor fn = po->legs[1];
    r.pushed.push_back(fn);
    if (preimage(r.points, basic_open(ctx, b1, n)) != basic_open(ctx, b2, fn)) {
      r.basis_ok = false;
      r.failure = "preimage of D_" + B.mor_name(n) + " differs from D_" + B.mor_name(fn);
    }
  }
  Spectrum s1 = spec_space(ctx, b1), s2 = spec_space(ctx, b2);
  r.continuous = is_continuous(s2.space, s1.space, r.points);
  if (!r.continuous && r.failure.empty()) r.failure = "point map is not continuous";
  return r;
}

json SeparationReport::to_json() const {
  return json{{"observed", {{"T0", observed_t0}, {"T1", observed_t1}, {"discrete", observed_discrete}}},
              {"functor", {{"conservative", conservative}, {"full", full}, {"faithful", faithful}}},
              {"predicted", {{"T0", predicted_t0()}, {"T1", predicted_t1()}}},
              {"agree", agree()},
              {"witness", witness}};
}

SeparationReport classify_separation(const DiersContext& ctx, const std::vector<Obj>& objs) {
  SeparationReport r;
  for (Obj b : objs) {
    Spectrum s = spec_space(ctx, b);
    bool t0 = s.space.t0(), t1 = s.space.t1();
    if ((!t0 && r.observed_t0) || (!t1 && r.observed_t1)) r.witness = ctx.ambient().obj_name(b);
    r.observed_t0 = r.observed_t0 && t0;
    r.observed_t1 = r.observed_t1 && t1;
    r.observed_discrete = r.observed_discrete && s.space.is_discrete();
  }
  r.conservative = U_conservative(ctx);
  r.full = U_full(ctx);
  r.faithful = U_faithful(ctx);
  return r;
}

SeparationReport classify_separation(const DiersContext& ctx) {
  return classify_separation(ctx, ctx.sample_objects());
}

json BasisLawReport::to_json(const DiersContext& ctx) const {
  json j{{"object", ctx.ambient().obj_name(object)}, {"ok", ok()},         {"checked", checked},
         {"failures", failures},                     {"order_reflecting", order_reflecting}};
  if (!failure.empty()) j["failure"] = failure;
  return j;
}

BasisLawReport check_basis_laws(const DiersContext& ctx, Obj b) {
  const Category& B = ctx.ambient();
  BasisLawReport r;
  r.object = b;
  auto bad = [&](const std::string& w) {
    ++r.failures;
    if (r.failure.empty()) r.failure = w;
  };
  const auto& p = ctx.d_poset(b);
  Spectrum s = spec_space(ctx, b);
  ++r.checked;
  if (basic_open(ctx, b, B.id(b)) != s.space.all()) bad("D(id) is not the whole space");
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t k = 0; k < p.size(); ++k) {
      r.checked += 3;
      const std::string ns = B.mor_name(p.elems[i]) + ", " + B.mor_name(p.elems[k]);
      auto jn = join(ctx, p.elems[i], p.elems[k]);
      if (!jn || basic_open(ctx, b, *jn) != (s.basis[i] & s.basis[k])) bad("D(n1) & D(n2) != D(n1 v n2) at " + ns);
      bool le = p.leq(static_cast<int>(i), static_cast<int>(k));
      bool sub = (s.basis[k] & ~s.basis[i]) == 0;
      if (le && !sub) bad("n1 <= n2 but D(n2) is not inside D(n1) at " + ns);
      if (sub && !le) r.order_reflecting = false;
    }
  const auto& us = ctx.local_units(b);
  for (size_t x = 0; x < us.size(); ++x)
    for (size_t y = 0; y < us.size(); ++y) {
      if (!s.order[x][y]) continue;
      ++r.checked;
      auto fx = unit_filter(ctx, b, static_cast<int>(x)), fy = unit_filter(ctx, b, static_cast<int>(y));
      for (int k : fx)
        if (std::find(fy.begin(), fy.end(), k) == fy.end()) {
          bad("point order not monotone on filters at " + std::to_string(x) + " <= " + std::to_string(y));
          break;
        }
    }
  ++r.checked;
  if (!s.specialization_matches) bad("specialization differs from the factorization order");
  return r;
}

}  // namespace diers
