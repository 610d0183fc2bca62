#include "diers/core.hpp"

#include <functional>

namespace diers {

std::optional<Cocone> Category::pushout(Mor f, Mor g) const {
  Diagram d = span(*this, f, g);
  auto cc = colimit(d);
  if (!cc) return std::nullopt;
  return Cocone{cc->apex, {cc->legs[1], cc->legs[2]}};
}

std::optional<Mor> Category::mediate_colimit(const Diagram& d, const Cocone& colim,
                                             const Cocone& other) const {
  return bruteforce_mediate_colimit(*this, d, colim, other);
}

std::optional<Mor> Category::mediate_limit(const Diagram& d, const Cone& lim,
                                           const Cone& other) const {
  return bruteforce_mediate_limit(*this, d, lim, other);
}

std::optional<Obj> Category::terminal() const {
  auto l = limit(Diagram{});
  if (!l) return std::nullopt;
  return l->apex;
}

json Category::mor_json(Mor m) const {
  return json{{"id", m}, {"name", mor_name(m)}, {"dom", obj_name(dom(m))}, {"cod", obj_name(cod(m))}};
}

json Category::obj_json(Obj o) const { return json{{"id", o}, {"name", obj_name(o)}}; }

Mor compose_chain(const Category& c, std::initializer_list<Mor> ms) {
  if (ms.size() == 0) throw category_error("empty composite");
  auto it = std::rbegin(ms);
  Mor acc = *it;
  for (++it; it != std::rend(ms); ++it) acc = c.compose(*it, acc);
  return acc;
}

bool is_identity(const Category& c, Mor m) { return c.dom(m) == c.cod(m) && c.id(c.dom(m)) == m; }

std::optional<Mor> Category::invert(Mor m) const {
  Obj x = dom(m), y = cod(m);
  for (Mor k : hom(y, x))
    if (compose(k, m) == id(x) && compose(m, k) == id(y)) return k;
  return std::nullopt;
}

std::optional<Mor> inverse(const Category& c, Mor m) { return c.invert(m); }

std::vector<Mor> Category::extensions(Mor n, Mor f) const {
  std::vector<Mor> out;
  if (dom(n) != dom(f)) return out;
  for (Mor k : hom(cod(n), cod(f)))
    if (compose(k, n) == f) out.push_back(k);
  return out;
}

std::optional<Mor> Category::iso_between(Obj x, Obj y) const {
  for (Mor m : hom(x, y))
    if (invert(m)) return m;
  return std::nullopt;
}

std::optional<Mor> find_iso(const Category& c, Obj x, Obj y) { return c.iso_between(x, y); }

bool is_cocone(const Category& c, const Diagram& d, const Cocone& cc) {
  if (cc.legs.size() != d.nodes.size()) return false;
  for (size_t i = 0; i < d.nodes.size(); ++i)
    if (c.dom(cc.legs[i]) != d.nodes[i] || c.cod(cc.legs[i]) != cc.apex) return false;
  for (const auto& e : d.edges)
    if (c.compose(cc.legs[e.dst], e.mor) != cc.legs[e.src]) return false;
  return true;
}

bool is_cone(const Category& c, const Diagram& d, const Cone& cn) {
  if (cn.legs.size() != d.nodes.size()) return false;
  for (size_t i = 0; i < d.nodes.size(); ++i)
    if (c.cod(cn.legs[i]) != d.nodes[i] || c.dom(cn.legs[i]) != cn.apex) return false;
  for (const auto& e : d.edges)
    if (c.compose(e.mor, cn.legs[e.src]) != cn.legs[e.dst]) return false;
  return true;
}

namespace {

// Depth-first leg assignment; `out` is true for cocones.
template <class F>
void enumerate_legs(const Category& c, const Diagram& d, Obj apex, bool out, F&& emit) {
  size_t k = d.nodes.size();
  std::vector<Mor> legs(k, -1);
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == k) {
      emit(legs);
      return;
    }
    const auto& cands = out ? c.hom(d.nodes[i], apex) : c.hom(apex, d.nodes[i]);
    for (Mor m : cands) {
      legs[i] = m;
      bool ok = true;
      for (const auto& e : d.edges) {
        size_t hi = std::max(e.src, e.dst);
        if (hi != i) continue;
        if (legs[e.src] < 0 || legs[e.dst] < 0) continue;
        if (out && c.compose(legs[e.dst], e.mor) != legs[e.src]) ok = false;
        if (!out && c.compose(e.mor, legs[e.src]) != legs[e.dst]) ok = false;
        if (!ok) break;
      }
      if (ok) rec(i + 1);
    }
    legs[i] = -1;
  };
  rec(0);
}

}  // namespace

std::vector<Cocone> cocones_into(const Category& c, const Diagram& d, Obj apex) {
  std::vector<Cocone> out;
  enumerate_legs(c, d, apex, true, [&](const std::vector<Mor>& l) { out.push_back({apex, l}); });
  return out;
}

std::vector<Cone> cones_from(const Category& c, const Diagram& d, Obj apex) {
  std::vector<Cone> out;
  enumerate_legs(c, d, apex, false, [&](const std::vector<Mor>& l) { out.push_back({apex, l}); });
  return out;
}

std::optional<Mor> bruteforce_mediate_colimit(const Category& c, const Diagram& d,
                                              const Cocone& colim, const Cocone& other) {
  std::optional<Mor> found;
  for (Mor m : c.hom(colim.apex, other.apex)) {
    bool ok = true;
    for (size_t i = 0; i < d.nodes.size() && ok; ++i)
      ok = c.compose(m, colim.legs[i]) == other.legs[i];
    if (!ok) continue;
    if (found) return std::nullopt;
    found = m;
  }
  return found;
}

std::optional<Mor> bruteforce_mediate_limit(const Category& c, const Diagram& d, const Cone& lim,
                                            const Cone& other) {
  std::optional<Mor> found;
  for (Mor m : c.hom(other.apex, lim.apex)) {
    bool ok = true;
    for (size_t i = 0; i < d.nodes.size() && ok; ++i)
      ok = c.compose(lim.legs[i], m) == other.legs[i];
    if (!ok) continue;
    if (found) return std::nullopt;
    found = m;
  }
  return found;
}

bool verify_colimit(const Category& c, const Diagram& d, const Cocone& colim,
                    const std::vector<Obj>& apexes) {
  if (!is_cocone(c, d, colim)) return false;
  for (Obj z : apexes)
    for (const auto& cc : cocones_into(c, d, z))
      if (!bruteforce_mediate_colimit(c, d, colim, cc)) return false;
  return true;
}

bool verify_limit(const Category& c, const Diagram& d, const Cone& lim,
                  const std::vector<Obj>& apexes) {
  if (!is_cone(c, d, lim)) return false;
  for (Obj z : apexes)
    for (const auto& cn : cones_from(c, d, z))
      if (!bruteforce_mediate_limit(c, d, lim, cn)) return false;
  return true;
}

std::optional<Cocone> bruteforce_colimit(const Category& c, const Diagram& d) {
  auto objs = c.objects();
  for (Obj z : objs)
    for (const auto& cc : cocones_into(c, d, z))
      if (verify_colimit(c, d, cc, objs)) return cc;
  return std::nullopt;
}

std::optional<Cone> bruteforce_limit(const Category& c, const Diagram& d) {
  auto objs = c.objects();
  for (Obj z : objs)
    for (const auto& cn : cones_from(c, d, z))
      if (verify_limit(c, d, cn, objs)) return cn;
  return std::nullopt;
}

Diagram span(const Category& c, Mor f, Mor g) {
  if (c.dom(f) != c.dom(g)) throw category_error("span legs with different domains");
  Diagram d;
  int b = d.add_node(c.dom(f));
  int x = d.add_node(c.cod(f));
  int y = d.add_node(c.cod(g));
  d.add_edge(b, x, f);
  d.add_edge(b, y, g);
  return d;
}

LawReport check_category_laws(const Category& c) {
  LawReport r;
  auto objs = c.objects();
  for (Obj x : objs) {
    Mor ix = c.id(x);
    if (c.dom(ix) != x || c.cod(ix) != x) {
      r.ok = false;
      r.failure = "identity of " + c.obj_name(x) + " has wrong ends";
      return r;
    }
  }
  for (Obj x : objs)
    for (Obj y : objs)
      for (Mor f : c.hom(x, y)) {
        if (c.compose(f, c.id(x)) != f || c.compose(c.id(y), f) != f) {
          r.ok = false;
          r.failure = "unit law fails at " + c.mor_name(f);
          return r;
        }
        for (Obj z : objs)
          for (Mor g : c.hom(y, z)) {
            Mor gf = c.compose(g, f);
            if (c.dom(gf) != x || c.cod(gf) != z) {
              r.ok = false;
              r.failure = "composite " + c.mor_name(g) + "." + c.mor_name(f) + " has wrong ends";
              return r;
            }
            for (Obj w : objs)
              for (Mor h : c.hom(z, w)) {
                ++r.checked;
                if (c.compose(h, gf) != c.compose(c.compose(h, g), f)) {
                  r.ok = false;
                  r.failure = "associativity fails at " + c.mor_name(h) + "," + c.mor_name(g) +
                              "," + c.mor_name(f);
                  return r;
                }
              }
          }
      }
  return r;
}

}  // namespace diers
