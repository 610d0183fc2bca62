#include "diers/context.hpp"

#include <chrono>
#include <sstream>

namespace diers {

const std::vector<LocalUnit>& DiersContext::local_units(Obj b) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  auto it = units_.find(b);
  if (it != units_.end()) return it->second;
  auto v = compute_units(b);
  return units_.emplace(b, std::move(v)).first->second;
}

const std::vector<Mor>& DiersContext::dum(Obj b) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  auto it = dum_.find(b);
  if (it != dum_.end()) return it->second;
  auto v = compute_dum(b);
  return dum_.emplace(b, std::move(v)).first->second;
}

const DPoset& DiersContext::d_poset(Obj b) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  auto it = dposet_.find(b);
  if (it != dposet_.end()) return it->second;
  const Category& B = ambient();
  const auto& raw = dum(b);
  DPoset p;
  p.base = b;
  for (Mor n : raw) {
    bool placed = false;
    for (size_t i = 0; i < p.elems.size() && !placed; ++i)
      if (leq_factorization(*this, n, p.elems[i]) && leq_factorization(*this, p.elems[i], n)) {
        p.merged[i].push_back(n);
        placed = true;
      }
    if (!placed) {
      p.elems.push_back(n);
      p.merged.push_back({n});
    }
  }
  size_t k = p.elems.size();
  p.witness.assign(k, std::vector<Mor>(k, -1));
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) {
      if (i == j) {
        p.witness[i][j] = B.id(B.cod(p.elems[i]));
        continue;
      }
      if (auto m = leq_factorization(*this, p.elems[i], p.elems[j])) p.witness[i][j] = *m;
    }
  for (size_t i = 0; i < k; ++i) {
    bool bot = true;
    for (size_t j = 0; j < k && bot; ++j) bot = p.leq(static_cast<int>(i), static_cast<int>(j));
    if (bot) {
      p.bottom = static_cast<int>(i);
      break;
    }
  }
  return dposet_.emplace(b, std::move(p)).first->second;
}

std::vector<Factorization> DiersContext::factorizations(Mor f, Obj a) const {
  const Category& B = ambient();
  const Category& A = local();
  if (B.cod(f) != U_obj(a)) throw category_error("factorize: codomain is not U(A)");
  std::vector<Factorization> out;
  const auto& us = local_units(B.dom(f));
  for (size_t i = 0; i < us.size(); ++i)
    for (Mor l : A.hom(us[i].local, a))
      if (B.compose(U_mor(l), us[i].unit) == f) out.push_back({static_cast<int>(i), us[i], l});
  return out;
}

std::optional<Factorization> DiersContext::factorize(Mor f, Obj a) const {
  auto v = factorizations(f, a);
  if (v.size() != 1) return std::nullopt;
  return v[0];
}

DUReport diagonal_universality(const DiersContext& ctx, Mor n) {
  const Category& B = ctx.ambient();
  const Category& A = ctx.local();
  DUReport r;
  Obj src = B.dom(n), tgt = B.cod(n);
  auto locals = ctx.local_objects();
  for (Obj a1 : locals) {
    Obj ua1 = ctx.U_obj(a1);
    const auto& tops = B.hom(src, ua1);
    const auto& ds = B.hom(tgt, ua1);
    for (Mor f : tops) {
      std::vector<Mor> cand;
      for (Mor d : ds)
        if (B.compose(d, n) == f) cand.push_back(d);
      for (Obj a2 : locals)
        for (Mor u : A.hom(a1, a2)) {
          Mor Uu = ctx.U_mor(u);
          Mor uf = B.compose(Uu, f);
          for (Mor g : B.hom(tgt, ctx.U_obj(a2))) {
            if (B.compose(g, n) != uf) continue;
            ++r.squares;
            int cnt = 0;
            for (Mor d : cand)
              if (B.compose(Uu, d) == g) ++cnt;
            if (cnt != 1) {
              r.ok = false;
              r.u = u;
              r.f = f;
              r.g = g;
              r.fillers = cnt;
              return r;
            }
          }
        }
    }
  }
  return r;
}

std::optional<Mor> leq_factorization(const DiersContext& ctx, Mor n1, Mor n2) {
  const Category& B = ctx.ambient();
  if (B.dom(n1) != B.dom(n2)) throw category_error("leq: maps under different objects");
  auto ks = B.extensions(n1, n2);
  if (ks.empty()) return std::nullopt;
  return ks.front();
}

std::optional<Mor> join(const DiersContext& ctx, Mor n1, Mor n2) {
  const Category& B = ctx.ambient();
  auto po = B.pushout(n1, n2);
  if (!po) return std::nullopt;
  return B.compose(po->legs[0], n1);
}

int dposet_index(const DiersContext& ctx, Obj b, Mor n) {
  const auto& p = ctx.d_poset(b);
  for (size_t i = 0; i < p.size(); ++i)
    for (Mor m : p.merged[i])
      if (m == n) return static_cast<int>(i);
  for (size_t i = 0; i < p.size(); ++i)
    if (leq_factorization(ctx, n, p.elems[i]) && leq_factorization(ctx, p.elems[i], n))
      return static_cast<int>(i);
  return -1;
}

std::vector<int> unit_filter(const DiersContext& ctx, Obj b, int ui) {
  const auto& p = ctx.d_poset(b);
  Mor x = ctx.local_units(b).at(ui).unit;
  std::vector<int> out;
  for (size_t i = 0; i < p.size(); ++i)
    if (leq_factorization(ctx, p.elems[i], x)) out.push_back(static_cast<int>(i));
  return out;
}

int unit_index(const DiersContext& ctx, Obj b, Mor x) {
  const auto& us = ctx.local_units(b);
  for (size_t i = 0; i < us.size(); ++i)
    if (us[i].unit == x) return static_cast<int>(i);
  return -1;
}

namespace {

std::string describe(const Category& c, Mor m) { return c.mor_name(m) + " (#" + std::to_string(m) + ")"; }

}  // namespace

ObjectVerdict validate_object(const DiersContext& ctx, Obj b) {
  auto t0 = std::chrono::steady_clock::now();
  const Category& B = ctx.ambient();
  ObjectVerdict v;
  v.object = b;
  // (i) multi-reflection
  for (Obj a : ctx.local_objects()) {
    for (Mor f : B.hom(b, ctx.U_obj(a))) {
      auto fs = ctx.factorizations(f, a);
      if (fs.size() != 1) {
        v.multi_reflection = false;
        v.mr_detail = describe(B, f) + " has " + std::to_string(fs.size()) + " factorizations through units";
        v.witnesses.push_back(f);
        break;
      }
    }
    if (!v.multi_reflection) break;
  }
  // (ii) diagonal universality of the enumerated D_B
  for (Mor n : ctx.dum(b)) {
    auto r = diagonal_universality(ctx, n);
    if (!r.ok) {
      v.diagonal = false;
      v.du_detail = describe(B, n) + " has a square with " + std::to_string(r.fillers) + " fillers";
      v.witnesses.push_back(n);
      break;
    }
  }
  // (iii) U(A_x) is the colimit of cod over V_x via the canonical cocone
  const auto& p = ctx.d_poset(b);
  const auto& us = ctx.local_units(b);
  for (size_t ui = 0; ui < us.size(); ++ui) {
    auto vx = unit_filter(ctx, b, static_cast<int>(ui));
    Diagram d;
    Cocone canon{B.cod(us[ui].unit), {}};
    for (int i : vx) {
      d.add_node(B.cod(p.elems[i]));
      canon.legs.push_back(*leq_factorization(ctx, p.elems[i], us[ui].unit));
    }
    for (size_t i = 0; i < vx.size(); ++i)
      for (size_t j = 0; j < vx.size(); ++j)
        if (i != j && p.leq(vx[i], vx[j]))
          d.add_edge(static_cast<int>(i), static_cast<int>(j), p.witness[vx[i]][vx[j]]);
    std::string why;
    if (vx.empty()) {
      why = "V_x is empty";
    } else if (!is_cocone(B, d, canon)) {
      why = "canonical legs do not commute";
    } else {
      auto cc = B.colimit(d);
      if (!cc) {
        why = "colimit over V_x absent";
      } else {
        auto m = B.mediate_colimit(d, *cc, canon);
        if (!m || !is_iso(B, *m)) why = "comparison map is not an isomorphism";
      }
    }
    if (!why.empty()) {
      v.diers = false;
      v.diers_detail = "unit " + describe(B, us[ui].unit) + ": " + why;
      v.witnesses.push_back(us[ui].unit);
      break;
    }
  }
  v.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return v;
}

ValidationReport validate_context(const DiersContext& ctx, const std::vector<Obj>& objs) {
  ValidationReport r;
  r.context = ctx.name();
  for (Obj b : objs) r.objects.push_back(validate_object(ctx, b));
  return r;
}

ValidationReport validate_context(const DiersContext& ctx) {
  return validate_context(ctx, ctx.sample_objects());
}

bool ValidationReport::ok() const {
  for (const auto& o : objects)
    if (!o.ok()) return false;
  return true;
}

json ValidationReport::to_json(const DiersContext& ctx) const {
  json j;
  j["context"] = context;
  j["ok"] = ok();
  j["objects"] = json::array();
  for (const auto& o : objects) {
    json e;
    e["object"] = ctx.ambient().obj_name(o.object);
    e["ok"] = o.ok();
    e["multi_reflection"] = {{"ok", o.multi_reflection}, {"detail", o.mr_detail}};
    e["diagonally_universal"] = {{"ok", o.diagonal}, {"detail", o.du_detail}};
    e["diers_condition"] = {{"ok", o.diers}, {"detail", o.diers_detail}};
    e["witnesses"] = o.witnesses;
    e["millis"] = o.millis;
    j["objects"].push_back(e);
  }
  return j;
}

bool U_faithful(const DiersContext& ctx) {
  const Category& A = ctx.local();
  auto objs = ctx.local_objects();
  for (Obj x : objs)
    for (Obj y : objs) {
      const auto& h = A.hom(x, y);
      for (size_t i = 0; i < h.size(); ++i)
        for (size_t j = i + 1; j < h.size(); ++j)
          if (ctx.U_mor(h[i]) == ctx.U_mor(h[j])) return false;
    }
  return true;
}

bool U_full(const DiersContext& ctx) {
  const Category& A = ctx.local();
  const Category& B = ctx.ambient();
  auto objs = ctx.local_objects();
  for (Obj x : objs)
    for (Obj y : objs)
      for (Mor g : B.hom(ctx.U_obj(x), ctx.U_obj(y))) {
        bool hit = false;
        for (Mor m : A.hom(x, y)) hit = hit || ctx.U_mor(m) == g;
        if (!hit) return false;
      }
  return true;
}

bool U_conservative(const DiersContext& ctx) {
  const Category& A = ctx.local();
  const Category& B = ctx.ambient();
  auto objs = ctx.local_objects();
  for (Obj x : objs)
    for (Obj y : objs)
      for (Mor m : A.hom(x, y))
        if (is_iso(B, ctx.U_mor(m)) && !is_iso(A, m)) return false;
  return true;
}

}  // namespace diers
