#include "diers/instances.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>

namespace diers {

namespace {

bool prime(int n) {
  if (n < 2) return false;
  for (int p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

std::vector<int> prime_powers(int max) {
  std::vector<int> out;
  for (int p = 2; p <= max; ++p) {
    if (!prime(p)) continue;
    for (int q = p; q <= max; q *= p) out.push_back(q);
  }
  return out;
}

std::vector<int> digits(int x, const std::vector<int>& radix) {
  std::vector<int> d(radix.size());
  for (int i = static_cast<int>(radix.size()) - 1; i >= 0; --i) {
    d[i] = x % radix[i];
    x /= radix[i];
  }
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------

ZariskiContext::ZariskiContext(int max_order) : rings_(Theory::Ring) {
  std::vector<Obj> locals;
  for (int q : prime_powers(max_order)) locals.push_back(rings_.parse("Z/" + std::to_string(q)));
  const AlgCategory& R = rings_;
  local_ = std::make_unique<SubCategory>(rings_, "local rings", locals, [&R](Mor m) {
    const Algebra& a = R.alg(R.dom(m));
    const Algebra& b = R.alg(R.cod(m));
    const auto& f = R.map(m);
    for (int x = 0; x < a.n; ++x)
      if (!is_unit(a, x) && is_unit(b, f[x])) return false;
    return true;
  });
  // cyclic rings first, then the remaining products of prime-power cyclic rings
  samples_.push_back(rings_.parse("0"));
  for (int n = 2; n <= max_order; ++n) samples_.push_back(rings_.parse("Z/" + std::to_string(n)));
  auto pp = prime_powers(max_order);
  std::vector<int> chosen;
  std::function<void(size_t, int)> rec = [&](size_t start, int order) {
    if (chosen.size() >= 2) {
      std::vector<Algebra> fs;
      for (int q : chosen) fs.push_back(ring_cyclic(q));
      Obj o = rings_.intern_normal(ring_product(fs)).first;
      if (std::find(samples_.begin(), samples_.end(), o) == samples_.end()) samples_.push_back(o);
    }
    for (size_t i = start; i < pp.size(); ++i) {
      if (order * pp[i] > max_order) continue;
      chosen.push_back(pp[i]);
      rec(i, order * pp[i]);
      chosen.pop_back();
    }
  };
  rec(0, 1);
}

const ZariskiContext::Split& ZariskiContext::split(Obj b) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  auto it = splits_.find(b);
  if (it != splits_.end()) return it->second;
  NormalForm nf = normalize(rings_.alg(b));
  Split s;
  s.iso = rings_.normal_iso(b);
  for (size_t i = 0; i < nf.factors.size(); ++i) {
    Obj f = rings_.intern(nf.factors[i], nf.factor_names[i]);
    local_->add_object(f);
    s.factors.push_back(f);
  }
  return splits_.emplace(b, std::move(s)).first->second;
}

Mor ZariskiContext::project(Obj b, const std::vector<int>& keep) const {
  const Split& s = split(b);
  if (keep.size() == s.factors.size()) return rings_.id(b);
  std::vector<int> radix;
  for (Obj f : s.factors) radix.push_back(rings_.alg(f).n);
  std::vector<const Algebra*> kept;
  for (int i : keep) kept.push_back(&rings_.alg(s.factors[i]));
  auto [tgt, iso] = rings_.intern_normal(algebra_product(Theory::Ring, kept));
  const auto& n = rings_.map(s.iso);
  ElementMap m(n.size());
  for (size_t x = 0; x < n.size(); ++x) {
    auto d = digits(n[x], radix);
    int y = 0;
    for (int i : keep) y = y * radix[i] + d[i];
    m[x] = iso[y];
  }
  return rings_.intern_mor(b, tgt, m);
}

std::vector<LocalUnit> ZariskiContext::compute_units(Obj b) const {
  const Split& s = split(b);
  std::vector<LocalUnit> out;
  for (size_t i = 0; i < s.factors.size(); ++i) {
    Mor u = s.factors.size() == 1 ? rings_.intern_mor(b, s.factors[0], rings_.map(s.iso))
                                  : project(b, {static_cast<int>(i)});
    out.push_back({u, s.factors[i]});
  }
  return out;
}

Mor ZariskiContext::localization(Obj b, int el) const {
  const Split& s = split(b);
  std::vector<int> radix;
  for (Obj f : s.factors) radix.push_back(rings_.alg(f).n);
  auto d = digits(rings_.map(s.iso)[el], radix);
  std::vector<int> keep;
  for (size_t i = 0; i < s.factors.size(); ++i)
    if (is_unit(rings_.alg(s.factors[i]), d[i])) keep.push_back(static_cast<int>(i));
  if (keep.size() == s.factors.size()) return rings_.id(b);
  return project(b, keep);
}

std::vector<Mor> ZariskiContext::compute_dum(Obj b) const {
  std::vector<Mor> out;
  for (int s = 0; s < rings_.alg(b).n; ++s) {
    Mor m = localization(b, s);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  Mor i = rings_.id(b);
  out.erase(std::find(out.begin(), out.end(), i));
  out.insert(out.begin(), i);
  return out;
}

// ---------------------------------------------------------------------------

BooleanContext::BooleanContext(int max_atoms) : bools_(Theory::Boolean) {
  two_ = bools_.parse("2");
  local_ = std::make_unique<SubCategory>(bools_, "2", std::vector<Obj>{two_}, nullptr);
  for (int k = 0; k <= max_atoms; ++k)
    samples_.push_back(bools_.parse(k == 0 ? "1" : k == 1 ? "2" : "2^" + std::to_string(k)));
}

Mor BooleanContext::principal_quotient(Obj b, int a) const {
  Mor iso = bools_.normal_iso(b);
  const auto& n = bools_.map(iso);
  int k = 0;
  while ((1 << k) < bools_.alg(bools_.cod(iso)).n) ++k;
  int mask = n[a];
  if (mask == (1 << k) - 1) return bools_.id(b);
  std::vector<int> bits;
  for (int i = 0; i < k; ++i)
    if (mask >> i & 1) bits.push_back(i);
  Obj tgt = bools_.intern_normal(boolean_power(static_cast<int>(bits.size()))).first;
  ElementMap m(n.size());
  for (size_t x = 0; x < n.size(); ++x) {
    int y = 0;
    for (size_t j = 0; j < bits.size(); ++j) y |= ((n[x] >> bits[j]) & 1) << j;
    m[x] = y;
  }
  return bools_.intern_mor(b, tgt, m);
}

std::vector<LocalUnit> BooleanContext::compute_units(Obj b) const {
  Mor iso = bools_.normal_iso(b);
  const auto& n = bools_.map(iso);
  int k = 0;
  while ((1 << k) < bools_.alg(bools_.cod(iso)).n) ++k;
  std::vector<LocalUnit> out;
  for (int i = 0; i < k; ++i) {
    ElementMap m(n.size());
    for (size_t x = 0; x < n.size(); ++x) m[x] = (n[x] >> i) & 1;
    out.push_back({bools_.intern_mor(b, two_, m), two_});
  }
  return out;
}

std::vector<Mor> BooleanContext::compute_dum(Obj b) const {
  std::vector<Mor> out{bools_.id(b)};
  for (int a = 0; a < bools_.alg(b).n; ++a) {
    Mor m = principal_quotient(b, a);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<LocalUnit> derive_units(const DiersContext& ctx, Obj b) {
  const Category& B = ctx.ambient();
  const Category& A = ctx.local();
  struct Node {
    Obj a;
    Mor f;
  };
  std::vector<Node> nodes;
  for (Obj a : ctx.local_objects())
    for (Mor f : B.hom(b, ctx.U_obj(a))) nodes.push_back({a, f});
  size_t k = nodes.size();
  // arrows[i][j]: local maps carrying node i to node j
  std::vector<std::vector<int>> arrows(k, std::vector<int>(k, 0));
  std::vector<int> comp(k);
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j)
      for (Mor m : A.hom(nodes[i].a, nodes[j].a))
        if (B.compose(ctx.U_mor(m), nodes[i].f) == nodes[j].f) {
          ++arrows[i][j];
          int ri = find(static_cast<int>(i)), rj = find(static_cast<int>(j));
          if (ri != rj) comp[std::max(ri, rj)] = std::min(ri, rj);
        }
  std::vector<LocalUnit> out;
  std::vector<char> done(k, 0);
  for (size_t i = 0; i < k; ++i) {
    int r = find(static_cast<int>(i));
    if (done[r]) continue;
    bool initial = true;
    for (size_t j = 0; j < k && initial; ++j)
      if (find(static_cast<int>(j)) == r) initial = arrows[i][j] == 1;
    if (initial) {
      done[r] = 1;
      out.push_back({nodes[i].f, nodes[i].a});
    }
  }
  return out;
}

std::vector<Mor> derive_dum(const DiersContext& ctx, Obj b) {
  const Category& B = ctx.ambient();
  std::vector<Mor> out{B.id(b)};
  for (Obj c : B.objects())
    for (Mor n : B.hom(b, c))
      if (n != B.id(b) && is_diagonally_universal(ctx, n)) out.push_back(n);
  return out;
}

// ---------------------------------------------------------------------------

TableContext::TableContext(std::string name, TableCategory a, TableCategory b, std::vector<Obj> uobj,
                           std::vector<Mor> umor)
    : name_(std::move(name)), a_(std::move(a)), b_(std::move(b)), uobj_(std::move(uobj)), umor_(std::move(umor)) {
  if (static_cast<int>(uobj_.size()) != static_cast<int>(a_.objects().size()))
    throw category_error("U is not total on objects");
  if (static_cast<int>(umor_.size()) != a_.num_morphisms()) throw category_error("U is not total on morphisms");
  for (Mor m = 0; m < a_.num_morphisms(); ++m) {
    if (b_.dom(umor_[m]) != uobj_[a_.dom(m)] || b_.cod(umor_[m]) != uobj_[a_.cod(m)])
      throw category_error("U(" + a_.mor_name(m) + ") has wrong ends");
    for (Mor g = 0; g < a_.num_morphisms(); ++g)
      if (a_.dom(g) == a_.cod(m) && umor_[a_.compose(g, m)] != b_.compose(umor_[g], umor_[m]))
        throw category_error("U does not preserve " + a_.mor_name(g) + "." + a_.mor_name(m));
  }
  for (Obj o : a_.objects())
    if (umor_[a_.id(o)] != b_.id(uobj_[o])) throw category_error("U does not preserve identities");
}

std::vector<LocalUnit> TableContext::compute_units(Obj b) const {
  auto it = explicit_units_.find(b);
  if (it != explicit_units_.end()) return it->second;
  return derive_units(*this, b);
}

std::vector<Mor> TableContext::compute_dum(Obj b) const {
  auto it = explicit_dum_.find(b);
  if (it != explicit_dum_.end()) return it->second;
  return derive_dum(*this, b);
}

std::unique_ptr<TableContext> TableContext::from_json(const json& j) {
  if (!j.contains("schema") || j.at("schema").get<int>() != 1)
    throw category_error("table context: schema 1 required");
  TableCategory a = TableCategory::from_json(j.at("A"), "A");
  TableCategory b = TableCategory::from_json(j.at("B"), "B");
  auto bobj = [&](const std::string& s) {
    auto o = b.find_object(s);
    if (!o) throw category_error("unknown B object " + s);
    return *o;
  };
  auto bmor = [&](const std::string& s) {
    auto m = b.find_morphism(s);
    if (!m) throw category_error("unknown B morphism " + s);
    return *m;
  };
  const json& U = j.at("U");
  std::vector<Obj> uobj;
  for (Obj o : a.objects()) {
    if (!U.at("objects").contains(a.obj_name(o))) throw category_error("U undefined on " + a.obj_name(o));
    uobj.push_back(bobj(U.at("objects").at(a.obj_name(o)).get<std::string>()));
  }
  json um = U.value("morphisms", json::object());
  std::vector<Mor> umor;
  for (Mor m = 0; m < a.num_morphisms(); ++m) {
    std::string mn = a.mor_name(m);
    if (m == a.id(a.dom(m))) {
      umor.push_back(b.id(uobj[a.dom(m)]));
    } else if (um.contains(mn)) {
      umor.push_back(bmor(um.at(mn).get<std::string>()));
    } else {
      const auto& h = b.hom(uobj[a.dom(m)], uobj[a.cod(m)]);
      if (h.size() != 1) throw category_error("U(" + mn + ") not given and not determined");
      umor.push_back(h[0]);
    }
  }
  auto ctx = std::make_unique<TableContext>(j.value("name", "table"), std::move(a), std::move(b),
                                            std::move(uobj), std::move(umor));
  const TableCategory& A = ctx->A();
  const TableCategory& B = ctx->B();
  if (j.contains("units") && j.at("units").is_object()) {
    for (Obj o : B.objects()) {
      std::vector<LocalUnit> us;
      for (const auto& e : j.at("units").value(B.obj_name(o), json::array())) {
        auto m = B.find_morphism(e.at(0).get<std::string>());
        auto l = A.find_object(e.at(1).get<std::string>());
        if (!m || !l) throw category_error("bad unit entry under " + B.obj_name(o));
        if (B.dom(*m) != o || B.cod(*m) != ctx->U_obj(*l))
          throw category_error("unit " + B.mor_name(*m) + " does not land in U(" + A.obj_name(*l) + ")");
        us.push_back({*m, *l});
      }
      ctx->set_units(o, us);
    }
  }
  if (j.contains("dum") && j.at("dum").is_object()) {
    for (Obj o : B.objects()) {
      std::vector<Mor> ds;
      for (const auto& e : j.at("dum").value(B.obj_name(o), json::array())) {
        auto m = B.find_morphism(e.get<std::string>());
        if (!m || B.dom(*m) != o) throw category_error("bad D entry under " + B.obj_name(o));
        ds.push_back(*m);
      }
      ctx->set_dum(o, ds);
    }
  }
  return ctx;
}

std::unique_ptr<TableContext> TableContext::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw category_error("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw category_error(path + ": " + e.what());
  }
  return from_json(j);
}

json TableContext::to_json() const {
  json j;
  j["schema"] = 1;
  j["name"] = name_;
  j["A"] = a_.to_json();
  j["B"] = b_.to_json();
  json uo = json::object(), um = json::object();
  for (Obj o : a_.objects()) uo[a_.obj_name(o)] = b_.obj_name(uobj_[o]);
  for (Mor m = 0; m < a_.num_morphisms(); ++m)
    if (m != a_.id(a_.dom(m))) um[a_.mor_name(m)] = b_.mor_name(umor_[m]);
  j["U"] = {{"objects", uo}, {"morphisms", um}};
  json units = json::object(), dm = json::object();
  for (Obj o : b_.objects()) {
    units[b_.obj_name(o)] = json::array();
    for (const auto& u : local_units(o)) units[b_.obj_name(o)].push_back({b_.mor_name(u.unit), a_.obj_name(u.local)});
    dm[b_.obj_name(o)] = json::array();
    for (Mor n : dum(o)) dm[b_.obj_name(o)].push_back(b_.mor_name(n));
  }
  j["units"] = units;
  j["dum"] = dm;
  return j;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::pair<int, int>> random_order(std::mt19937_64& rng, int n) {
  std::bernoulli_distribution coin(0.4);
  std::vector<std::pair<int, int>> leq;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) leq.emplace_back(i, j);
  return leq;
}

}  // namespace

std::unique_ptr<TableContext> random_thin_context(std::mt19937_64& rng, int max_b, int max_a) {
  int nb = std::uniform_int_distribution<int>(1, max_b)(rng);
  int na = std::uniform_int_distribution<int>(1, max_a)(rng);
  std::vector<std::string> bn, an;
  for (int i = 0; i < nb; ++i) bn.push_back("b" + std::to_string(i));
  for (int i = 0; i < na; ++i) an.push_back("a" + std::to_string(i));
  auto B = TableCategory::poset("B", bn, random_order(rng, nb));
  auto A = TableCategory::poset("A", an, random_order(rng, na));
  std::uniform_int_distribution<int> pick(0, nb - 1);
  std::vector<Obj> u(na, 0);
  auto monotone = [&] {
    for (Obj x : A.objects())
      for (Obj y : A.objects())
        if (!A.hom(x, y).empty() && B.hom(u[x], u[y]).empty()) return false;
    return true;
  };
  bool found = false;
  for (int tries = 0; tries < 200 && !found; ++tries) {
    for (auto& v : u) v = pick(rng);
    found = monotone();
  }
  if (!found) std::fill(u.begin(), u.end(), pick(rng));
  std::vector<Mor> um;
  for (Mor m = 0; m < A.num_morphisms(); ++m) um.push_back(B.hom(u[A.dom(m)], u[A.cod(m)]).at(0));
  return std::make_unique<TableContext>("random", std::move(A), std::move(B), std::move(u), std::move(um));
}

std::unique_ptr<DiersContext> make_context(const std::string& spec) {
  if (spec == "zariski") return std::make_unique<ZariskiContext>();
  if (spec == "boolean") return std::make_unique<BooleanContext>();
  if (spec == "trivial") {
    auto rings = std::make_shared<AlgCategory>(Theory::Ring);
    std::vector<Obj> s;
    for (const char* n : {"Z/2", "Z/3", "Z/4", "Z/6", "Z/12"}) s.push_back(rings->parse(n));
    return std::make_unique<TrivialContext>(rings, s);
  }
  if (spec.rfind("table:", 0) == 0) return TableContext::load(spec.substr(6));
  throw category_error("unknown instance '" + spec + "'");
}

Obj find_object(const DiersContext& ctx, const std::string& name) {
  if (name == "any") {
    auto s = ctx.sample_objects();
    if (s.empty()) throw category_error("instance has no objects");
    return s.front();
  }
  if (auto* a = dynamic_cast<const AlgCategory*>(&ctx.ambient())) return a->parse(name);
  if (auto* t = dynamic_cast<const TableCategory*>(&ctx.ambient())) {
    if (auto o = t->find_object(name)) return *o;
  }
  throw category_error("unknown object '" + name + "'");
}

}  // namespace diers
