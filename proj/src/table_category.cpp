#include "diers/table_category.hpp"

#include <sstream>

namespace diers {

TableCategory::TableCategory(const TableCategory& o)
    : name_(o.name_), objs_(o.objs_), mors_(o.mors_), ids_(o.ids_), comp_(o.comp_), homs_(o.homs_) {}

Obj TableCategory::add_object(const std::string& name) {
  if (find_object(name)) throw category_error("duplicate object " + name);
  Obj o = static_cast<Obj>(objs_.size());
  objs_.push_back(name);
  for (auto& row : homs_) row.emplace_back();
  homs_.emplace_back(objs_.size());
  Mor i = static_cast<Mor>(mors_.size());
  mors_.push_back({"id_" + name, o, o});
  for (auto& row : comp_) row.push_back(-1);
  comp_.emplace_back(mors_.size(), -1);
  ids_.push_back(i);
  homs_[o][o].push_back(i);
  return o;
}

Mor TableCategory::add_morphism(const std::string& name, Obj d, Obj c) {
  if (find_morphism(name)) throw category_error("duplicate morphism " + name);
  Mor m = static_cast<Mor>(mors_.size());
  mors_.push_back({name, d, c});
  for (auto& row : comp_) row.push_back(-1);
  comp_.emplace_back(mors_.size(), -1);
  homs_[d][c].push_back(m);
  return m;
}

void TableCategory::set_composite(Mor g, Mor f, Mor h) {
  if (cod(f) != dom(g)) throw category_error("non-composable pair " + mor_name(g) + "," + mor_name(f));
  if (dom(h) != dom(f) || cod(h) != cod(g))
    throw category_error("composite " + mor_name(h) + " has wrong ends");
  comp_[g][f] = h;
}

void TableCategory::finalize() {
  for (Mor f = 0; f < num_morphisms(); ++f) {
    comp_[ids_[cod(f)]][f] = f;
    comp_[f][ids_[dom(f)]] = f;
  }
  for (Mor g = 0; g < num_morphisms(); ++g)
    for (Mor f = 0; f < num_morphisms(); ++f)
      if (cod(f) == dom(g) && comp_[g][f] < 0)
        throw category_error("missing composite " + mor_name(g) + "." + mor_name(f));
}

TableCategory TableCategory::poset(const std::string& name, const std::vector<std::string>& elements,
                                   const std::vector<std::pair<int, int>>& leq) {
  size_t n = elements.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i) r[i][i] = true;
  for (auto [a, b] : leq) r[a][b] = true;
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  TableCategory c(name);
  for (const auto& e : elements) c.add_object(e);
  std::vector<std::vector<Mor>> arrow(n, std::vector<Mor>(n, -1));
  for (size_t i = 0; i < n; ++i) arrow[i][i] = c.id(static_cast<Obj>(i));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j && r[i][j])
        arrow[i][j] = c.add_morphism(elements[i] + "<=" + elements[j], static_cast<Obj>(i),
                                     static_cast<Obj>(j));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < n; ++k)
        if (arrow[i][j] >= 0 && arrow[j][k] >= 0) c.set_composite(arrow[j][k], arrow[i][j], arrow[i][k]);
  c.finalize();
  return c;
}

TableCategory TableCategory::from_json(const json& j, const std::string& name) {
  if (j.contains("poset")) {
    const auto& p = j.at("poset");
    std::vector<std::string> els = p.at("elements").get<std::vector<std::string>>();
    std::vector<std::pair<int, int>> leq;
    auto index = [&](const std::string& s) {
      for (size_t i = 0; i < els.size(); ++i)
        if (els[i] == s) return static_cast<int>(i);
      throw category_error("unknown poset element " + s);
    };
    for (const auto& pr : p.value("leq", json::array()))
      leq.emplace_back(index(pr.at(0).get<std::string>()), index(pr.at(1).get<std::string>()));
    return poset(name, els, leq);
  }
  TableCategory c(name);
  for (const auto& o : j.at("objects")) c.add_object(o.get<std::string>());
  auto obj = [&](const std::string& s) {
    auto o = c.find_object(s);
    if (!o) throw category_error("unknown object " + s);
    return *o;
  };
  auto mor = [&](const std::string& s) {
    auto m = c.find_morphism(s);
    if (!m) throw category_error("unknown morphism " + s);
    return *m;
  };
  for (const auto& m : j.value("morphisms", json::array()))
    c.add_morphism(m.at("name").get<std::string>(), obj(m.at("dom").get<std::string>()),
                   obj(m.at("cod").get<std::string>()));
  for (const auto& e : j.value("compose", json::array()))
    c.set_composite(mor(e.at(0).get<std::string>()), mor(e.at(1).get<std::string>()),
                    mor(e.at(2).get<std::string>()));
  c.finalize();
  return c;
}

json TableCategory::to_json() const {
  json j;
  j["objects"] = objs_;
  j["morphisms"] = json::array();
  j["compose"] = json::array();
  for (Mor m = 0; m < num_morphisms(); ++m) {
    if (ids_[dom(m)] == m) continue;
    j["morphisms"].push_back({{"name", mors_[m].name}, {"dom", objs_[dom(m)]}, {"cod", objs_[cod(m)]}});
  }
  for (Mor g = 0; g < num_morphisms(); ++g)
    for (Mor f = 0; f < num_morphisms(); ++f)
      if (cod(f) == dom(g) && ids_[dom(g)] != g && ids_[dom(f)] != f)
        j["compose"].push_back({mors_[g].name, mors_[f].name, mors_[comp_[g][f]].name});
  return j;
}

std::optional<Obj> TableCategory::find_object(const std::string& n) const {
  for (size_t i = 0; i < objs_.size(); ++i)
    if (objs_[i] == n) return static_cast<Obj>(i);
  return std::nullopt;
}

std::optional<Mor> TableCategory::find_morphism(const std::string& n) const {
  for (size_t i = 0; i < mors_.size(); ++i)
    if (mors_[i].name == n) return static_cast<Mor>(i);
  return std::nullopt;
}

bool TableCategory::thin() const {
  for (const auto& row : homs_)
    for (const auto& h : row)
      if (h.size() > 1) return false;
  return true;
}

std::vector<Obj> TableCategory::objects() const {
  std::vector<Obj> v(objs_.size());
  for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<Obj>(i);
  return v;
}

Mor TableCategory::compose(Mor g, Mor f) const {
  if (cod(f) != dom(g)) throw category_error("non-composable pair " + mor_name(g) + "," + mor_name(f));
  return comp_[g][f];
}

const std::vector<Mor>& TableCategory::hom(Obj x, Obj y) const { return homs_.at(x).at(y); }

std::string diagram_key(const Diagram& d) {
  std::ostringstream s;
  for (Obj o : d.nodes) s << o << ',';
  s << '|';
  for (const auto& e : d.edges) s << e.src << ':' << e.dst << ':' << e.mor << ';';
  return s.str();
}

std::optional<Cocone> TableCategory::colimit(const Diagram& d) const {
  std::string k = diagram_key(d);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = colim_cache_.find(k);
    if (it != colim_cache_.end()) return it->second;
  }
  auto r = bruteforce_colimit(*this, d);
  std::lock_guard<std::mutex> lock(mu_);
  colim_cache_[k] = r;
  return r;
}

std::optional<Cone> TableCategory::limit(const Diagram& d) const {
  std::string k = diagram_key(d);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = lim_cache_.find(k);
    if (it != lim_cache_.end()) return it->second;
  }
  auto r = bruteforce_limit(*this, d);
  std::lock_guard<std::mutex> lock(mu_);
  lim_cache_[k] = r;
  return r;
}

}  // namespace diers
