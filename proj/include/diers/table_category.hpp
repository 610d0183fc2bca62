#pragma once

// Table-driven finite categories. Composition is an explicit table and every
// universal construction is found by exhaustive search, so this backend serves
// as the oracle for the algebraic ones.

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "diers/core.hpp"

namespace diers {

class TableCategory : public Category {
 public:
  explicit TableCategory(std::string name = "table") : name_(std::move(name)) {}
  TableCategory(const TableCategory& o);
  TableCategory& operator=(const TableCategory&) = delete;

  Obj add_object(const std::string& name);
  Mor add_morphism(const std::string& name, Obj d, Obj c);
  void set_composite(Mor g, Mor f, Mor h);
  // Fills identity composites; throws when a composable pair has no entry.
  void finalize();

  // Thin category of a finite preorder; `leq` is closed reflexively and transitively.
  static TableCategory poset(const std::string& name, const std::vector<std::string>& elements,
                             const std::vector<std::pair<int, int>>& leq);
  static TableCategory from_json(const json& j, const std::string& name);
  json to_json() const;

  std::optional<Obj> find_object(const std::string& n) const;
  std::optional<Mor> find_morphism(const std::string& n) const;
  bool thin() const;
  int num_morphisms() const { return static_cast<int>(mors_.size()); }

  std::string name() const override { return name_; }
  std::vector<Obj> objects() const override;
  std::string obj_name(Obj o) const override { return objs_.at(o); }
  std::string mor_name(Mor m) const override { return mors_.at(m).name; }
  Obj dom(Mor m) const override { return mors_.at(m).dom; }
  Obj cod(Mor m) const override { return mors_.at(m).cod; }
  Mor id(Obj o) const override { return ids_.at(o); }
  Mor compose(Mor g, Mor f) const override;
  const std::vector<Mor>& hom(Obj x, Obj y) const override;
  std::optional<Cocone> colimit(const Diagram& d) const override;
  std::optional<Cone> limit(const Diagram& d) const override;

 private:
  struct MorRec {
    std::string name;
    Obj dom;
    Obj cod;
  };
  std::string name_;
  std::vector<std::string> objs_;
  std::vector<MorRec> mors_;
  std::vector<Mor> ids_;
  std::vector<std::vector<Mor>> comp_;  // comp_[g][f]
  std::vector<std::vector<std::vector<Mor>>> homs_;
  mutable std::mutex mu_;
  mutable std::map<std::string, std::optional<Cocone>> colim_cache_;
  mutable std::map<std::string, std::optional<Cone>> lim_cache_;
};

std::string diagram_key(const Diagram& d);

}  // namespace diers
