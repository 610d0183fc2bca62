#pragma once

// Concrete Diers contexts: identity, finite rings over local rings, finite
// Boolean algebras over 2, and JSON-described table contexts.

#include <memory>
#include <random>

#include "diers/algebra.hpp"
#include "diers/context.hpp"
#include "diers/table_category.hpp"

namespace diers {

class TrivialContext : public DiersContext {
 public:
  TrivialContext(std::shared_ptr<const Category> c, std::vector<Obj> samples)
      : c_(std::move(c)), samples_(std::move(samples)) {}
  std::string name() const override { return "trivial(" + c_->name() + ")"; }
  const Category& ambient() const override { return *c_; }
  const Category& local() const override { return *c_; }
  Obj U_obj(Obj a) const override { return a; }
  Mor U_mor(Mor m) const override { return m; }
  std::vector<Obj> sample_objects() const override { return samples_; }
  std::vector<Obj> local_objects() const override { return samples_; }

 protected:
  std::vector<LocalUnit> compute_units(Obj b) const override { return {{c_->id(b), b}}; }
  std::vector<Mor> compute_dum(Obj b) const override { return {c_->id(b)}; }

 private:
  std::shared_ptr<const Category> c_;
  std::vector<Obj> samples_;
};

// Finite commutative rings over finite local rings. Units are the projections
// onto local factors; D_B holds the single-element localizations B -> B[1/s].
class ZariskiContext : public DiersContext {
 public:
  explicit ZariskiContext(int max_order = 36);
  std::string name() const override { return "zariski"; }
  const Category& ambient() const override { return rings_; }
  const Category& local() const override { return *local_; }
  Obj U_obj(Obj a) const override { return a; }
  Mor U_mor(Mor m) const override { return m; }
  std::vector<Obj> sample_objects() const override { return samples_; }
  std::vector<Obj> local_objects() const override { return local_->objects(); }

  const AlgCategory& rings() const { return rings_; }
  Obj parse(const std::string& s) const { return rings_.parse(s); }
  // B -> B[1/s]
  Mor localization(Obj b, int s) const;

 protected:
  std::vector<LocalUnit> compute_units(Obj b) const override;
  std::vector<Mor> compute_dum(Obj b) const override;

 private:
  struct Split {
    Mor iso;                   // B -> product of factors
    std::vector<Obj> factors;  // local factor objects
  };
  const Split& split(Obj b) const;
  Mor project(Obj b, const std::vector<int>& keep) const;

  AlgCategory rings_;
  std::unique_ptr<SubCategory> local_;
  std::vector<Obj> samples_;
  mutable std::recursive_mutex mu_;
  mutable std::map<Obj, Split> splits_;
};

// Finite Boolean algebras over the single local object 2. Units are the atom
// evaluations; D_B holds the principal quotients b -> b & a.
class BooleanContext : public DiersContext {
 public:
  explicit BooleanContext(int max_atoms = 4);
  std::string name() const override { return "boolean"; }
  const Category& ambient() const override { return bools_; }
  const Category& local() const override { return *local_; }
  Obj U_obj(Obj a) const override { return a; }
  Mor U_mor(Mor m) const override { return m; }
  std::vector<Obj> sample_objects() const override { return samples_; }

  const AlgCategory& bools() const { return bools_; }
  Obj parse(const std::string& s) const { return bools_.parse(s); }
  Obj two() const { return two_; }
  // B -> down-set of a, as a Boolean algebra
  Mor principal_quotient(Obj b, int a) const;

 protected:
  std::vector<LocalUnit> compute_units(Obj b) const override;
  std::vector<Mor> compute_dum(Obj b) const override;

 private:
  AlgCategory bools_;
  Obj two_;
  std::unique_ptr<SubCategory> local_;
  std::vector<Obj> samples_;
};

// Units and D_B either listed in the document or derived by exhaustive search
// ("auto": initial objects of the components of B|U, and every diagonally
// universal map out of B).
class TableContext : public DiersContext {
 public:
  static std::unique_ptr<TableContext> from_json(const json& j);
  static std::unique_ptr<TableContext> load(const std::string& path);
  TableContext(std::string name, TableCategory a, TableCategory b, std::vector<Obj> uobj,
               std::vector<Mor> umor);

  std::string name() const override { return name_; }
  const Category& ambient() const override { return b_; }
  const Category& local() const override { return a_; }
  Obj U_obj(Obj a) const override { return uobj_.at(a); }
  Mor U_mor(Mor m) const override { return umor_.at(m); }
  std::vector<Obj> sample_objects() const override { return b_.objects(); }

  const TableCategory& A() const { return a_; }
  const TableCategory& B() const { return b_; }
  void set_units(Obj b, std::vector<LocalUnit> u) { explicit_units_[b] = std::move(u); }
  void set_dum(Obj b, std::vector<Mor> d) { explicit_dum_[b] = std::move(d); }
  json to_json() const;

 protected:
  std::vector<LocalUnit> compute_units(Obj b) const override;
  std::vector<Mor> compute_dum(Obj b) const override;

 private:
  std::string name_;
  TableCategory a_, b_;
  std::vector<Obj> uobj_;
  std::vector<Mor> umor_;
  std::map<Obj, std::vector<LocalUnit>> explicit_units_;
  std::map<Obj, std::vector<Mor>> explicit_dum_;
};

// Units of B derived from the comma category: one initial object per component.
std::vector<LocalUnit> derive_units(const DiersContext& ctx, Obj b);
// Every diagonally universal map out of B, in hom order.
std::vector<Mor> derive_dum(const DiersContext& ctx, Obj b);

// Thin random context: posets B (1..max_b elements) and A (1..max_a), monotone U.
std::unique_ptr<TableContext> random_thin_context(std::mt19937_64& rng, int max_b, int max_a);

// "trivial", "zariski", "boolean", "table:<path>"
std::unique_ptr<DiersContext> make_context(const std::string& spec);
// Instance object names; "any" picks the first sample.
Obj find_object(const DiersContext& ctx, const std::string& name);

}  // namespace diers
