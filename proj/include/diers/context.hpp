#pragma once

// A right multi-adjoint U : A -> B with enumerated local units and
// diagonally universal morphisms, plus the generic algorithms over it.

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "diers/core.hpp"

namespace diers {

struct LocalUnit {
  Mor unit = -1;   // B -> U(A)
  Obj local = -1;  // A
};

struct Factorization {
  int index = -1;  // position in local_units(dom f)
  LocalUnit unit;
  Mor local_part = -1;  // A_x -> A in the local category
};

// Poset reflection of the enumerated diagonally universal maps under B.
struct DPoset {
  Obj base = -1;
  std::vector<Mor> elems;
  std::vector<std::vector<Mor>> merged;   // raw maps identified with elems[i]
  std::vector<std::vector<Mor>> witness;  // cod(i) -> cod(j) when elems[i] <= elems[j], else -1
  int bottom = -1;

  size_t size() const { return elems.size(); }
  bool leq(int i, int j) const { return witness[i][j] >= 0; }
};

class DiersContext {
 public:
  virtual ~DiersContext() = default;

  virtual std::string name() const = 0;
  virtual const Category& ambient() const = 0;
  virtual const Category& local() const = 0;
  virtual Obj U_obj(Obj a) const = 0;
  virtual Mor U_mor(Mor m) const = 0;
  // Ambient objects validation and search iterate over.
  virtual std::vector<Obj> sample_objects() const = 0;
  // Local objects quantified over in orthogonality and factorization checks.
  virtual std::vector<Obj> local_objects() const { return local().objects(); }

  const std::vector<LocalUnit>& local_units(Obj b) const;
  const std::vector<Mor>& dum(Obj b) const;
  const DPoset& d_poset(Obj b) const;

  std::vector<Factorization> factorizations(Mor f, Obj a) const;
  // Present only when the factorization is unique.
  std::optional<Factorization> factorize(Mor f, Obj a) const;

 protected:
  virtual std::vector<LocalUnit> compute_units(Obj b) const = 0;
  virtual std::vector<Mor> compute_dum(Obj b) const = 0;

 private:
  mutable std::recursive_mutex mu_;
  mutable std::map<Obj, std::vector<LocalUnit>> units_;
  mutable std::map<Obj, std::vector<Mor>> dum_;
  mutable std::map<Obj, DPoset> dposet_;
};

struct DUReport {
  bool ok = true;
  Mor u = -1, f = -1, g = -1;  // failing square
  int fillers = 0;
  long squares = 0;
};
DUReport diagonal_universality(const DiersContext& ctx, Mor n);
inline bool is_diagonally_universal(const DiersContext& ctx, Mor n) {
  return diagonal_universality(ctx, n).ok;
}

// Witness m with m . n1 = n2.
std::optional<Mor> leq_factorization(const DiersContext& ctx, Mor n1, Mor n2);
std::optional<Mor> join(const DiersContext& ctx, Mor n1, Mor n2);
// Canonical element of D_B equivalent to n, or -1.
int dposet_index(const DiersContext& ctx, Obj b, Mor n);
// V_x as indices into d_poset(B)
std::vector<int> unit_filter(const DiersContext& ctx, Obj b, int unit_index);
int unit_index(const DiersContext& ctx, Obj b, Mor x);

struct ObjectVerdict {
  Obj object = -1;
  bool multi_reflection = true;
  bool diagonal = true;
  bool diers = true;
  std::string mr_detail, du_detail, diers_detail;
  std::vector<Mor> witnesses;
  double millis = 0;
  bool ok() const { return multi_reflection && diagonal && diers; }
};

struct ValidationReport {
  std::string context;
  std::vector<ObjectVerdict> objects;
  bool ok() const;
  json to_json(const DiersContext& ctx) const;
};

ValidationReport validate_context(const DiersContext& ctx);
ValidationReport validate_context(const DiersContext& ctx, const std::vector<Obj>& objs);
ObjectVerdict validate_object(const DiersContext& ctx, Obj b);

// Exhaustive diagnostics of U on the local category.
bool U_faithful(const DiersContext& ctx);
bool U_full(const DiersContext& ctx);
bool U_conservative(const DiersContext& ctx);

}  // namespace diers
