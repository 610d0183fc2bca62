#pragma once

// Finite algebras given by operation tables: commutative unital rings and
// Boolean algebras. Both share one shape (two constants, one unary and two
// binary operations) so hom enumeration, congruences, quotients and limits
// are written once.

#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "diers/core.hpp"

namespace diers {

enum class Theory { Ring, Boolean };

// Ring: c0 = 0, c1 = 1, un = negation, op0 = +, op1 = *.
// Boolean: c0 = bottom, c1 = top, un = complement, op0 = meet, op1 = join.
struct Algebra {
  Theory theory = Theory::Ring;
  int n = 0;
  int c0 = 0;
  int c1 = 0;
  std::vector<int> un;
  std::vector<int> op0;
  std::vector<int> op1;

  int add(int a, int b) const { return op0[a * n + b]; }
  int mul(int a, int b) const { return op1[a * n + b]; }
  int bin(int k, int a, int b) const { return k == 0 ? op0[a * n + b] : op1[a * n + b]; }
  std::string key() const;
};

using ElementMap = std::vector<int>;

Algebra ring_cyclic(int n);
Algebra ring_product(const std::vector<Algebra>& factors);
Algebra boolean_power(int k);
Algebra algebra_product(Theory t, const std::vector<const Algebra*>& factors);
Algebra poly_quotient(int p, const std::vector<int>& modulus);

bool check_axioms(const Algebra& a, std::string* why = nullptr);
bool is_hom(const Algebra& a, const Algebra& b, const ElementMap& f);
std::vector<int> subalgebra(const Algebra& a, const std::vector<int>& gens);
std::vector<int> generating_set(const Algebra& a);
std::vector<ElementMap> all_homs(const Algebra& a, const Algebra& b);

// Labels 0..k-1 in order of first appearance.
std::vector<int> congruence_closure(const Algebra& a, const std::vector<std::pair<int, int>>& pairs);
Algebra quotient(const Algebra& a, const std::vector<int>& labels);

bool is_unit(const Algebra& r, int x);
bool is_local_ring(const Algebra& r);
std::vector<int> idempotents(const Algebra& r);
std::vector<int> primitive_idempotents(const Algebra& r);
std::vector<int> boolean_atoms(const Algebra& b);

struct NormalForm {
  Algebra alg;
  ElementMap iso;  // original element -> normal element
  std::string name;
  std::vector<Algebra> factors;
  std::vector<std::string> factor_names;
};
// Rings: product of local factors, cyclic factors as Z/p^k, sorted by (prime, -size).
// Boolean algebras: 2^k on atom masks.
NormalForm normalize(const Algebra& a);

class AlgCategory : public Category {
 public:
  explicit AlgCategory(Theory t);

  Theory theory() const { return theory_; }
  Obj intern(const Algebra& a, const std::string& name) const;
  // Normalizes first; returns the normal object and the iso from `a` onto it.
  std::pair<Obj, ElementMap> intern_normal(const Algebra& a) const;
  Mor intern_mor(Obj d, Obj c, const ElementMap& map) const;
  const Algebra& alg(Obj o) const;
  const ElementMap& map(Mor m) const;
  bool surjective(Mor m) const;
  bool injective(Mor m) const;
  // Names: rings "Z/12", "F_2xZ/4", "0"; Boolean algebras "2^3", "2", "1".
  Obj parse(const std::string& name) const;
  // iso from o onto its normal form
  Mor normal_iso(Obj o) const;

  std::string name() const override;
  std::vector<Obj> objects() const override;
  std::string obj_name(Obj o) const override;
  std::string mor_name(Mor m) const override;
  Obj dom(Mor m) const override;
  Obj cod(Mor m) const override;
  Mor id(Obj o) const override;
  Mor compose(Mor g, Mor f) const override;
  // bijective homomorphisms invert set-theoretically
  std::optional<Mor> invert(Mor m) const override;
  // equal normal forms give the iso directly; otherwise the hom-set is scanned
  std::optional<Mor> iso_between(Obj x, Obj y) const override;
  // along a surjective n the extension is forced pointwise
  std::vector<Mor> extensions(Mor n, Mor f) const override;
  const std::vector<Mor>& hom(Obj x, Obj y) const override;
  std::optional<Cocone> colimit(const Diagram& d) const override;
  std::optional<Cone> limit(const Diagram& d) const override;
  std::optional<Cocone> pushout(Mor f, Mor g) const override;
  std::optional<Mor> mediate_colimit(const Diagram& d, const Cocone& colim,
                                     const Cocone& other) const override;
  std::optional<Mor> mediate_limit(const Diagram& d, const Cone& lim,
                                   const Cone& other) const override;
  json mor_json(Mor m) const override;
  json obj_json(Obj o) const override;

 private:
  struct MorRec {
    Obj dom;
    Obj cod;
    ElementMap map;
  };
  Theory theory_;
  mutable std::recursive_mutex mu_;
  mutable std::deque<Algebra> algs_;
  mutable std::deque<std::string> names_;
  mutable std::unordered_map<std::string, Obj> obj_index_;
  mutable std::deque<MorRec> mors_;
  struct MorKeyHash {
    size_t operator()(const ElementMap& k) const {
      size_t h = k.size();
      for (int v : k) h = h * 1000003u ^ static_cast<size_t>(v + 1);
      return h;
    }
  };
  struct PairHash {
    size_t operator()(const std::pair<Mor, Mor>& p) const {
      return std::hash<long long>()((static_cast<long long>(p.first) << 32) ^ static_cast<unsigned>(p.second));
    }
  };
  // key: dom, cod, then the element map
  mutable std::unordered_map<ElementMap, Mor, MorKeyHash> mor_index_;
  mutable std::unordered_map<std::pair<Mor, Mor>, Mor, PairHash> compose_cache_;
  // apexes then legs of (limit, other); -1 no mediator, -2 limit legs not jointly injective
  mutable std::unordered_map<ElementMap, Mor, MorKeyHash> mediate_cache_;
  mutable std::map<std::pair<Obj, Obj>, std::vector<Mor>> homs_;
  mutable std::map<Obj, Mor> normal_cache_;
};

// Subcategory on listed objects, with morphisms filtered by a predicate.
class SubCategory : public Category {
 public:
  using MorPred = std::function<bool(Mor)>;
  SubCategory(const Category& parent, std::string name, std::vector<Obj> objs, MorPred keep);

  const Category& parent() const { return parent_; }
  void add_object(Obj o) const;
  bool contains(Obj o) const;

  std::string name() const override { return name_; }
  std::vector<Obj> objects() const override;
  std::string obj_name(Obj o) const override { return parent_.obj_name(o); }
  std::string mor_name(Mor m) const override { return parent_.mor_name(m); }
  Obj dom(Mor m) const override { return parent_.dom(m); }
  Obj cod(Mor m) const override { return parent_.cod(m); }
  Mor id(Obj o) const override { return parent_.id(o); }
  Mor compose(Mor g, Mor f) const override { return parent_.compose(g, f); }
  std::optional<Mor> invert(Mor m) const override {
    auto k = parent_.invert(m);
    if (k && keep_ && !keep_(*k)) return std::nullopt;
    return k;
  }
  const std::vector<Mor>& hom(Obj x, Obj y) const override;
  std::optional<Cocone> colimit(const Diagram&) const override { return std::nullopt; }
  std::optional<Cone> limit(const Diagram&) const override { return std::nullopt; }
  json mor_json(Mor m) const override { return parent_.mor_json(m); }

 private:
  const Category& parent_;
  std::string name_;
  mutable std::mutex mu_;
  mutable std::vector<Obj> objs_;
  MorPred keep_;
  mutable std::map<std::pair<Obj, Obj>, std::vector<Mor>> homs_;
};

}  // namespace diers
