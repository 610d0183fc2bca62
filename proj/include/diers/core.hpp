#pragma once

// Finitely checkable categories and brute-force universal constructions.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace diers {

using Obj = int;
using Mor = int;
using json = nlohmann::json;

class category_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Diagram {
  struct Edge {
    int src;
    int dst;
    Mor mor;
  };
  std::vector<Obj> nodes;
  std::vector<Edge> edges;

  int add_node(Obj o) {
    nodes.push_back(o);
    return static_cast<int>(nodes.size()) - 1;
  }
  void add_edge(int s, int t, Mor m) { edges.push_back({s, t, m}); }
};

struct Cocone {
  Obj apex = -1;
  std::vector<Mor> legs;
};

struct Cone {
  Obj apex = -1;
  std::vector<Mor> legs;
};

class Category {
 public:
  virtual ~Category() = default;

  virtual std::string name() const = 0;
  // The enumerated universe; lazily presented categories return what exists so far.
  virtual std::vector<Obj> objects() const = 0;
  virtual std::string obj_name(Obj o) const = 0;
  virtual std::string mor_name(Mor m) const = 0;
  virtual Obj dom(Mor m) const = 0;
  virtual Obj cod(Mor m) const = 0;
  virtual Mor id(Obj o) const = 0;
  // g after f
  virtual Mor compose(Mor g, Mor f) const = 0;
  virtual const std::vector<Mor>& hom(Obj x, Obj y) const = 0;

  virtual std::optional<Cocone> colimit(const Diagram& d) const = 0;
  virtual std::optional<Cone> limit(const Diagram& d) const = 0;
  // Legs are (leg out of cod f, leg out of cod g).
  virtual std::optional<Cocone> pushout(Mor f, Mor g) const;
  virtual std::optional<Mor> mediate_colimit(const Diagram& d, const Cocone& colim,
                                             const Cocone& other) const;
  virtual std::optional<Mor> mediate_limit(const Diagram& d, const Cone& lim,
                                           const Cone& other) const;
  virtual std::optional<Obj> terminal() const;
  // Two-sided inverse; the default searches hom(cod m, dom m).
  virtual std::optional<Mor> invert(Mor m) const;
  // Every k : cod n -> cod f with k . n = f; the default scans the hom-set.
  virtual std::vector<Mor> extensions(Mor n, Mor f) const;
  // Some iso x -> y; the default scans hom(x, y).
  virtual std::optional<Mor> iso_between(Obj x, Obj y) const;
  virtual json mor_json(Mor m) const;
  virtual json obj_json(Obj o) const;
};

Mor compose_chain(const Category& c, std::initializer_list<Mor> ms);
bool is_identity(const Category& c, Mor m);
std::optional<Mor> inverse(const Category& c, Mor m);
inline bool is_iso(const Category& c, Mor m) { return inverse(c, m).has_value(); }
std::optional<Mor> find_iso(const Category& c, Obj x, Obj y);

bool is_cocone(const Category& c, const Diagram& d, const Cocone& cc);
bool is_cone(const Category& c, const Diagram& d, const Cone& cn);

// Every cocone with leg tuple built from hom-sets into the given apex.
std::vector<Cocone> cocones_into(const Category& c, const Diagram& d, Obj apex);
std::vector<Cone> cones_from(const Category& c, const Diagram& d, Obj apex);

// Exhaustive universality check against every cocone whose apex lies in `apexes`.
bool verify_colimit(const Category& c, const Diagram& d, const Cocone& colim,
                    const std::vector<Obj>& apexes);
bool verify_limit(const Category& c, const Diagram& d, const Cone& lim,
                  const std::vector<Obj>& apexes);

std::optional<Cocone> bruteforce_colimit(const Category& c, const Diagram& d);
std::optional<Cone> bruteforce_limit(const Category& c, const Diagram& d);
std::optional<Mor> bruteforce_mediate_colimit(const Category& c, const Diagram& d,
                                              const Cocone& colim, const Cocone& other);
std::optional<Mor> bruteforce_mediate_limit(const Category& c, const Diagram& d,
                                            const Cone& lim, const Cone& other);

Diagram span(const Category& c, Mor f, Mor g);

// Associativity and unit laws on every composable triple (exhaustive).
struct LawReport {
  bool ok = true;
  std::string failure;
  long checked = 0;
};
LawReport check_category_laws(const Category& c);

}  // namespace diers
