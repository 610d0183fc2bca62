#pragma once

// Finite spaces and the point-set spectrum of an ambient object.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "diers/context.hpp"

namespace diers {

using PointSet = std::uint64_t;
constexpr int kMaxPoints = 64;

inline PointSet bit(int x) { return PointSet{1} << x; }
inline bool has(PointSet s, int x) { return (s >> x) & 1; }
std::vector<int> members(PointSet s);
inline PointSet full_set(int n) { return n >= 64 ? ~PointSet{0} : bit(n) - 1; }

// Alexandrov space with its whole open lattice; opens are sorted by (size, bits).
class FinTopSpace {
 public:
  FinTopSpace() = default;
  // Topology generated by a family of subsets (a subbasis), always containing X.
  static FinTopSpace generated(int n, const std::vector<PointSet>& subbasis);
  static FinTopSpace discrete(int n);

  int size() const { return n_; }
  PointSet all() const { return full_set(n_); }
  const std::vector<PointSet>& opens() const { return opens_; }
  PointSet minimal_open(int x) const { return minimal_[x]; }
  bool is_open(PointSet s) const { return index_.count(s) > 0; }
  int open_index(PointSet s) const;
  // x specializes to y: y lies in every open containing x.
  bool specializes(int x, int y) const { return has(minimal_[x], y); }
  bool t0() const;
  bool t1() const;
  bool is_discrete() const;
  json to_json() const;

 private:
  int n_ = 0;
  std::vector<PointSet> opens_;
  std::vector<PointSet> minimal_;
  std::map<PointSet, int> index_;
};

using PointMap = std::vector<int>;  // point of the source -> point of the target

PointSet preimage(const PointMap& f, PointSet s);
PointSet image(const PointMap& f, PointSet s);
bool is_continuous(const FinTopSpace& from, const FinTopSpace& to, const PointMap& f);

struct Spectrum {
  Obj base = -1;
  FinTopSpace space;
  std::vector<LocalUnit> points;
  std::vector<PointSet> basis;               // per element of d_poset(base)
  std::vector<std::vector<char>> order;      // factorization order on points
  bool specialization_matches = true;

  json to_json(const DiersContext& ctx) const;
  std::string to_dot(const DiersContext& ctx) const;
};

// Units x with n <= x, for any map n out of B.
PointSet basic_open(const DiersContext& ctx, Obj b, Mor n);
PointSet focal_component(const DiersContext& ctx, Obj b, int x);
Spectrum spec_space(const DiersContext& ctx, Obj b);

// Spec of f : B1 -> B2 as a map of points X_B2 -> X_B1.
struct SpecMap {
  Mor f = -1;
  PointMap points;
  std::vector<Mor> pushed;  // f_* n for each element of d_poset(B1), or -1 when no pushout
  bool basis_ok = true;     // Spec(f)^-1 D_n = D_{f_* n}
  bool continuous = true;
  std::string failure;
};
SpecMap spec_map(const DiersContext& ctx, Mor f);

struct SeparationReport {
  bool observed_t0 = true, observed_t1 = true, observed_discrete = true;
  bool conservative = false, full = false, faithful = false;
  bool predicted_t0() const { return conservative; }
  bool predicted_t1() const { return full && faithful; }
  bool agree() const { return observed_t0 == predicted_t0() && observed_t1 == predicted_t1(); }
  std::string witness;  // object whose spectrum breaks an observed flag
  json to_json() const;
};
SeparationReport classify_separation(const DiersContext& ctx);

// Intersections, top element, D antitone on d_poset(b), the point order
// monotone on unit filters, and specialization = factorization order.
// Order reflection of D is recorded but may fail.
struct BasisLawReport {
  Obj object = -1;
  long checked = 0;
  long failures = 0;
  bool order_reflecting = true;
  std::string failure;  // first failing law with its witnesses
  bool ok() const { return failures == 0; }
  json to_json(const DiersContext& ctx) const;
};
BasisLawReport check_basis_laws(const DiersContext& ctx, Obj b);
SeparationReport classify_separation(const DiersContext& ctx, const std::vector<Obj>& objs);

}  // namespace diers
