#include "diers/algebra.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace diers {

std::string Algebra::key() const {
  std::ostringstream s;
  s << (theory == Theory::Ring ? 'R' : 'B') << n << ':' << c0 << ',' << c1 << '|';
  for (int v : un) s << v << ',';
  s << '|';
  for (int v : op0) s << v << ',';
  s << '|';
  for (int v : op1) s << v << ',';
  return s.str();
}

Algebra ring_cyclic(int n) {
  if (n < 1) throw category_error("Z/n needs n >= 1");
  Algebra a;
  a.theory = Theory::Ring;
  a.n = n;
  a.c0 = 0;
  a.c1 = 1 % n;
  a.un.resize(n);
  a.op0.resize(n * n);
  a.op1.resize(n * n);
  for (int x = 0; x < n; ++x) {
    a.un[x] = (n - x) % n;
    for (int y = 0; y < n; ++y) {
      a.op0[x * n + y] = (x + y) % n;
      a.op1[x * n + y] = (x * y) % n;
    }
  }
  return a;
}

Algebra poly_quotient(int p, const std::vector<int>& modulus) {
  int m = static_cast<int>(modulus.size()) - 1;
  if (m < 1 || modulus.back() != 1) throw category_error("modulus must be monic of degree >= 1");
  int n = 1;
  for (int i = 0; i < m; ++i) n *= p;
  auto decode = [&](int x) {
    std::vector<int> c(m);
    for (int i = 0; i < m; ++i, x /= p) c[i] = x % p;
    return c;
  };
  auto encode = [&](const std::vector<int>& c) {
    int x = 0;
    for (int i = m - 1; i >= 0; --i) x = x * p + ((c[i] % p) + p) % p;
    return x;
  };
  Algebra a;
  a.theory = Theory::Ring;
  a.n = n;
  a.c0 = 0;
  a.c1 = 1 % n;
  a.un.resize(n);
  a.op0.resize(n * n);
  a.op1.resize(n * n);
  for (int x = 0; x < n; ++x) {
    auto cx = decode(x);
    std::vector<int> ng(m);
    for (int i = 0; i < m; ++i) ng[i] = p - cx[i];
    a.un[x] = encode(ng);
    for (int y = 0; y < n; ++y) {
      auto cy = decode(y);
      std::vector<int> s(m);
      for (int i = 0; i < m; ++i) s[i] = cx[i] + cy[i];
      a.op0[x * n + y] = encode(s);
      std::vector<int> pr(2 * m, 0);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) pr[i + j] = (pr[i + j] + cx[i] * cy[j]) % p;
      for (int d = 2 * m - 1; d >= m; --d) {
        int c = pr[d];
        if (!c) continue;
        for (int i = 0; i <= m; ++i) pr[d - m + i] = ((pr[d - m + i] - c * modulus[i]) % p + p) % p;
      }
      pr.resize(m);
      a.op1[x * n + y] = encode(pr);
    }
  }
  return a;
}

Algebra algebra_product(Theory t, const std::vector<const Algebra*>& fs) {
  int k = static_cast<int>(fs.size());
  int n = 1;
  for (auto* f : fs) n *= f->n;
  auto decode = [&](int x) {
    std::vector<int> c(k);
    for (int i = k - 1; i >= 0; --i) {
      c[i] = x % fs[i]->n;
      x /= fs[i]->n;
    }
    return c;
  };
  auto encode = [&](const std::vector<int>& c) {
    int x = 0;
    for (int i = 0; i < k; ++i) x = x * fs[i]->n + c[i];
    return x;
  };
  Algebra a;
  a.theory = t;
  a.n = n;
  std::vector<int> c0(k), c1(k);
  for (int i = 0; i < k; ++i) {
    c0[i] = fs[i]->c0;
    c1[i] = fs[i]->c1;
  }
  a.c0 = encode(c0);
  a.c1 = encode(c1);
  a.un.resize(n);
  a.op0.resize(static_cast<size_t>(n) * n);
  a.op1.resize(static_cast<size_t>(n) * n);
  std::vector<std::vector<int>> dec(n);
  for (int x = 0; x < n; ++x) dec[x] = decode(x);
  std::vector<int> t0(k), t1(k);
  for (int x = 0; x < n; ++x) {
    for (int i = 0; i < k; ++i) t0[i] = fs[i]->un[dec[x][i]];
    a.un[x] = encode(t0);
    for (int y = 0; y < n; ++y) {
      for (int i = 0; i < k; ++i) {
        t0[i] = fs[i]->op0[dec[x][i] * fs[i]->n + dec[y][i]];
        t1[i] = fs[i]->op1[dec[x][i] * fs[i]->n + dec[y][i]];
      }
      a.op0[x * n + y] = encode(t0);
      a.op1[x * n + y] = encode(t1);
    }
  }
  return a;
}

Algebra ring_product(const std::vector<Algebra>& factors) {
  std::vector<const Algebra*> p;
  for (const auto& f : factors) p.push_back(&f);
  return algebra_product(Theory::Ring, p);
}

Algebra boolean_power(int k) {
  if (k < 0 || k > 6) throw category_error("2^k supported for 0 <= k <= 6");
  int n = 1 << k;
  Algebra a;
  a.theory = Theory::Boolean;
  a.n = n;
  a.c0 = 0;
  a.c1 = n - 1;
  a.un.resize(n);
  a.op0.resize(n * n);
  a.op1.resize(n * n);
  for (int x = 0; x < n; ++x) {
    a.un[x] = (n - 1) & ~x;
    for (int y = 0; y < n; ++y) {
      a.op0[x * n + y] = x & y;
      a.op1[x * n + y] = x | y;
    }
  }
  return a;
}

bool check_axioms(const Algebra& a, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  int n = a.n;
  if (n < 1) return fail("empty carrier");
  if (static_cast<int>(a.un.size()) != n || static_cast<int>(a.op0.size()) != n * n ||
      static_cast<int>(a.op1.size()) != n * n)
    return fail("table sizes do not match carrier");
  for (int v : a.un)
    if (v < 0 || v >= n) return fail("value out of range");
  for (int v : a.op0)
    if (v < 0 || v >= n) return fail("value out of range");
  for (int v : a.op1)
    if (v < 0 || v >= n) return fail("value out of range");
  for (int k = 0; k < 2; ++k)
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (a.bin(k, x, y) != a.bin(k, y, x)) return fail("operation not commutative");
        for (int z = 0; z < n; ++z)
          if (a.bin(k, a.bin(k, x, y), z) != a.bin(k, x, a.bin(k, y, z)))
            return fail("operation not associative");
      }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        if (a.mul(x, a.add(y, z)) != a.add(a.mul(x, y), a.mul(x, z))) return fail("not distributive");
  if (a.theory == Theory::Ring) {
    for (int x = 0; x < n; ++x) {
      if (a.add(x, a.c0) != x) return fail("0 is not additive identity");
      if (a.mul(x, a.c1) != x) return fail("1 is not multiplicative identity");
      if (a.add(x, a.un[x]) != a.c0) return fail("negation is not additive inverse");
    }
  } else {
    for (int x = 0; x < n; ++x) {
      if (a.mul(x, a.c0) != x || a.add(x, a.c1) != x) return fail("bounds are not identities");
      if (a.add(x, a.un[x]) != a.c0 || a.mul(x, a.un[x]) != a.c1) return fail("complement law fails");
      for (int y = 0; y < n; ++y)
        if (a.add(x, a.mul(x, y)) != x) return fail("absorption fails");
    }
  }
  return true;
}

bool is_hom(const Algebra& a, const Algebra& b, const ElementMap& f) {
  if (static_cast<int>(f.size()) != a.n) return false;
  for (int v : f)
    if (v < 0 || v >= b.n) return false;
  if (f[a.c0] != b.c0 || f[a.c1] != b.c1) return false;
  for (int x = 0; x < a.n; ++x) {
    if (f[a.un[x]] != b.un[f[x]]) return false;
    for (int y = 0; y < a.n; ++y)
      for (int k = 0; k < 2; ++k)
        if (f[a.bin(k, x, y)] != b.bin(k, f[x], f[y])) return false;
  }
  return true;
}

std::vector<int> subalgebra(const Algebra& a, const std::vector<int>& gens) {
  std::vector<char> in(a.n, 0);
  std::vector<int> done, queue;
  auto add = [&](int x) {
    if (!in[x]) {
      in[x] = 1;
      queue.push_back(x);
    }
  };
  add(a.c0);
  add(a.c1);
  for (int g : gens) add(g);
  while (!queue.empty()) {
    int x = queue.back();
    queue.pop_back();
    done.push_back(x);
    add(a.un[x]);
    for (int y : done)
      for (int k = 0; k < 2; ++k) {
        add(a.bin(k, x, y));
        add(a.bin(k, y, x));
      }
  }
  std::sort(done.begin(), done.end());
  return done;
}

std::vector<int> generating_set(const Algebra& a) {
  std::vector<int> gens;
  std::vector<char> in(a.n, 0);
  for (int x : subalgebra(a, gens)) in[x] = 1;
  for (int x = 0; x < a.n; ++x) {
    if (in[x]) continue;
    gens.push_back(x);
    for (int y : subalgebra(a, gens)) in[y] = 1;
  }
  return gens;
}

namespace {

// Propagates a partial map along all operations; false on a clash.
bool propagate(const Algebra& a, const Algebra& b, ElementMap& f, std::vector<int>& done,
               std::vector<int> queue) {
  auto set = [&](int x, int v) {
    if (f[x] < 0) {
      f[x] = v;
      queue.push_back(x);
      return true;
    }
    return f[x] == v;
  };
  while (!queue.empty()) {
    int x = queue.back();
    queue.pop_back();
    done.push_back(x);
    if (!set(a.un[x], b.un[f[x]])) return false;
    for (int y : done)
      for (int k = 0; k < 2; ++k) {
        if (!set(a.bin(k, x, y), b.bin(k, f[x], f[y]))) return false;
        if (!set(a.bin(k, y, x), b.bin(k, f[y], f[x]))) return false;
      }
  }
  return true;
}

}  // namespace

std::vector<ElementMap> all_homs(const Algebra& a, const Algebra& b) {
  std::vector<ElementMap> out;
  auto gens = generating_set(a);
  ElementMap f(a.n, -1);
  std::vector<int> done;
  f[a.c0] = b.c0;
  std::vector<int> q{a.c0};
  if (a.c1 != a.c0) {
    f[a.c1] = b.c1;
    q.push_back(a.c1);
  } else if (b.c1 != b.c0) {
    return out;
  }
  if (!propagate(a, b, f, done, q)) return out;
  std::function<void(size_t, ElementMap&, std::vector<int>&)> rec = [&](size_t i, ElementMap& g,
                                                                        std::vector<int>& dn) {
    while (i < gens.size() && g[gens[i]] >= 0) ++i;
    if (i == gens.size()) {
      out.push_back(g);
      return;
    }
    for (int v = 0; v < b.n; ++v) {
      ElementMap h = g;
      std::vector<int> d2 = dn;
      h[gens[i]] = v;
      if (propagate(a, b, h, d2, {gens[i]})) rec(i + 1, h, d2);
    }
  };
  rec(0, f, done);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a < b) std::swap(a, b);
    p[a] = b;
    return true;
  }
};

}  // namespace

std::vector<int> congruence_closure(const Algebra& a, const std::vector<std::pair<int, int>>& pairs) {
  UnionFind uf(a.n);
  for (auto [x, y] : pairs) uf.unite(x, y);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int x = 0; x < a.n; ++x) {
      int r = uf.find(x);
      if (r == x) continue;
      changed |= uf.unite(a.un[x], a.un[r]);
      for (int y = 0; y < a.n; ++y)
        for (int k = 0; k < 2; ++k) changed |= uf.unite(a.bin(k, x, y), a.bin(k, r, y));
    }
  }
  std::vector<int> label(a.n, -1), root_label(a.n, -1);
  int next = 0;
  for (int x = 0; x < a.n; ++x) {
    int r = uf.find(x);
    if (root_label[r] < 0) root_label[r] = next++;
    label[x] = root_label[r];
  }
  return label;
}

Algebra quotient(const Algebra& a, const std::vector<int>& labels) {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  std::vector<int> rep(k, -1);
  for (int x = 0; x < a.n; ++x)
    if (rep[labels[x]] < 0) rep[labels[x]] = x;
  Algebra q;
  q.theory = a.theory;
  q.n = k;
  q.c0 = labels[a.c0];
  q.c1 = labels[a.c1];
  q.un.resize(k);
  q.op0.resize(k * k);
  q.op1.resize(k * k);
  for (int x = 0; x < k; ++x) {
    q.un[x] = labels[a.un[rep[x]]];
    for (int y = 0; y < k; ++y) {
      q.op0[x * k + y] = labels[a.add(rep[x], rep[y])];
      q.op1[x * k + y] = labels[a.mul(rep[x], rep[y])];
    }
  }
  return q;
}

bool is_unit(const Algebra& r, int x) {
  for (int y = 0; y < r.n; ++y)
    if (r.mul(x, y) == r.c1) return true;
  return false;
}

bool is_local_ring(const Algebra& r) {
  if (r.theory != Theory::Ring || r.n < 2) return false;
  std::vector<int> nonunits;
  for (int x = 0; x < r.n; ++x)
    if (!is_unit(r, x)) nonunits.push_back(x);
  for (int x : nonunits)
    for (int y : nonunits)
      if (is_unit(r, r.add(x, y))) return false;
  return true;
}

std::vector<int> idempotents(const Algebra& r) {
  std::vector<int> out;
  for (int x = 0; x < r.n; ++x)
    if (r.mul(x, x) == x) out.push_back(x);
  return out;
}

std::vector<int> primitive_idempotents(const Algebra& r) {
  auto es = idempotents(r);
  std::vector<int> out;
  for (int e : es) {
    if (e == r.c0) continue;
    bool prim = true;
    for (int f : es)
      if (f != r.c0 && f != e && r.mul(f, e) == f) prim = false;
    if (prim) out.push_back(e);
  }
  return out;
}

std::vector<int> boolean_atoms(const Algebra& b) {
  std::vector<int> out;
  for (int x = 0; x < b.n; ++x) {
    if (x == b.c0) continue;
    bool atom = true;
    for (int y = 0; y < b.n; ++y)
      if (y != b.c0 && y != x && b.add(x, y) == y) atom = false;
    if (atom) out.push_back(x);
  }
  return out;
}

namespace {

int smallest_prime(int n) {
  for (int p = 2; p * p <= n; ++p)
    if (n % p == 0) return p;
  return n;
}

struct KnownLocal {
  std::string name;
  Algebra alg;
};

const std::vector<KnownLocal>& known_noncyclic() {
  static const std::vector<KnownLocal> v = {
      {"F_4", poly_quotient(2, {1, 1, 1})},   {"F_8", poly_quotient(2, {1, 1, 0, 1})},
      {"F_9", poly_quotient(3, {1, 0, 1})},   {"F_2[e]", poly_quotient(2, {0, 0, 1})},
      {"F_3[e]", poly_quotient(3, {0, 0, 1})},
  };
  return v;
}

bool is_iso_map(const Algebra& a, const Algebra& b, const ElementMap& f) {
  if (a.n != b.n) return false;
  std::vector<char> hit(b.n, 0);
  for (int v : f) hit[v] = 1;
  return std::all_of(hit.begin(), hit.end(), [](char c) { return c; });
}

struct Factor {
  std::string name;
  Algebra alg;
  ElementMap from;  // element of the parent ring (restricted to e*R) -> factor element
  int prime;
};

}  // namespace

NormalForm normalize(const Algebra& a) {
  NormalForm nf;
  if (a.theory == Theory::Boolean) {
    auto atoms = boolean_atoms(a);
    int k = static_cast<int>(atoms.size());
    nf.alg = boolean_power(k);
    nf.iso.resize(a.n);
    for (int x = 0; x < a.n; ++x) {
      int m = 0;
      for (int i = 0; i < k; ++i)
        if (a.mul(atoms[i], x) == x || a.add(atoms[i], x) == atoms[i]) m |= (1 << i);
      nf.iso[x] = m;
    }
    nf.name = k == 0 ? "1" : k == 1 ? "2" : "2^" + std::to_string(k);
    return nf;
  }
  std::vector<Factor> fs;
  // descending index puts the first factor of a product first
  auto prims = primitive_idempotents(a);
  std::reverse(prims.begin(), prims.end());
  for (int e : prims) {
    std::vector<int> els;
    for (int r = 0; r < a.n; ++r) els.push_back(a.mul(e, r));
    std::sort(els.begin(), els.end());
    els.erase(std::unique(els.begin(), els.end()), els.end());
    int m = static_cast<int>(els.size());
    std::vector<int> pos(a.n, -1);
    for (int i = 0; i < m; ++i) pos[els[i]] = i;
    int ch = 1;
    for (int s = e; s != a.c0; s = a.add(s, e)) ++ch;
    Factor f;
    f.prime = smallest_prime(m);
    f.from.assign(a.n, -1);
    if (ch == m) {
      f.alg = ring_cyclic(m);
      f.name = "Z/" + std::to_string(m);
      int s = a.c0;
      for (int k = 0; k < m; ++k, s = a.add(s, e)) f.from[s] = k;
    } else {
      Algebra loc;
      loc.theory = Theory::Ring;
      loc.n = m;
      loc.c0 = pos[a.c0];
      loc.c1 = pos[e];
      loc.un.resize(m);
      loc.op0.resize(m * m);
      loc.op1.resize(m * m);
      for (int i = 0; i < m; ++i) {
        loc.un[i] = pos[a.un[els[i]]];
        for (int j = 0; j < m; ++j) {
          loc.op0[i * m + j] = pos[a.add(els[i], els[j])];
          loc.op1[i * m + j] = pos[a.mul(els[i], els[j])];
        }
      }
      f.alg = loc;
      f.name = "L" + std::to_string(m) + "c" + std::to_string(ch);
      ElementMap to(m);
      std::iota(to.begin(), to.end(), 0);
      for (const auto& kn : known_noncyclic()) {
        if (kn.alg.n != m) continue;
        for (const auto& h : all_homs(loc, kn.alg))
          if (is_iso_map(loc, kn.alg, h)) {
            f.alg = kn.alg;
            f.name = kn.name;
            to = h;
            break;
          }
        if (f.name == kn.name) break;
      }
      for (int i = 0; i < m; ++i) f.from[els[i]] = to[i];
    }
    for (int r = 0; r < a.n; ++r) f.from[r] = f.from[a.mul(e, r)];
    fs.push_back(std::move(f));
  }
  std::stable_sort(fs.begin(), fs.end(), [](const Factor& x, const Factor& y) {
    if (x.prime != y.prime) return x.prime < y.prime;
    if (x.alg.n != y.alg.n) return x.alg.n > y.alg.n;
    return x.name < y.name;
  });
  std::vector<const Algebra*> ps;
  for (const auto& f : fs) ps.push_back(&f.alg);
  nf.alg = algebra_product(Theory::Ring, ps);
  nf.iso.resize(a.n);
  for (int r = 0; r < a.n; ++r) {
    int x = 0;
    for (const auto& f : fs) x = x * f.alg.n + f.from[r];
    nf.iso[r] = x;
  }
  for (const auto& f : fs) {
    nf.factors.push_back(f.alg);
    nf.factor_names.push_back(f.name);
  }
  if (fs.empty()) nf.name = "0";
  for (size_t i = 0; i < fs.size(); ++i) nf.name += (i ? "x" : "") + fs[i].name;
  return nf;
}

// ---------------------------------------------------------------------------

AlgCategory::AlgCategory(Theory t) : theory_(t) {}

std::string AlgCategory::name() const { return theory_ == Theory::Ring ? "CRing_fin" : "Bool_fin"; }

Obj AlgCategory::intern(const Algebra& a, const std::string& name) const {
  if (a.theory != theory_) throw category_error("algebra of the wrong theory");
  std::lock_guard<std::recursive_mutex> lock(mu_);
  std::string k = a.key();
  auto it = obj_index_.find(k);
  if (it != obj_index_.end()) return it->second;
  Obj o = static_cast<Obj>(algs_.size());
  algs_.push_back(a);
  names_.push_back(name);
  obj_index_.emplace(k, o);
  return o;
}

std::pair<Obj, ElementMap> AlgCategory::intern_normal(const Algebra& a) const {
  NormalForm nf = normalize(a);
  Obj o = intern(nf.alg, nf.name);
  return {o, nf.iso};
}

Mor AlgCategory::intern_mor(Obj d, Obj c, const ElementMap& map) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  ElementMap k;
  k.reserve(map.size() + 2);
  k.push_back(d);
  k.push_back(c);
  k.insert(k.end(), map.begin(), map.end());
  auto it = mor_index_.find(k);
  if (it != mor_index_.end()) return it->second;
  if (static_cast<int>(map.size()) != algs_.at(d).n) throw category_error("map has wrong domain size");
  Mor m = static_cast<Mor>(mors_.size());
  mors_.push_back({d, c, map});
  mor_index_.emplace(k, m);
  return m;
}

const Algebra& AlgCategory::alg(Obj o) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  return algs_.at(o);
}

const ElementMap& AlgCategory::map(Mor m) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  return mors_.at(m).map;
}

bool AlgCategory::surjective(Mor m) const {
  std::vector<char> hit(alg(cod(m)).n, 0);
  for (int v : map(m)) hit[v] = 1;
  return std::all_of(hit.begin(), hit.end(), [](char c) { return c; });
}

bool AlgCategory::injective(Mor m) const {
  std::vector<char> hit(alg(cod(m)).n, 0);
  for (int v : map(m)) {
    if (hit[v]) return false;
    hit[v] = 1;
  }
  return true;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(' '), e = s.find_last_not_of(' ');
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

bool is_prime(int n) { return n >= 2 && smallest_prime(n) == n; }

Algebra parse_ring_factor(const std::string& t) {
  if (t.rfind("Z/", 0) == 0) {
    int n = std::stoi(t.substr(2));
    if (n < 2) throw category_error("bad factor " + t);
    return ring_cyclic(n);
  }
  if (t.rfind("F_", 0) == 0) {
    for (const auto& kn : known_noncyclic())
      if (kn.name == t) return kn.alg;
    int q = std::stoi(t.substr(2));
    if (is_prime(q)) return ring_cyclic(q);
  }
  throw category_error("unknown ring factor '" + t + "'");
}

}  // namespace

Obj AlgCategory::parse(const std::string& raw) const {
  std::string s = trim(raw);
  if (theory_ == Theory::Boolean) {
    int k;
    if (s == "1")
      k = 0;
    else if (s == "2")
      k = 1;
    else if (s.rfind("2^", 0) == 0)
      k = std::stoi(s.substr(2));
    else
      throw category_error("unknown Boolean algebra '" + s + "'");
    Algebra a = boolean_power(k);
    return intern(a, k == 0 ? "1" : k == 1 ? "2" : "2^" + std::to_string(k));
  }
  if (s == "0") return intern(ring_product({}), "0");
  std::vector<Algebra> fs;
  size_t start = 0;
  while (true) {
    size_t p = s.find('x', start);
    fs.push_back(parse_ring_factor(trim(s.substr(start, p - start))));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return intern(fs.size() == 1 ? fs[0] : ring_product(fs), s);
}

Mor AlgCategory::normal_iso(Obj o) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  auto it = normal_cache_.find(o);
  if (it != normal_cache_.end()) return it->second;
  auto [n, iso] = intern_normal(alg(o));
  Mor m = intern_mor(o, n, iso);
  normal_cache_[o] = m;
  return m;
}

std::vector<Obj> AlgCategory::objects() const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  std::vector<Obj> v(algs_.size());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::string AlgCategory::obj_name(Obj o) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  return names_.at(o);
}

std::string AlgCategory::mor_name(Mor m) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  const auto& r = mors_.at(m);
  std::ostringstream s;
  s << names_[r.dom] << "->" << names_[r.cod] << '[';
  for (size_t i = 0; i < r.map.size(); ++i) s << (i ? "," : "") << r.map[i];
  s << ']';
  return s.str();
}

Obj AlgCategory::dom(Mor m) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  return mors_.at(m).dom;
}

Obj AlgCategory::cod(Mor m) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  return mors_.at(m).cod;
}

Mor AlgCategory::id(Obj o) const {
  ElementMap e(alg(o).n);
  std::iota(e.begin(), e.end(), 0);
  return intern_mor(o, o, e);
}

Mor AlgCategory::compose(Mor g, Mor f) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  auto hit = compose_cache_.find({g, f});
  if (hit != compose_cache_.end()) return hit->second;
  if (cod(f) != dom(g)) throw category_error("non-composable pair " + mor_name(g) + "," + mor_name(f));
  const auto& fm = mors_.at(f).map;
  const auto& gm = mors_.at(g).map;
  ElementMap h(fm.size());
  for (size_t i = 0; i < fm.size(); ++i) h[i] = gm[fm[i]];
  Mor r = intern_mor(dom(f), cod(g), h);
  compose_cache_.emplace(std::make_pair(g, f), r);
  return r;
}

std::optional<Mor> AlgCategory::invert(Mor m) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  const auto& f = mors_.at(m).map;
  Obj x = dom(m), y = cod(m);
  if (algs_.at(x).n != algs_.at(y).n) return std::nullopt;
  ElementMap g(f.size(), -1);
  for (size_t i = 0; i < f.size(); ++i) {
    if (g[f[i]] >= 0) return std::nullopt;
    g[f[i]] = static_cast<int>(i);
  }
  return intern_mor(y, x, g);
}

std::vector<Mor> AlgCategory::extensions(Mor n, Mor f) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  if (dom(n) != dom(f)) return {};
  const auto& nm = mors_.at(n).map;
  const auto& fm = mors_.at(f).map;
  ElementMap k(algs_.at(cod(n)).n, -1);
  for (size_t i = 0; i < nm.size(); ++i) {
    if (k[nm[i]] >= 0 && k[nm[i]] != fm[i]) return {};
    k[nm[i]] = fm[i];
  }
  if (std::find(k.begin(), k.end(), -1) != k.end()) return Category::extensions(n, f);
  return {intern_mor(cod(n), cod(f), k)};
}

std::optional<Mor> AlgCategory::iso_between(Obj x, Obj y) const {
  if (alg(x).n != alg(y).n) return std::nullopt;
  Mor nx = normal_iso(x), ny = normal_iso(y);
  if (cod(nx) == cod(ny)) return compose(*invert(ny), nx);
  return Category::iso_between(x, y);
}

const std::vector<Mor>& AlgCategory::hom(Obj x, Obj y) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  auto it = homs_.find({x, y});
  if (it != homs_.end()) return it->second;
  std::vector<Mor> v;
  for (const auto& h : all_homs(alg(x), alg(y))) v.push_back(intern_mor(x, y, h));
  return homs_.emplace(std::make_pair(x, y), std::move(v)).first->second;
}

namespace {

ElementMap compose_maps(const ElementMap& g, const ElementMap& f) {
  ElementMap h(f.size());
  for (size_t i = 0; i < f.size(); ++i) h[i] = g[f[i]];
  return h;
}

bool onto(const ElementMap& f, int n) {
  std::vector<char> hit(n, 0);
  for (int v : f) hit[v] = 1;
  return std::all_of(hit.begin(), hit.end(), [](char c) { return c; });
}

std::vector<int> preimages(const ElementMap& f, int n) {
  std::vector<int> pre(n, -1);
  for (int i = 0; i < static_cast<int>(f.size()); ++i)
    if (pre[f[i]] < 0) pre[f[i]] = i;
  return pre;
}

}  // namespace

std::optional<Cocone> AlgCategory::colimit(const Diagram& d) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  size_t k = d.nodes.size();
  if (k == 0) {
    if (theory_ == Theory::Ring) return std::nullopt;
    return Cocone{intern_normal(boolean_power(1)).first, {}};
  }
  for (size_t s = 0; s < k; ++s) {
    std::vector<std::optional<ElementMap>> q(k);
    ElementMap ids(alg(d.nodes[s]).n);
    std::iota(ids.begin(), ids.end(), 0);
    q[s] = ids;
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& e : d.edges)
        if (q[e.src] && !q[e.dst]) {
          q[e.dst] = compose_maps(map(e.mor), *q[e.src]);
          grew = true;
        }
    }
    bool ok = true;
    for (size_t j = 0; j < k && ok; ++j) ok = q[j] && onto(*q[j], alg(d.nodes[j]).n);
    if (!ok) continue;
    const Algebra& cs = alg(d.nodes[s]);
    std::vector<std::vector<int>> pre(k);
    std::vector<std::pair<int, int>> pairs;
    for (size_t j = 0; j < k; ++j) {
      pre[j] = preimages(*q[j], alg(d.nodes[j]).n);
      for (int c = 0; c < cs.n; ++c) pairs.emplace_back(c, pre[j][(*q[j])[c]]);
    }
    for (const auto& e : d.edges) {
      const auto& em = map(e.mor);
      for (int c = 0; c < cs.n; ++c) pairs.emplace_back(c, pre[e.dst][em[(*q[e.src])[c]]]);
    }
    auto labels = congruence_closure(cs, pairs);
    auto [apex, iso] = intern_normal(quotient(cs, labels));
    Cocone cc{apex, {}};
    for (size_t j = 0; j < k; ++j) {
      ElementMap leg(alg(d.nodes[j]).n);
      for (size_t y = 0; y < leg.size(); ++y) leg[y] = iso[labels[pre[j][y]]];
      cc.legs.push_back(intern_mor(d.nodes[j], apex, leg));
    }
    return cc;
  }
  // A node every path ends in, with all parallel paths equal.
  for (size_t t = 0; t < k; ++t) {
    std::vector<std::set<ElementMap>> paths(k);
    ElementMap ids(alg(d.nodes[t]).n);
    std::iota(ids.begin(), ids.end(), 0);
    paths[t].insert(ids);
    bool bad = false;
    for (bool grew = true; grew && !bad;) {
      grew = false;
      for (const auto& e : d.edges) {
        std::vector<ElementMap> add;
        for (const auto& p : paths[e.dst]) add.push_back(compose_maps(p, map(e.mor)));
        for (auto& p : add)
          if (paths[e.src].insert(p).second) grew = true;
        if (paths[e.src].size() > 1) bad = true;
      }
    }
    if (bad) continue;
    bool all = true;
    for (size_t i = 0; i < k; ++i) all = all && paths[i].size() == 1;
    if (!all) continue;
    Cocone cc{d.nodes[t], {}};
    for (size_t i = 0; i < k; ++i) cc.legs.push_back(intern_mor(d.nodes[i], d.nodes[t], *paths[i].begin()));
    return cc;
  }
  return std::nullopt;
}

std::optional<Cone> AlgCategory::limit(const Diagram& d) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  size_t k = d.nodes.size();
  // node order: forced coordinates come right after their sources
  std::vector<int> order;
  std::vector<char> placed(k, 0);
  while (order.size() < k) {
    int pick = -1;
    for (const auto& e : d.edges)
      if (placed[e.src] && !placed[e.dst]) {
        pick = e.dst;
        break;
      }
    if (pick < 0)
      for (size_t i = 0; i < k; ++i)
        if (!placed[i]) {
          pick = static_cast<int>(i);
          break;
        }
    placed[pick] = 1;
    order.push_back(pick);
  }
  std::vector<int> rank(k);
  for (size_t i = 0; i < k; ++i) rank[order[i]] = static_cast<int>(i);
  std::vector<const ElementMap*> emap;
  for (const auto& e : d.edges) emap.push_back(&map(e.mor));
  std::vector<std::vector<int>> tuples;
  std::vector<int> t(k, -1);
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == k) {
      tuples.push_back(t);
      return;
    }
    int node = order[i];
    int forced = -1;
    for (size_t ei = 0; ei < d.edges.size(); ++ei) {
      const auto& e = d.edges[ei];
      if (e.dst == node && rank[e.src] < static_cast<int>(i)) {
        forced = (*emap[ei])[t[e.src]];
        break;
      }
    }
    int lo = forced >= 0 ? forced : 0, hi = forced >= 0 ? forced + 1 : alg(d.nodes[node]).n;
    for (int v = lo; v < hi; ++v) {
      t[node] = v;
      bool ok = true;
      for (size_t ei = 0; ei < d.edges.size() && ok; ++ei) {
        const auto& e = d.edges[ei];
        if (rank[e.src] <= static_cast<int>(i) && rank[e.dst] <= static_cast<int>(i) &&
            (e.src == node || e.dst == node))
          ok = (*emap[ei])[t[e.src]] == t[e.dst];
      }
      if (ok) rec(i + 1);
    }
    t[node] = -1;
  };
  rec(0);
  int m = static_cast<int>(tuples.size());
  std::map<std::vector<int>, int> index;
  for (int i = 0; i < m; ++i) index[tuples[i]] = i;
  auto lookup = [&](const std::vector<int>& v) {
    auto it = index.find(v);
    if (it == index.end()) throw category_error("limit tuples not closed");
    return it->second;
  };
  Algebra l;
  l.theory = theory_;
  l.n = m;
  std::vector<int> c(k);
  for (size_t i = 0; i < k; ++i) c[i] = alg(d.nodes[i]).c0;
  l.c0 = lookup(c);
  for (size_t i = 0; i < k; ++i) c[i] = alg(d.nodes[i]).c1;
  l.c1 = lookup(c);
  l.un.resize(m);
  l.op0.resize(static_cast<size_t>(m) * m);
  l.op1.resize(static_cast<size_t>(m) * m);
  for (int x = 0; x < m; ++x) {
    for (size_t i = 0; i < k; ++i) c[i] = alg(d.nodes[i]).un[tuples[x][i]];
    l.un[x] = lookup(c);
    for (int y = 0; y < m; ++y) {
      for (size_t i = 0; i < k; ++i) c[i] = alg(d.nodes[i]).add(tuples[x][i], tuples[y][i]);
      l.op0[x * m + y] = lookup(c);
      for (size_t i = 0; i < k; ++i) c[i] = alg(d.nodes[i]).mul(tuples[x][i], tuples[y][i]);
      l.op1[x * m + y] = lookup(c);
    }
  }
  auto [apex, iso] = intern_normal(l);
  std::vector<int> inv(m);
  for (int x = 0; x < m; ++x) inv[iso[x]] = x;
  Cone cn{apex, {}};
  for (size_t i = 0; i < k; ++i) {
    ElementMap leg(m);
    for (int z = 0; z < m; ++z) leg[z] = tuples[inv[z]][i];
    cn.legs.push_back(intern_mor(apex, d.nodes[i], leg));
  }
  return cn;
}

std::optional<Cocone> AlgCategory::pushout(Mor f, Mor g) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  if (dom(f) != dom(g)) throw category_error("pushout of a non-span");
  bool swap = false;
  if (!surjective(f)) {
    if (!surjective(g)) return Category::pushout(f, g);
    std::swap(f, g);
    swap = true;
  }
  const ElementMap& fm = map(f);
  const ElementMap& gm = map(g);
  Obj cf = cod(f), cg = cod(g);
  auto pre = preimages(fm, alg(cf).n);
  std::vector<std::pair<int, int>> pairs;
  for (size_t b = 0; b < fm.size(); ++b) pairs.emplace_back(gm[b], gm[pre[fm[b]]]);
  auto labels = congruence_closure(alg(cg), pairs);
  auto [apex, iso] = intern_normal(quotient(alg(cg), labels));
  ElementMap lg(alg(cg).n), lf(alg(cf).n);
  for (size_t y = 0; y < lg.size(); ++y) lg[y] = iso[labels[y]];
  for (size_t x = 0; x < lf.size(); ++x) lf[x] = lg[gm[pre[x]]];
  Mor mf = intern_mor(cf, apex, lf), mg = intern_mor(cg, apex, lg);
  if (swap) return Cocone{apex, {mg, mf}};
  return Cocone{apex, {mf, mg}};
}

std::optional<Mor> AlgCategory::mediate_colimit(const Diagram& d, const Cocone& colim,
                                                const Cocone& other) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  for (size_t i = 0; i < d.nodes.size(); ++i) {
    if (!surjective(colim.legs[i])) continue;
    const Algebra& L = alg(colim.apex);
    auto pre = preimages(map(colim.legs[i]), L.n);
    const auto& oi = map(other.legs[i]);
    ElementMap m(L.n);
    for (int y = 0; y < L.n; ++y) m[y] = oi[pre[y]];
    if (!is_hom(L, alg(other.apex), m)) return std::nullopt;
    Mor r = intern_mor(colim.apex, other.apex, m);
    for (size_t j = 0; j < d.nodes.size(); ++j)
      if (compose(r, colim.legs[j]) != other.legs[j]) return std::nullopt;
    return r;
  }
  if (d.nodes.empty()) {
    const auto& h = hom(colim.apex, other.apex);
    if (h.size() == 1) return h[0];
    return std::nullopt;
  }
  return Category::mediate_colimit(d, colim, other);
}

std::optional<Mor> AlgCategory::mediate_limit(const Diagram& d, const Cone& lim,
                                              const Cone& other) const {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  ElementMap key{lim.apex, other.apex};
  key.insert(key.end(), lim.legs.begin(), lim.legs.end());
  key.insert(key.end(), other.legs.begin(), other.legs.end());
  if (auto it = mediate_cache_.find(key); it != mediate_cache_.end()) {
    if (it->second == -2) return Category::mediate_limit(d, lim, other);
    if (it->second < 0) return std::nullopt;
    return it->second;
  }
  auto remember = [&](Mor r) {
    mediate_cache_.emplace(key, r);
    return r;
  };
  size_t k = d.nodes.size();
  const Algebra& L = alg(lim.apex);
  const Algebra& Z = alg(other.apex);
  uint64_t radix = 1;
  for (Obj o : d.nodes)
    if (__builtin_mul_overflow(radix, static_cast<uint64_t>(algs_.at(o).n), &radix)) {
      remember(-2);
      return Category::mediate_limit(d, lim, other);
    }
  // tuples of leg values, encoded in mixed radix over the node sizes
  auto code = [&](const std::vector<Mor>& legs, int x) {
    uint64_t c = 0;
    for (size_t i = 0; i < k; ++i) c = c * static_cast<uint64_t>(algs_.at(d.nodes[i]).n) + mors_.at(legs[i]).map[x];
    return c;
  };
  std::unordered_map<uint64_t, int> index;
  index.reserve(L.n);
  for (int x = 0; x < L.n; ++x)
    if (!index.emplace(code(lim.legs, x), x).second) {
      remember(-2);
      return Category::mediate_limit(d, lim, other);
    }
  ElementMap m(Z.n);
  for (int z = 0; z < Z.n; ++z) {
    auto it = index.find(code(other.legs, z));
    if (it == index.end()) return remember(-1), std::nullopt;
    m[z] = it->second;
  }
  if (!is_hom(Z, L, m)) return remember(-1), std::nullopt;
  return remember(intern_mor(other.apex, lim.apex, m));
}

json AlgCategory::mor_json(Mor m) const {
  return json{{"dom", obj_name(dom(m))}, {"cod", obj_name(cod(m))}, {"map", map(m)}};
}

json AlgCategory::obj_json(Obj o) const {
  return json{{"name", obj_name(o)}, {"size", alg(o).n}};
}

// ---------------------------------------------------------------------------

SubCategory::SubCategory(const Category& parent, std::string name, std::vector<Obj> objs, MorPred keep)
    : parent_(parent), name_(std::move(name)), objs_(std::move(objs)), keep_(std::move(keep)) {}

void SubCategory::add_object(Obj o) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (std::find(objs_.begin(), objs_.end(), o) == objs_.end()) objs_.push_back(o);
}

bool SubCategory::contains(Obj o) const {
  std::lock_guard<std::mutex> lock(mu_);
  return std::find(objs_.begin(), objs_.end(), o) != objs_.end();
}

std::vector<Obj> SubCategory::objects() const {
  std::lock_guard<std::mutex> lock(mu_);
  return objs_;
}

const std::vector<Mor>& SubCategory::hom(Obj x, Obj y) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = homs_.find({x, y});
    if (it != homs_.end()) return it->second;
  }
  std::vector<Mor> v;
  for (Mor m : parent_.hom(x, y))
    if (!keep_ || keep_(m)) v.push_back(m);
  std::lock_guard<std::mutex> lock(mu_);
  return homs_.emplace(std::make_pair(x, y), std::move(v)).first->second;
}

}  // namespace diers
