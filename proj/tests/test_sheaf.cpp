#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "diers/algebra.hpp"
#include "diers/sheaf.hpp"

using namespace diers;

namespace {

struct Rings {
  AlgCategory c{Theory::Ring};
  Obj operator()(const std::string& s) const { return c.parse(s); }
  Mor only(Obj x, Obj y) const {
    const auto& h = c.hom(x, y);
    REQUIRE(h.size() == 1);
    return h[0];
  }
  int order(Obj o) const { return c.alg(o).n; }
};

// Fills restrictions from the unique ring maps (all tests use cyclic values).
Presheaf unique_maps(const Rings& R, const FinTopSpace& x, const std::vector<std::string>& vals) {
  Presheaf p = Presheaf::empty_on(R.c, x);
  const auto& os = x.opens();
  for (size_t i = 0; i < os.size(); ++i) p.value[i] = R(vals[i]);
  for (size_t v = 0; v < os.size(); ++v)
    for (size_t u = 0; u < os.size(); ++u)
      if ((os[u] & ~os[v]) == 0) p.res[v][u] = R.only(p.value[v], p.value[u]);
  return p;
}

FinTopSpace sierpinski() { return FinTopSpace::generated(2, {bit(1)}); }

// Opens of the 2-point discrete space are ordered {}, {0}, {1}, {0,1}.
}  // namespace

TEST_CASE("one-point space descends when the empty value is terminal") {
  Rings R;
  auto p = unique_maps(R, FinTopSpace::discrete(1), {"0", "Z/4"});
  CHECK(p.functorial());
  CHECK(check_descent(p, true).ok);
}

TEST_CASE("product over the discrete pair descends") {
  Rings R;
  auto p = unique_maps(R, FinTopSpace::discrete(2), {"0", "Z/4", "Z/3", "Z/12"});
  CHECK(check_descent(p, true).ok);
}

TEST_CASE("non-product value fails descent on the point cover") {
  Rings R;
  auto p = unique_maps(R, FinTopSpace::discrete(2), {"0", "Z/4", "Z/2", "Z/4"});
  REQUIRE(p.functorial());
  auto r = check_descent(p);
  CHECK_FALSE(r.ok);
  CHECK(r.open == 3);
  CHECK(r.cover == std::vector<PointSet>{1, 2});
}

TEST_CASE("sheafification of the failing fixture is the product") {
  Rings R;
  auto p = unique_maps(R, FinTopSpace::discrete(2), {"0", "Z/4", "Z/2", "Z/4"});
  auto a = sheafify(p);
  CHECK(a.sheaf.functorial());
  CHECK(R.order(a.sheaf.at(3)) == 8);
  CHECK(check_descent(a.sheaf, true).ok);
  for (int x = 0; x < 2; ++x) {
    int i = p.space.open_index(p.space.minimal_open(x));
    CHECK(is_iso(R.c, a.gamma[i]));
    CHECK(find_iso(R.c, a.sheaf.stalk(x), p.stalk(x)));
  }
  CHECK_FALSE(is_iso(R.c, a.gamma[3]));
  CHECK(R.order(a.sheaf.at(0)) == 1);
}

TEST_CASE("sierpinski presheaf is already a sheaf") {
  Rings R;
  auto s = sierpinski();
  REQUIRE(s.opens().size() == 3);
  auto p = unique_maps(R, s, {"0", "Z/2", "Z/4"});
  CHECK(check_descent(p, true).ok);
  CHECK(p.stalk(0) == R("Z/4"));
  CHECK(p.stalk(1) == R("Z/2"));
  auto a = sheafify(p);
  for (Mor g : a.gamma) CHECK(is_iso(R.c, g));
}

TEST_CASE("sheafify is openwise iso exactly on sheaves") {
  Rings R;
  auto good = unique_maps(R, FinTopSpace::discrete(2), {"0", "Z/2", "Z/3", "Z/6"});
  auto bad = unique_maps(R, FinTopSpace::discrete(2), {"0", "Z/2", "Z/3", "Z/36"});
  for (const auto* p : {&good, &bad}) {
    auto a = sheafify(*p);
    bool iso = true;
    for (Mor g : a.gamma) iso = iso && is_iso(R.c, g);
    CHECK(iso == check_descent(*p).ok);
  }
  CHECK(check_descent(good).ok);
  CHECK_FALSE(check_descent(bad).ok);
}

TEST_CASE("direct and inverse image along a point inclusion") {
  Rings R;
  auto X = FinTopSpace::discrete(2);
  auto pt = FinTopSpace::discrete(1);
  PointMap inc{0};
  REQUIRE(is_continuous(pt, X, inc));
  auto s = unique_maps(R, X, {"0", "Z/4", "Z/3", "Z/12"});
  auto fs = inverse_image(inc, pt, s);
  CHECK(find_iso(R.c, fs.result().at(1), R("Z/4")));
  CHECK(check_descent(fs.result()).ok);

  auto t = unique_maps(R, pt, {"0", "Z/9"});
  auto ft = direct_image(inc, X, t);
  CHECK(ft.at(3) == R("Z/9"));
  CHECK(ft.at(1) == R("Z/9"));
  CHECK(ft.at(2) == R("0"));
  CHECK(ft.functorial());
}

TEST_CASE("direct image along the constant map reads the whole space") {
  Rings R;
  auto X = FinTopSpace::discrete(2);
  auto pt = FinTopSpace::discrete(1);
  auto s = unique_maps(R, X, {"0", "Z/4", "Z/3", "Z/12"});
  auto f = direct_image({0, 0}, pt, s);
  CHECK(f.at(1) == R("Z/12"));
}

TEST_CASE("identity map gives isomorphic images") {
  Rings R;
  auto s = unique_maps(R, sierpinski(), {"0", "Z/2", "Z/4"});
  PointMap id{0, 1};
  auto d = direct_image(id, s.space, s);
  auto i = inverse_image(id, s.space, s);
  for (size_t k = 0; k < s.value.size(); ++k) {
    CHECK(d.value[k] == s.value[k]);
    CHECK(find_iso(R.c, i.result().value[k], s.value[k]));
  }
}

TEST_CASE("stalks of inverse images follow the map") {
  Rings R;
  auto tgt = sierpinski();
  auto src = FinTopSpace::discrete(2);
  auto t = unique_maps(R, tgt, {"0", "Z/3", "Z/9"});
  PointMap f{0, 1};
  REQUIRE(is_continuous(src, tgt, f));
  auto ft = inverse_image(f, src, t);
  for (int x = 0; x < 2; ++x) CHECK(find_iso(R.c, ft.result().stalk(x), t.stalk(f[x])));
}

TEST_CASE("transpose is a bijection between the two hom sets") {
  Rings R;
  struct Case {
    FinTopSpace x, y;
    PointMap f;
    std::vector<std::string> sx, ty;
  };
  std::vector<Case> cases = {
      {FinTopSpace::discrete(2), FinTopSpace::discrete(1), {0, 0}, {"0", "Z/4", "Z/3", "Z/12"}, {"0", "Z/12"}},
      {FinTopSpace::discrete(2), sierpinski(), {0, 1}, {"0", "Z/4", "Z/2", "Z/8"}, {"0", "Z/2", "Z/4"}},
      {FinTopSpace::discrete(1), FinTopSpace::discrete(2), {1}, {"0", "Z/3"}, {"0", "Z/2", "Z/3", "Z/6"}},
      {sierpinski(), sierpinski(), {0, 1}, {"0", "Z/2", "Z/4"}, {"0", "Z/2", "Z/8"}},
  };
  for (const auto& cs : cases) {
    REQUIRE(is_continuous(cs.x, cs.y, cs.f));
    auto s = sheafify(unique_maps(R, cs.x, cs.sx)).sheaf;
    auto t = sheafify(unique_maps(R, cs.y, cs.ty)).sheaf;
    auto ft = inverse_image(cs.f, cs.x, t);
    auto fs = direct_image(cs.f, cs.y, s);
    auto left = enumerate_sheaf_morphisms(ft.result(), s);
    auto right = enumerate_sheaf_morphisms(t, fs);
    CHECK(left.size() == right.size());
    CHECK(!right.empty());
    for (const auto& a : left) {
      auto b = to_direct(cs.f, ft, t, s, a);
      CHECK(is_natural(t, fs, b));
      auto back = to_inverse(cs.f, ft, t, s, b);
      REQUIRE(back);
      CHECK(back->comp == a.comp);
    }
    for (const auto& b : right) {
      auto a = to_inverse(cs.f, ft, t, s, b);
      REQUIRE(a);
      CHECK(to_direct(cs.f, ft, t, s, *a).comp == b.comp);
      for (int y = 0; y < cs.x.size(); ++y) {
        Mor fl = flat_at(cs.f, t, s, b, y);
        CHECK(R.c.dom(fl) == t.stalk(cs.f[y]));
        CHECK(R.c.cod(fl) == s.stalk(y));
      }
    }
  }
}

TEST_CASE("sheaf morphisms between sheaves compose and include the identity") {
  Rings R;
  auto s = unique_maps(R, FinTopSpace::discrete(2), {"0", "Z/4", "Z/3", "Z/12"});
  auto ms = enumerate_sheaf_morphisms(s, s);
  CHECK(ms.size() == 1);
  CHECK(ms[0].comp == identity_mor(s).comp);
  auto c = compose_mor(R.c, ms[0], ms[0]);
  CHECK(is_natural(s, s, c));
}

TEST_CASE("presheaf json lists values and restrictions") {
  Rings R;
  auto p = unique_maps(R, sierpinski(), {"0", "Z/2", "Z/4"});
  auto j = p.to_json();
  CHECK(j["values"].size() == 3);
  CHECK(j["restrictions"].size() == 3);
  CHECK(check_descent(p).to_json()["ok"] == true);
}
