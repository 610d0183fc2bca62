#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "diers/table_category.hpp"

using namespace diers;

namespace {

// a -> b -> c with two parallel arrows b => c
TableCategory two_arrows() {
  TableCategory c("par");
  Obj a = c.add_object("a"), b = c.add_object("b"), d = c.add_object("c");
  Mor f = c.add_morphism("f", a, b);
  Mor g1 = c.add_morphism("g1", b, d);
  Mor g2 = c.add_morphism("g2", b, d);
  Mor h = c.add_morphism("h", a, d);
  c.set_composite(g1, f, h);
  c.set_composite(g2, f, h);
  c.finalize();
  return c;
}

}  // namespace

TEST_CASE("identity law") {
  auto c = TableCategory::poset("P", {"x", "y"}, {{0, 1}});
  Mor f = *c.find_morphism("x<=y");
  CHECK(c.compose(c.id(1), f) == f);
  CHECK(c.compose(f, c.id(0)) == f);
}

TEST_CASE("table composition is read from the table") {
  auto c = two_arrows();
  CHECK(c.compose(*c.find_morphism("g1"), *c.find_morphism("f")) == *c.find_morphism("h"));
  CHECK(c.compose(*c.find_morphism("g2"), *c.find_morphism("f")) == *c.find_morphism("h"));
  CHECK_THROWS_AS(c.compose(*c.find_morphism("f"), *c.find_morphism("g1")), category_error);
  auto r = check_category_laws(c);
  CHECK(r.ok);
  CHECK(r.checked > 0);
}

TEST_CASE("missing composite is rejected") {
  TableCategory c("bad");
  Obj a = c.add_object("a"), b = c.add_object("b"), d = c.add_object("c");
  c.add_morphism("f", a, b);
  c.add_morphism("g", b, d);
  CHECK_THROWS_AS(c.finalize(), category_error);
}

TEST_CASE("poset hom sets are thin") {
  auto c = TableCategory::poset("P", {"x", "y", "z"}, {{0, 1}, {1, 2}});
  CHECK(c.thin());
  CHECK(c.hom(0, 0).size() == 1);
  CHECK(c.hom(0, 2).size() == 1);
  CHECK(c.hom(2, 0).empty());
  CHECK(c.mor_name(c.hom(0, 2)[0]) == "x<=z");
}

TEST_CASE("pushout with an identity leg") {
  auto c = TableCategory::poset("P", {"x", "y"}, {{0, 1}});
  Mor g = *c.find_morphism("x<=y");
  auto po = c.pushout(c.id(0), g);
  REQUIRE(po);
  CHECK(po->apex == 1);
  CHECK(po->legs[0] == g);
  CHECK(po->legs[1] == c.id(1));
}

TEST_CASE("joins in a diamond are pushouts") {
  auto c = TableCategory::poset("D", {"bot", "l", "r", "top"}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  auto po = c.pushout(*c.find_morphism("bot<=l"), *c.find_morphism("bot<=r"));
  REQUIRE(po);
  CHECK(c.obj_name(po->apex) == "top");
  auto v = TableCategory::poset("V", {"bot", "l", "r"}, {{0, 1}, {0, 2}});
  CHECK_FALSE(v.pushout(*v.find_morphism("bot<=l"), *v.find_morphism("bot<=r")));
}

TEST_CASE("colimit of a one-object diagram") {
  auto c = two_arrows();
  Diagram d;
  d.add_node(1);
  auto cc = c.colimit(d);
  REQUIRE(cc);
  CHECK(cc->apex == 1);
  CHECK(cc->legs[0] == c.id(1));
}

TEST_CASE("coequalizer absent in the parallel-arrow category") {
  auto c = two_arrows();
  Diagram d;
  int b = d.add_node(1), e = d.add_node(2);
  d.add_edge(b, e, *c.find_morphism("g1"));
  d.add_edge(b, e, *c.find_morphism("g2"));
  CHECK_FALSE(c.colimit(d));
  // the cone side: a with f is the equalizer
  auto l = c.limit(d);
  REQUIRE(l);
  CHECK(c.obj_name(l->apex) == "a");
}

TEST_CASE("colimit over a poset with top is the top") {
  auto c = TableCategory::poset("D", {"bot", "l", "r", "top"}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  Diagram d;
  for (Obj o : c.objects()) d.add_node(o);
  for (Obj x : c.objects())
    for (Obj y : c.objects())
      for (Mor m : c.hom(x, y)) d.add_edge(x, y, m);
  auto cc = c.colimit(d);
  REQUIRE(cc);
  CHECK(c.obj_name(cc->apex) == "top");
  CHECK(verify_colimit(c, d, *cc, c.objects()));
}

TEST_CASE("json round trip") {
  auto c = two_arrows();
  auto j = c.to_json();
  auto c2 = TableCategory::from_json(j, "copy");
  CHECK(c2.num_morphisms() == c.num_morphisms());
  CHECK(c2.compose(*c2.find_morphism("g2"), *c2.find_morphism("f")) == *c2.find_morphism("h"));
  json p = json::parse(R"({"poset":{"elements":["p","q"],"leq":[["p","q"]]}})");
  auto c3 = TableCategory::from_json(p, "P");
  CHECK(c3.find_morphism("p<=q"));
}
