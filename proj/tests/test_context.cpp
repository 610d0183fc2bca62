#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "diers/instances.hpp"
#include "oracles.hpp"

using namespace diers;

namespace {

std::string data(const std::string& f) { return std::string(DIERS_DATA_DIR) + "/contexts/" + f; }

Mor ring_map(const ZariskiContext& z, const std::string& a, const std::string& b) {
  const auto& h = z.rings().hom(z.parse(a), z.parse(b));
  REQUIRE(h.size() == 1);
  return h[0];
}

}  // namespace

TEST_CASE("trivial context") {
  auto ctx = make_context("trivial");
  for (Obj b : ctx->sample_objects()) {
    REQUIRE(ctx->local_units(b).size() == 1);
    CHECK(ctx->local_units(b)[0].unit == ctx->ambient().id(b));
  }
  CHECK(validate_context(*ctx).ok());
}

TEST_CASE("zariski units of Z/12") {
  ZariskiContext z;
  Obj b = z.parse("Z/12");
  const auto& us = z.local_units(b);
  REQUIRE(us.size() == 2);
  CHECK(z.ambient().obj_name(us[0].local) == "Z/4");
  CHECK(z.ambient().obj_name(us[1].local) == "Z/3");
  for (int x = 0; x < 12; ++x) {
    CHECK(z.rings().map(us[0].unit)[x] == x % 4);
    CHECK(z.rings().map(us[1].unit)[x] == x % 3);
  }
}

TEST_CASE("zariski units of Z/8 and F_2xF_3") {
  ZariskiContext z;
  Obj z8 = z.parse("Z/8");
  REQUIRE(z.local_units(z8).size() == 1);
  CHECK(z.local_units(z8)[0].unit == z.ambient().id(z8));
  Obj p = z.parse("F_2xF_3");
  const auto& us = z.local_units(p);
  REQUIRE(us.size() == 2);
  // the projections: element (a,b) is encoded a*3+b
  for (int x = 0; x < 6; ++x) {
    CHECK(z.rings().map(us[0].unit)[x] == x / 3);
    CHECK(z.rings().map(us[1].unit)[x] == x % 3);
  }
}

TEST_CASE("zariski points match prime ideals") {
  ZariskiContext z;
  for (Obj b : z.sample_objects())
    CHECK(z.local_units(b).size() == oracle::prime_ideals(z.rings().alg(b)).size());
}

TEST_CASE("zariski factorization") {
  ZariskiContext z;
  Mor r = ring_map(z, "Z/12", "Z/3");
  auto f = z.factorize(r, z.parse("Z/3"));
  REQUIRE(f);
  CHECK(f->unit.unit == r);
  CHECK(f->local_part == z.ambient().id(z.parse("Z/3")));
  Obj z4 = z.parse("Z/4");
  auto g = z.factorize(z.ambient().id(z4), z4);
  REQUIRE(g);
  CHECK(is_iso(z.local(), g->local_part));
  // Z/12 -> Z/2 factors through Z/4
  auto h = z.factorize(ring_map(z, "Z/12", "Z/2"), z.parse("Z/2"));
  REQUIRE(h);
  CHECK(z.ambient().obj_name(h->unit.local) == "Z/4");
}

TEST_CASE("zariski diagonal universality and order") {
  ZariskiContext z;
  Obj b = z.parse("Z/12");
  CHECK(is_diagonally_universal(z, z.ambient().id(b)));
  Mor inv3 = z.localization(b, 3), inv9 = z.localization(b, 9), inv2 = z.localization(b, 2);
  CHECK(z.ambient().obj_name(z.ambient().cod(inv3)) == "Z/4");
  CHECK(inv3 == inv9);
  CHECK(is_diagonally_universal(z, inv3));
  CHECK(leq_factorization(z, inv3, inv9));
  CHECK_FALSE(leq_factorization(z, inv3, inv2));
  CHECK(leq_factorization(z, z.ambient().id(b), inv2));
  auto j = join(z, inv2, inv3);
  REQUIRE(j);
  CHECK(z.ambient().obj_name(z.ambient().cod(*j)) == "0");
  CHECK(*join(z, inv3, z.ambient().id(b)) == inv3);
  // a non-localization quotient is not orthogonal to the local maps
  CHECK_FALSE(is_diagonally_universal(z, ring_map(z, "Z/4", "Z/2")));
}

TEST_CASE("zariski validation") {
  ZariskiContext z;
  auto r = validate_context(z, {z.parse("Z/2"), z.parse("Z/4"), z.parse("Z/12")});
  CHECK(r.ok());
  Obj b = z.parse("Z/12");
  auto vx = unit_filter(z, b, 0);
  const auto& p = z.d_poset(b);
  // V_x: id and the localizations keeping the Z/4 factor
  CHECK(vx.size() == 2);
  for (int i : vx) CHECK(leq_factorization(z, p.elems[i], z.local_units(b)[0].unit));
}

TEST_CASE("zariski d-poset of Z/12") {
  ZariskiContext z;
  const auto& p = z.d_poset(z.parse("Z/12"));
  CHECK(p.size() == 4);
  CHECK(p.elems[p.bottom] == z.ambient().id(z.parse("Z/12")));
  int top = -1;
  for (size_t i = 0; i < p.size(); ++i)
    if (z.rings().alg(z.ambient().cod(p.elems[i])).n == 1) top = static_cast<int>(i);
  REQUIRE(top >= 0);
  for (size_t i = 0; i < p.size(); ++i) CHECK(p.leq(static_cast<int>(i), top));
}

TEST_CASE("boolean units and factorization") {
  BooleanContext bc;
  Obj b = bc.parse("2^3");
  const auto& us = bc.local_units(b);
  CHECK(us.size() == 3);
  CHECK(us.size() == static_cast<size_t>(oracle::atom_count(bc.bools().alg(b))));
  CHECK(us.size() == bc.ambient().hom(b, bc.two()).size());
  for (const auto& u : us) {
    auto f = bc.factorize(u.unit, bc.two());
    REQUIRE(f);
    CHECK(f->unit.unit == u.unit);
    CHECK(f->local_part == bc.ambient().id(bc.two()));
  }
}

TEST_CASE("boolean injection 2 -> 2^2 is orthogonal to the only local map") {
  // With a single local object and only its identity, every square has the
  // bottom edge itself as its unique filler.
  BooleanContext bc;
  Obj two = bc.two(), four = bc.parse("2^2");
  const auto& h = bc.ambient().hom(two, four);
  REQUIRE(h.size() == 1);
  CHECK(is_diagonally_universal(bc, h[0]));
  const auto& d = bc.dum(two);
  CHECK(std::find(d.begin(), d.end(), h[0]) == d.end());
}

TEST_CASE("boolean joins of principal quotients") {
  BooleanContext bc;
  Obj b = bc.parse("2^3");
  Mor qa = bc.principal_quotient(b, 1), qb = bc.principal_quotient(b, 2);
  auto j = join(bc, qa, qb);
  REQUIRE(j);
  CHECK(*j == bc.principal_quotient(b, 0));
  Mor q3 = bc.principal_quotient(b, 3), q5 = bc.principal_quotient(b, 5);
  CHECK(*join(bc, q3, q5) == bc.principal_quotient(b, 1));
  CHECK(validate_context(bc).ok());
}

TEST_CASE("table fixtures validate") {
  for (const char* f : {"chain.json", "diamond.json", "z2_group.json"}) {
    auto ctx = TableContext::load(data(f));
    auto r = validate_context(*ctx);
    INFO(f << " " << r.to_json(*ctx).dump());
    CHECK(r.ok());
  }
  auto chain = TableContext::load(data("chain.json"));
  CHECK(chain->local_units(*chain->B().find_object("b0")).size() == 1);
  auto grp = TableContext::load(data("z2_group.json"));
  CHECK(grp->dum(0).size() == 2);
  CHECK(grp->d_poset(0).size() == 1);
}

TEST_CASE("missing unit is reported with its witness") {
  auto ctx = TableContext::load(data("broken_missing_unit.json"));
  auto r = validate_context(*ctx);
  CHECK_FALSE(r.ok());
  const auto& v = r.objects[0];
  CHECK_FALSE(v.multi_reflection);
  REQUIRE_FALSE(v.witnesses.empty());
  CHECK(ctx->B().mor_name(v.witnesses[0]) == "b0<=b1");
}

TEST_CASE("table context round trip") {
  auto ctx = TableContext::load(data("diamond.json"));
  auto j = ctx->to_json();
  auto again = TableContext::from_json(j);
  CHECK(again->to_json() == j);
  json bad = j;
  bad.erase("schema");
  CHECK_THROWS_AS(TableContext::from_json(bad), category_error);
}

TEST_CASE("functor diagnostics") {
  BooleanContext bc;
  CHECK(U_full(bc));
  CHECK(U_faithful(bc));
  CHECK(U_conservative(bc));
  auto chain = TableContext::load(data("chain.json"));
  CHECK(U_conservative(*chain));
}
