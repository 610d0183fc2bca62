#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "diers/instances.hpp"
#include "diers/structsheaf.hpp"
#include "oracles.hpp"

using namespace diers;

namespace {

std::string data(const std::string& f) { return std::string(DIERS_DATA_DIR) + "/contexts/" + f; }

Mor only(const Category& c, Obj x, Obj y) {
  const auto& h = c.hom(x, y);
  REQUIRE(h.size() == 1);
  return h[0];
}

int point_with_local(const StructuralSheaf& s, const DiersContext& ctx, const std::string& name) {
  for (size_t x = 0; x < s.uspace.local.size(); ++x)
    if (ctx.local().obj_name(s.uspace.local[x]) == name) return static_cast<int>(x);
  return -1;
}

}  // namespace

TEST_CASE("trivial context: one point, presheaf value B, eta iso") {
  auto ctx = make_context("trivial");
  const Category& B = ctx->ambient();
  for (Obj b : ctx->sample_objects()) {
    auto s = structural_sheaf(*ctx, b);
    REQUIRE(s.uspace.size() == 1);
    CHECK(find_iso(B, s.pre.at(1), b));
    CHECK(s.eta_iso);
    CHECK(check_uspace(*ctx, s.uspace));
  }
  auto s4 = structural_sheaf(*ctx, find_object(*ctx, "Z/4"));
  CHECK(is_identity(B, s4.eta));
}

TEST_CASE("zariski Z/12 presheaf values") {
  ZariskiContext z;
  const Category& B = z.ambient();
  Obj b = z.parse("Z/12");
  auto s = structural_sheaf(z, b);
  int p2 = point_with_local(s, z, "Z/4"), p3 = point_with_local(s, z, "Z/3");
  REQUIRE(p2 >= 0);
  REQUIRE(p3 >= 0);
  CHECK(find_iso(B, s.pre.at(bit(p2)), z.parse("Z/4")));
  CHECK(find_iso(B, s.pre.at(bit(p3)), z.parse("Z/3")));
  CHECK(find_iso(B, s.pre.at(3), b));
  CHECK(z.rings().alg(s.pre.at(0)).n == 1);
}

TEST_CASE("zariski Z/12 sheaf: stalks, sections, eta") {
  ZariskiContext z;
  const Category& B = z.ambient();
  Obj b = z.parse("Z/12");
  auto s = structural_sheaf(z, b);
  CHECK(s.stalks_ok);
  CHECK(check_uspace(z, s.uspace));
  std::vector<std::string> stalks;
  for (int x = 0; x < 2; ++x) stalks.push_back(B.obj_name(s.sheaf().stalk(x)));
  std::sort(stalks.begin(), stalks.end());
  CHECK(stalks == std::vector<std::string>{"Z/3", "Z/4"});
  Obj g = global_sections(s.uspace);
  CHECK(z.rings().alg(g).n == 12);
  CHECK(find_iso(B, g, b));
  CHECK(s.eta_iso);
}

TEST_CASE("boolean 2^3 sheaf") {
  BooleanContext bc;
  const Category& B = bc.ambient();
  Obj b = bc.parse("2^3");
  auto s = structural_sheaf(bc, b);
  REQUIRE(s.uspace.size() == 3);
  for (int x = 0; x < 3; ++x) CHECK(s.sheaf().stalk(x) == bc.two());
  Obj g = global_sections(s.uspace);
  CHECK(oracle::atom_count(bc.bools().alg(g)) == 3);
  CHECK(find_iso(B, g, b));
  CHECK(s.eta_iso);
}

TEST_CASE("stalk theorem and eta on every ring and Boolean sample") {
  ZariskiContext z;
  BooleanContext bc;
  for (const DiersContext* ctx : {static_cast<const DiersContext*>(&z), static_cast<const DiersContext*>(&bc)})
    for (Obj b : ctx->sample_objects()) {
      auto s = structural_sheaf(*ctx, b);
      INFO(ctx->ambient().obj_name(b));
      CHECK(s.stalks_ok);
      CHECK(s.eta_iso);
      CHECK(check_descent(s.sheaf()).ok);
      CHECK(s.order_reflecting == s.zeta_iso_on_basis);
    }
}

TEST_CASE("table contexts: stalks and zeta criterion") {
  for (const char* f : {"chain.json", "diamond.json"}) {
    auto ctx = TableContext::load(data(f));
    for (Obj b : ctx->sample_objects()) {
      auto s = structural_sheaf(*ctx, b);
      INFO(f << " " << ctx->ambient().obj_name(b));
      CHECK(s.stalks_ok);
      CHECK(s.order_reflecting == s.zeta_iso_on_basis);
    }
  }
}

TEST_CASE("sheafification needs a terminal object") {
  auto ctx = TableContext::load(data("z2_group.json"));
  CHECK_FALSE(ctx->ambient().terminal());
  CHECK_THROWS_AS(structural_sheaf(*ctx, ctx->sample_objects()[0]), category_error);
}

TEST_CASE("spec of identity is the identity") {
  ZariskiContext z;
  Obj b = z.parse("Z/12");
  auto s = structural_sheaf(z, b);
  auto m = spec_functor_morphism(z, z.ambient().id(b), s, s);
  REQUIRE(m);
  CHECK(*m == identity_morphism(z, s.uspace));
}

TEST_CASE("spec of Z/12 -> Z/4") {
  ZariskiContext z;
  const Category& B = z.ambient();
  Obj b1 = z.parse("Z/12"), b2 = z.parse("Z/4");
  auto s1 = structural_sheaf(z, b1), s2 = structural_sheaf(z, b2);
  std::string why;
  auto m = spec_functor_morphism(z, only(B, b1, b2), s1, s2, &why);
  REQUIRE_MESSAGE(m, why);
  int p2 = point_with_local(s1, z, "Z/4");
  REQUIRE(m->f == PointMap{p2});
  Mor at = m->sharp.comp[s1.spec.space.open_index(bit(p2))];
  CHECK(is_iso(B, at));
  CHECK(z.rings().alg(B.cod(at)).n == 4);
  auto fl = flat_part(s1.uspace, s2.uspace, *m);
  REQUIRE(fl);
  CHECK(is_natural(fl->pulled.result(), s2.sheaf(), fl->flat));
}

TEST_CASE("boolean inclusion 2^2 -> 2^3 has identity local maps") {
  BooleanContext bc;
  const Category& B = bc.ambient();
  Obj b1 = bc.parse("2^2"), b2 = bc.parse("2^3");
  auto s1 = structural_sheaf(bc, b1), s2 = structural_sheaf(bc, b2);
  const auto& homs = B.hom(b1, b2);
  REQUIRE(!homs.empty());
  for (Mor f : homs) {
    auto m = spec_functor_morphism(bc, f, s1, s2);
    REQUIRE(m);
    for (Mor l : m->local) CHECK(l == bc.local().id(bc.two()));
  }
}

TEST_CASE("spec is functorial") {
  ZariskiContext z;
  const Category& B = z.ambient();
  Obj a = z.parse("Z/36"), b = z.parse("Z/12"), c = z.parse("Z/4");
  auto sa = structural_sheaf(z, a), sb = structural_sheaf(z, b), sc = structural_sheaf(z, c);
  Mor f = only(B, a, b), g = only(B, b, c);
  auto mf = spec_functor_morphism(z, f, sa, sb);
  auto mg = spec_functor_morphism(z, g, sb, sc);
  auto mgf = spec_functor_morphism(z, B.compose(g, f), sa, sc);
  REQUIRE(mf);
  REQUIRE(mg);
  REQUIRE(mgf);
  CHECK(compose(z, sa.uspace, sb.uspace, *mg, *mf) == *mgf);

  BooleanContext bc;
  const Category& C = bc.ambient();
  Obj x = bc.parse("2"), y = bc.parse("2^2"), w = bc.parse("2^3");
  auto tx = structural_sheaf(bc, x), ty = structural_sheaf(bc, y), tw = structural_sheaf(bc, w);
  for (Mor p : C.hom(x, y))
    for (Mor q : C.hom(y, w)) {
      auto m1 = spec_functor_morphism(bc, p, tx, ty);
      auto m2 = spec_functor_morphism(bc, q, ty, tw);
      auto m12 = spec_functor_morphism(bc, C.compose(q, p), tx, tw);
      REQUIRE(m1);
      REQUIRE(m2);
      REQUIRE(m12);
      CHECK(compose(bc, tx.uspace, ty.uspace, *m2, *m1) == *m12);
    }
}

TEST_CASE("global sections of a one-point U-space") {
  ZariskiContext z;
  auto x = discrete_uspace(z, {z.parse("Z/9")});
  CHECK(check_uspace(z, x));
  CHECK(global_sections(x) == z.parse("Z/9"));
}

TEST_CASE("transpose of eta is the identity") {
  BooleanContext bc;
  Obj b = bc.parse("2^3");
  auto s = structural_sheaf(bc, b);
  auto t = adjunction_transpose(bc, s, s.uspace, s.eta);
  REQUIRE(t);
  CHECK(t->morphism == identity_morphism(bc, s.uspace));
}

TEST_CASE("transpose agrees with spec of a quotient") {
  ZariskiContext z;
  const Category& B = z.ambient();
  Obj b = z.parse("Z/12"), c = z.parse("Z/4");
  auto sb = structural_sheaf(z, b), sc = structural_sheaf(z, c);
  Mor q = only(B, b, c);
  auto t = adjunction_transpose(z, sb, sc.uspace, B.compose(sc.eta, q));
  auto m = spec_functor_morphism(z, q, sb, sc);
  REQUIRE(t);
  REQUIRE(m);
  CHECK(t->morphism == *m);
  CHECK(t->continuous);
}

TEST_CASE("transpose onto a one-point space picks the ultrafilter") {
  BooleanContext bc;
  Obj b = bc.parse("2^3");
  auto s = structural_sheaf(bc, b);
  auto pt = discrete_uspace(bc, {bc.two()});
  REQUIRE(global_sections(pt) == bc.two());
  const auto& us = bc.local_units(b);
  for (size_t i = 0; i < us.size(); ++i) {
    auto t = adjunction_transpose(bc, s, pt, us[i].unit);
    REQUIRE(t);
    CHECK(t->morphism.f == PointMap{static_cast<int>(i)});
  }
}

TEST_CASE("adjunction: trivial context") {
  auto ctx = make_context("trivial");
  const Category& B = ctx->ambient();
  Obj b = find_object(*ctx, "Z/12"), b2 = find_object(*ctx, "Z/4");
  auto s2 = structural_sheaf(*ctx, b2);
  auto r = verify_adjunction(*ctx, b, s2.uspace);
  CHECK_MESSAGE(r.ok(), r.failure);
  CHECK(r.left == B.hom(b, b2).size());
  CHECK(r.right == r.left);
}

TEST_CASE("adjunction: boolean 2^2 against Spec(2)") {
  BooleanContext bc;
  auto s = structural_sheaf(bc, bc.two());
  auto r = verify_adjunction(bc, bc.parse("2^2"), s.uspace);
  CHECK_MESSAGE(r.ok(), r.failure);
  CHECK(r.left == 2);
  CHECK(r.right == 2);
}

TEST_CASE("adjunction: Z/4 against Spec(Z/2)") {
  ZariskiContext z;
  auto s = structural_sheaf(z, z.parse("Z/2"));
  auto r = verify_adjunction(z, z.parse("Z/4"), s.uspace);
  CHECK_MESSAGE(r.ok(), r.failure);
  CHECK(r.left == 1);
  CHECK(r.right == 1);
}

TEST_CASE("adjunction: larger cases") {
  ZariskiContext z;
  auto s = structural_sheaf(z, z.parse("Z/12"));
  auto r = verify_adjunction(z, z.parse("Z/36"), s.uspace);
  CHECK_MESSAGE(r.ok(), r.failure);
  BooleanContext bc;
  auto t = structural_sheaf(bc, bc.parse("2^3"));
  auto r2 = verify_adjunction(bc, bc.parse("2^3"), t.uspace);
  CHECK_MESSAGE(r2.ok(), r2.failure);
  CHECK(r2.left == 27);  // 3^3 maps of atoms
  auto r3 = verify_adjunction(bc, bc.parse("2^2"), discrete_uspace(bc, {bc.two(), bc.two(), bc.two()}));
  CHECK_MESSAGE(r3.ok(), r3.failure);
  CHECK(r3.left == 8);
}

TEST_CASE("json export") {
  ZariskiContext z;
  auto s = structural_sheaf(z, z.parse("Z/12"));
  auto j = s.to_json(z);
  CHECK(j["eta_iso"] == true);
  CHECK(j["uspace"]["local_family"].size() == 2);
  CHECK(s.uspace.to_dot(z).find("digraph") == 0);
}
