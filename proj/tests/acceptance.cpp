// Acceptance driver: one PASS/FAIL line per criterion, with its runtime.
//
// Usage: acceptance [--known-failure N]...
// Exit 0 iff the failing criteria are exactly the listed known failures.

#include <CLI11.hpp>

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "diers/duality.hpp"
#include "diers/instances.hpp"
#include "oracles.hpp"

using namespace diers;

namespace {

std::string data(const std::string& f) { return std::string(DIERS_DATA_DIR) + "/" + f; }

const std::vector<std::string> kTables{"chain", "chain3", "diamond", "point", "two_locals"};

struct Instance {
  std::string label;
  std::unique_ptr<DiersContext> ctx;
};

std::vector<Instance> shipped() {
  std::vector<Instance> out;
  out.push_back({"trivial", make_context("trivial")});
  out.push_back({"boolean", std::make_unique<BooleanContext>(4)});
  out.push_back({"zariski", std::make_unique<ZariskiContext>(36)});
  for (const auto& t : kTables) out.push_back({t, make_context("table:" + data("contexts/" + t + ".json"))});
  return out;
}

// B-space fixtures usable in a context: shipped files plus discrete pairs of samples.
std::vector<std::pair<std::string, BSpace>> fixtures(const Instance& in) {
  std::vector<std::pair<std::string, BSpace>> out;
  std::vector<std::string> files;
  if (in.label == "zariski") files = {"sierpinski_z12", "discrete_z4_z9", "point_z12"};
  if (in.label == "chain") files = {"sierpinski_chain", "discrete_chain"};
  for (const auto& f : files) out.emplace_back(f, load_bspace(*in.ctx, data("bspaces/" + f + ".json")));
  auto objs = in.ctx->sample_objects();
  for (size_t i = 0; i + 1 < objs.size() && i < 2; ++i)
    out.emplace_back("discrete" + std::to_string(i), discrete_embedding(*in.ctx, {objs[i], objs[i + 1]}));
  return out;
}

// Order of the product of a family, where the universe is bounded by size.
bool product_in_universe(const DiersContext& ctx, const std::vector<Obj>& fam) {
  if (auto* z = dynamic_cast<const ZariskiContext*>(&ctx)) {
    long n = 1;
    for (Obj b : fam) n *= z->rings().alg(b).n;
    return n <= 36;
  }
  if (auto* bc = dynamic_cast<const BooleanContext*>(&ctx)) {
    int k = 0;
    for (Obj b : fam) k += oracle::atom_count(bc->bools().alg(b));
    return k <= 6;
  }
  return true;
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

struct Criterion {
  int id;
  std::string name;
  double limit_ms;  // 0: no runtime bound
  std::function<Outcome()> run;
};

Outcome context_validation() {
  Outcome o;
  long objects = 0;
  for (const auto& in : shipped()) {
    auto v = validate_context(*in.ctx);
    for (const auto& ov : v.objects) {
      ++objects;
      const std::string n = in.label + " " + in.ctx->ambient().obj_name(ov.object);
      if (!ov.multi_reflection) o.fail(n + ": " + ov.mr_detail);
      if (!ov.diagonal) o.fail(n + ": " + ov.du_detail);
      if (!ov.diers) o.fail(n + ": " + ov.diers_detail);
    }
  }
  if (o.pass) o.detail = std::to_string(objects) + " objects over " + std::to_string(3 + kTables.size()) + " contexts";
  return o;
}

Outcome zariski_oracle() {
  Outcome o;
  ZariskiContext z;
  const Category& B = z.ambient();
  Obj b = z.parse("Z/12");
  const Algebra& r = z.rings().alg(b);
  auto s = structural_sheaf(z, b);
  size_t primes = oracle::prime_ideals(r).size();
  if (s.spec.points.size() != 2 || primes != 2)
    o.fail("points " + std::to_string(s.spec.points.size()) + ", prime ideals " + std::to_string(primes));
  std::vector<int> sizes;
  for (int x = 0; x < s.spec.space.size(); ++x) sizes.push_back(z.rings().alg(s.sheaf().stalk(x)).n);
  std::sort(sizes.begin(), sizes.end());
  if (sizes != oracle::local_factor_sizes(r)) o.fail("stalk orders differ from the local factors");
  std::multiset<std::string> want{"Z/3", "Z/4"};
  for (int x = 0; x < s.spec.space.size(); ++x) {
    Obj st = s.sheaf().stalk(x);
    bool found = false;
    for (auto it = want.begin(); it != want.end(); ++it) {
      auto w = find_iso(B, st, z.parse(*it));
      if (w && is_iso(B, *w)) {
        want.erase(it);
        found = true;
        break;
      }
    }
    if (!found) o.fail("stalk " + B.obj_name(st) + " has no iso witness to Z/4 or Z/3");
  }
  if (!oracle::crt_bijective(r)) o.fail("CRT oracle rejects Z/12");
  Obj g = global_sections(s.uspace);
  if (B.cod(s.eta) != g || !is_iso(B, s.eta)) o.fail("eta is not an iso onto the global sections");
  if (z.rings().alg(g).n != 12) o.fail("global sections have order " + std::to_string(z.rings().alg(g).n));
  if (o.pass) o.detail = "stalks Z/4, Z/3; eta iso";
  return o;
}

Outcome stone_oracle() {
  Outcome o;
  BooleanContext bc;
  const Category& B = bc.ambient();
  for (int n = 1; n <= 4; ++n) {
    Obj b = bc.parse("2^" + std::to_string(n));
    int atoms = oracle::atom_count(bc.bools().alg(b));
    auto s = structural_sheaf(bc, b);
    const std::string tag = "2^" + std::to_string(n);
    if (atoms != n || s.spec.space.size() != atoms) o.fail(tag + ": point count");
    if (!s.spec.space.is_discrete()) o.fail(tag + ": not discrete");
    for (int x = 0; x < s.spec.space.size(); ++x)
      if (!find_iso(B, s.sheaf().stalk(x), bc.two())) o.fail(tag + ": stalk is not 2");
    Obj g = global_sections(s.uspace);
    auto w = find_iso(B, g, b);
    if (!w || oracle::atom_count(bc.bools().alg(g)) != n) o.fail(tag + ": global sections");
    if (!is_iso(B, s.eta)) o.fail(tag + ": eta");
  }
  if (o.pass) o.detail = "n = 1..4";
  return o;
}

Outcome basis_laws() {
  Outcome o;
  long checked = 0, objects = 0, nonreflecting = 0;
  for (const auto& in : shipped())
    for (Obj b : in.ctx->sample_objects()) {
      auto l = check_basis_laws(*in.ctx, b);
      ++objects;
      checked += l.checked;
      nonreflecting += !l.order_reflecting;
      if (!l.ok()) o.fail(in.label + " " + in.ctx->ambient().obj_name(b) + ": " + l.failure);
    }
  if (o.pass)
    o.detail = std::to_string(checked) + " law instances on " + std::to_string(objects) + " objects, 0 failures (" +
               std::to_string(nonreflecting) + " objects where D does not reflect order)";
  return o;
}

Outcome adjunction() {
  Outcome o;
  long pairs = 0, generalized = 0;
  bool sierpinski = false;
  for (const auto& in : shipped()) {
    const auto& ctx = *in.ctx;
    SpecCache cache(ctx);
    const auto objs = ctx.sample_objects();
    for (Obj b : objs)
      for (Obj c : objs) {
        const auto& x = cache.sheaf(c);
        if (!x.stalks_ok) continue;
        if (ctx.ambient().hom(b, global_sections(x.uspace)).size() > 64) continue;
        auto a = verify_adjunction(ctx, b, x.uspace, 4096, &cache);
        ++pairs;
        if (!a.ok()) o.fail(in.label + " " + ctx.ambient().obj_name(b) + " | Spec " + ctx.ambient().obj_name(c) + ": " +
                            a.failure);
      }
    for (const auto& [n, s] : fixtures(in)) {
      auto st = bspace_structural_sheaf(ctx, s);
      std::vector<USpace> targets{st.uspace};
      if (!objs.empty()) targets.push_back(cache.sheaf(objs.back()).uspace);
      for (const auto& a : targets) {
        auto g = verify_generalized_adjunction(ctx, s, a);
        ++generalized;
        if (!g.ok()) o.fail(in.label + " " + n + ": " + g.failure);
      }
      if (n.rfind("sierpinski", 0) == 0 && !s.space().is_discrete()) sierpinski = true;
    }
  }
  if (!sierpinski) o.fail("no non-discrete fixture ran");
  if (o.pass)
    o.detail = std::to_string(pairs) + " (B, Spec B') pairs, " + std::to_string(generalized) + " B-space pairs";
  return o;
}

Outcome stalk_theorems() {
  Outcome o;
  long points = 0;
  for (const auto& in : shipped()) {
    const auto& ctx = *in.ctx;
    for (Obj b : ctx.sample_objects()) {
      auto s = structural_sheaf(ctx, b);
      if (!s.stalks_ok) o.fail(in.label + " " + ctx.ambient().obj_name(b) + ": stalk comparison");
      for (int x = 0; x < s.spec.space.size(); ++x, ++points)
        if (!find_iso(ctx.ambient(), s.sheaf().stalk(x), ctx.U_obj(s.spec.points[x].local)))
          o.fail(in.label + " " + ctx.ambient().obj_name(b) + ": stalk at " + std::to_string(x));
    }
    for (const auto& [n, s] : fixtures(in)) {
      auto st = bspace_structural_sheaf(ctx, s);
      if (!st.stalks_ok) o.fail(in.label + " " + n + ": " + st.failure);
      if (!st.iota_iso) o.fail(in.label + " " + n + ": iota pullback " + st.failure);
      for (int x = 0; x < st.uspace.size(); ++x, ++points)
        if (!find_iso(ctx.ambient(), st.sheaf().stalk(x), ctx.U_obj(st.uspace.local[x])))
          o.fail(in.label + " " + n + ": glued stalk at " + std::to_string(x));
    }
  }
  if (o.pass) o.detail = std::to_string(points) + " points";
  return o;
}

Outcome separation() {
  Outcome o;
  std::mt19937_64 rng(1);
  long valid = 0, agree = 0, generated = 0;
  std::string first;
  while (valid < 200 && generated < 5000) {
    ++generated;
    auto ctx = random_thin_context(rng, 4, 4);
    if (!validate_context(*ctx).ok()) continue;
    ++valid;
    auto s = classify_separation(*ctx);
    if (s.agree())
      ++agree;
    else if (first.empty())
      first = "context #" + std::to_string(generated) + " (" + s.to_json().dump() + ")";
  }
  std::ostringstream d;
  d << agree << "/" << valid << " validated contexts agree";
  if (valid < 200) o.fail("only " + std::to_string(valid) + " validated contexts");
  if (agree != valid) o.fail(d.str() + "; first disagreement " + first);
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome duality_roundtrip() {
  Outcome o;
  long objects = 0, maps = 0;
  for (const auto& in : shipped()) {
    const auto& ctx = *in.ctx;
    Duality d(ctx);
    const auto objs = ctx.sample_objects();
    std::vector<std::optional<StructuralSheaf>> ss(objs.size());
    for (size_t i = 0; i < objs.size(); ++i) {
      Obj b = objs[i];
      const std::string n = in.label + " " + ctx.ambient().obj_name(b);
      auto f = extract_multiadjoint(d, b);
      ++objects;
      if (!f.ok()) o.fail(n + ": " + f.failure);
      ss[i] = structural_sheaf(ctx, b);
      if (global_sections_via_lift(d, ss[i]->uspace) != global_sections(ss[i]->uspace))
        o.fail(n + ": Gamma via the lift");
    }
    // naturality on one map per ordered pair of samples
    for (size_t i = 0; i < objs.size(); ++i)
      for (size_t j = 0; j < objs.size(); ++j) {
        auto h = ctx.ambient().hom(objs[i], objs[j]);
        if (h.empty()) continue;
        auto m = spec_functor_morphism(ctx, h.front(), *ss[i], *ss[j]);
        if (!m) continue;
        auto g = global_sections_via_lift(d, ss[i]->uspace, ss[j]->uspace, *m);
        ++maps;
        if (!g || *g != global_sections(ss[i]->uspace, *m))
          o.fail(in.label + " " + ctx.ambient().mor_name(h.front()) + ": Gamma of a map via the lift");
      }
  }
  if (o.pass) o.detail = std::to_string(objects) + " objects, " + std::to_string(maps) + " maps";
  return o;
}

Outcome beck_chevalley() {
  Outcome o;
  long families = 0, skipped = 0;
  for (const auto& in : shipped()) {
    auto objs = in.ctx->sample_objects();
    if (objs.size() > 5) objs.resize(5);
    const size_t k = objs.size();
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      if (__builtin_popcount(mask) > 4) continue;
      std::vector<Obj> fam;
      for (size_t i = 0; i < k; ++i)
        if (mask >> i & 1) fam.push_back(objs[i]);
      if (!product_in_universe(*in.ctx, fam)) {
        ++skipped;
        continue;
      }
      ++families;
      try {
        auto r = beck_chevalley_check(*in.ctx, fam);
        if (!r.forgetful || !r.spectrum) o.fail(in.label + ": " + r.failure);
      } catch (const category_error& e) {
        o.fail(in.label + ": " + e.what());
      }
    }
  }
  o.detail = (o.pass ? "" : o.detail + "; ") + std::to_string(families) + " families, " + std::to_string(skipped) +
             " skipped with products outside the universe";
  return o;
}

Outcome transport_check() {
  Outcome o;
  long runs = 0;
  auto one = [&](const ContextMorphism& cm, const std::string& n, const BSpace& b) {
    auto t = transport(cm, b);
    ++runs;
    if (!t.preimage_formula) o.fail(cm.name + " " + n + ": preimage formula " + t.failure);
    if (!t.flat_is_mate) o.fail(cm.name + " " + n + ": mate " + t.failure);
    if (!t.ok()) o.fail(cm.name + " " + n + ": " + t.failure);
  };
  auto insts = shipped();
  for (const auto& in : insts) {
    auto cm = identity_context_morphism(*in.ctx);
    for (const auto& [n, s] : fixtures(in)) one(cm, n, s);
    for (Obj b : in.ctx->sample_objects()) {
      if (in.label == "zariski" && in.ctx->ambient().obj_name(b) != "Z/12") continue;
      one(cm, "point " + in.ctx->ambient().obj_name(b), point_bspace(*in.ctx, b));
    }
  }
  for (const char* f : {"chain_to_chain3", "point_to_two_locals"}) {
    auto cm = load_context_morphism(data(std::string("morphisms/") + f + ".json"));
    if (!validate_context_morphism(cm).ok()) o.fail(std::string(f) + ": invalid context morphism");
    for (Obj b : cm.c1->sample_objects()) one(cm, "point", point_bspace(*cm.c1, b));
    if (std::string(f) == "chain_to_chain3")
      for (const char* s : {"sierpinski_chain", "discrete_chain"})
        one(cm, s, load_bspace(*cm.c1, data(std::string("bspaces/") + s + ".json")));
  }
  if (o.pass) o.detail = std::to_string(runs) + " transports";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> known;
  app.add_option("--known-failure", known, "criterion expected to fail");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "context_validation", 30000, context_validation},
      {2, "zariski_oracle", 5000, zariski_oracle},
      {3, "stone_oracle", 5000, stone_oracle},
      {4, "basis_laws", 0, basis_laws},
      {5, "adjunction_bijectivity", 60000, adjunction},
      {6, "stalk_theorems", 0, stalk_theorems},
      {7, "separation_classifier", 0, separation},
      {8, "duality_roundtrip", 30000, duality_roundtrip},
      {9, "beck_chevalley", 0, beck_chevalley},
      {10, "transport", 0, transport_check},
  };
  std::set<int> failed;
  for (const auto& c : all) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (c.limit_ms > 0 && ms >= c.limit_ms) o.fail("runtime over the limit; " + o.detail);
    if (!o.pass) failed.insert(c.id);
    std::ostringstream line;
    line << (o.pass ? "PASS " : "FAIL ") << c.id << " " << c.name << " " << static_cast<long>(ms) << "ms";
    if (c.limit_ms > 0) line << " (limit " << static_cast<long>(c.limit_ms) << "ms)";
    line << " : " << o.detail;
    std::cout << line.str() << std::endl;
  }
  return failed == std::set<int>(known.begin(), known.end()) ? 0 : 1;
}
