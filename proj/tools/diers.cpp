// Command-line driver: spec, check, search, export.
//
// Exit codes: 0 success, 1 a verification failed, 2 bad input.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "diers/duality.hpp"
#include "diers/instances.hpp"

using namespace diers;

namespace {

struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string instance = "zariski";
  std::string object;
  std::vector<std::string> bspaces;
  std::string morphism;
  std::string emit = "json";
  std::string suite = "all";
  int max_size = 0;  // 0: instance default
  uint64_t seed = 1;
  int count = 200;
};

std::unique_ptr<DiersContext> open_instance(const Options& o) {
  if (o.max_size > 0) {
    if (o.instance == "zariski") return std::make_unique<ZariskiContext>(o.max_size);
    if (o.instance == "boolean") return std::make_unique<BooleanContext>(o.max_size);
  }
  try {
    return make_context(o.instance);
  } catch (const std::exception& e) {
    throw input_error(e.what());
  }
}

Obj open_object(const DiersContext& ctx, const std::string& name) {
  try {
    return find_object(ctx, name);
  } catch (const std::exception& e) {
    throw input_error(e.what());
  }
}

BSpace open_bspace(const DiersContext& ctx, const std::string& path) {
  try {
    return load_bspace(ctx, path);
  } catch (const std::exception& e) {
    throw input_error(path + ": " + e.what());
  }
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

// One line per check in text mode, a single document otherwise.
class Report {
 public:
  void add(const std::string& suite, const std::string& invariant, const std::string& subject, bool pass,
           const std::string& witness = "", json detail = nullptr) {
    json c{{"suite", suite}, {"invariant", invariant}, {"subject", subject}, {"pass", pass}};
    if (!pass && !witness.empty()) c["witness"] = witness;
    if (!detail.is_null()) c["detail"] = std::move(detail);
    checks_.push_back(std::move(c));
    if (!pass) ok_ = false;
  }
  void add_dot(std::string d) { dots_.push_back(std::move(d)); }
  bool ok() const { return ok_; }

  void emit(const std::string& fmt, const std::string& instance) const {
    if (fmt == "dot") {
      for (const auto& d : dots_) std::cout << d;
      return;
    }
    if (fmt == "text") {
      for (const auto& c : checks_) {
        std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["suite"].get<std::string>() << " "
                  << c["invariant"].get<std::string>() << " " << c["subject"].get<std::string>();
        if (c.contains("witness")) std::cout << " : " << c["witness"].get<std::string>();
        std::cout << "\n";
      }
      std::cout << (ok_ ? "PASS" : "FAIL") << " " << checks_.size() << " checks\n";
      return;
    }
    long failed = 0;
    for (const auto& c : checks_) failed += !c["pass"].get<bool>();
    print({{"instance", instance}, {"ok", ok_}, {"checks", checks_}, {"failed", failed}});
  }

 private:
  json checks_ = json::array();
  std::vector<std::string> dots_;
  bool ok_ = true;
};

std::string name_of(const DiersContext& ctx, Obj b) { return ctx.ambient().obj_name(b); }

void suite_context(const DiersContext& ctx, Report& r) {
  auto v = validate_context(ctx);
  for (const auto& o : v.objects) {
    std::string s = name_of(ctx, o.object);
    r.add("context", "multi_reflection", s, o.multi_reflection, o.mr_detail);
    r.add("context", "diagonal_universality", s, o.diagonal, o.du_detail);
    r.add("context", "diers_colimit", s, o.diers, o.diers_detail);
  }
}

void suite_spectrum(const DiersContext& ctx, Report& r) {
  for (Obj b : ctx.sample_objects()) {
    auto l = check_basis_laws(ctx, b);
    r.add("spectrum", "basis_laws", name_of(ctx, b), l.ok(), l.failure, l.to_json(ctx));
  }
  auto s = classify_separation(ctx);
  r.add("spectrum", "separation_classifier", ctx.name(), s.agree(), s.witness, s.to_json());
}

void suite_sheaf(const DiersContext& ctx, Report& r) {
  for (Obj b : ctx.sample_objects()) {
    std::string n = name_of(ctx, b);
    auto ss = structural_sheaf(ctx, b);
    auto d = check_descent(ss.sheaf(), true);
    r.add("sheaf", "descent", n, d.ok, d.ok ? "" : "cover of open " + std::to_string(d.open), d.to_json());
    r.add("sheaf", "stalk_is_local", n, ss.stalks_ok, "stalk comparison is not an iso");
    std::string why;
    r.add("sheaf", "uspace", n, check_uspace(ctx, ss.uspace, &why), why);
  }
}

void suite_adjunction(const DiersContext& ctx, Report& r, size_t bound) {
  const auto objs = ctx.sample_objects();
  SpecCache cache(ctx);
  for (Obj b : objs)
    for (Obj c : objs) {
      const auto& x = cache.sheaf(c);
      if (!x.stalks_ok) continue;
      if (ctx.ambient().hom(b, global_sections(x.uspace)).size() > bound) continue;
      auto a = verify_adjunction(ctx, b, x.uspace, 4096, &cache);
      r.add("adjunction", "transpose_bijection", name_of(ctx, b) + " | Spec " + name_of(ctx, x.base), a.ok(), a.failure,
            a.to_json());
    }
}

std::vector<std::pair<std::string, BSpace>> bspace_fixtures(const DiersContext& ctx, const Options& o) {
  std::vector<std::pair<std::string, BSpace>> out;
  for (const auto& p : o.bspaces) out.emplace_back(p, open_bspace(ctx, p));
  if (!out.empty()) return out;
  auto objs = ctx.sample_objects();
  for (size_t i = 0; i + 1 < objs.size() && out.size() < 2; ++i) {
    std::vector<Obj> fam{objs[i], objs[i + 1]};
    out.emplace_back("discrete(" + name_of(ctx, fam[0]) + ", " + name_of(ctx, fam[1]) + ")",
                     discrete_embedding(ctx, fam));
  }
  return out;
}

void suite_bspace(const DiersContext& ctx, const Options& o, Report& r) {
  for (const auto& [n, s] : bspace_fixtures(ctx, o)) {
    std::string why;
    bool sheaf = check_bspace(s, &why);
    r.add("bspace", "sheaf", n, sheaf, why);
    if (!sheaf) continue;
    auto st = bspace_structural_sheaf(ctx, s);
    const auto& g = st.glued;
    r.add("bspace", "intersection_law", n, g.intersection_law, g.failure);
    r.add("bspace", "key_lemma", n, g.key_lemma, g.failure);
    r.add("bspace", "stalk_lemma", n, g.stalk_lemma, g.failure);
    r.add("bspace", "stalks_local", n, st.stalks_ok, st.failure);
    r.add("bspace", "unit_natural", n, st.unit_natural, st.failure);
    r.add("bspace", "iota_pullback_iso", n, st.iota_iso, st.failure);
    r.add("bspace", "projection_sharp", n, st.p_sharp_ok, st.failure);
    auto a = verify_generalized_adjunction(ctx, s, st.uspace);
    r.add("bspace", "generalized_adjunction", n, a.ok(), a.failure, a.to_json());
    r.add_dot(g.to_dot(ctx));
  }
  auto objs = ctx.sample_objects();
  for (size_t k = 1; k <= 4 && k <= objs.size(); ++k) {
    std::vector<Obj> fam(objs.begin(), objs.begin() + static_cast<long>(k));
    std::string n;
    for (Obj b : fam) n += (n.empty() ? "" : ", ") + name_of(ctx, b);
    try {
      auto bc = beck_chevalley_check(ctx, fam);
      r.add("bspace", "beck_chevalley", "{" + n + "}", bc.ok(), bc.failure, bc.to_json());
    } catch (const category_error& e) {
      r.add("bspace", "beck_chevalley", "{" + n + "}", false, e.what());
    }
  }
}

void suite_duality(const DiersContext& ctx, const Options& o, Report& r) {
  Duality d(ctx);
  for (Obj b : ctx.sample_objects()) {
    std::string n = name_of(ctx, b);
    auto f = extract_multiadjoint(d, b);
    r.add("duality", "recovers_local_units", n, f.ok(), f.failure, f.to_json(ctx));
    r.add_dot(f.to_dot(ctx));
    auto ss = structural_sheaf(ctx, b);
    if (!ss.stalks_ok) continue;
    r.add("duality", "gamma_via_lift", n, global_sections_via_lift(d, ss.uspace) == global_sections(ss.uspace),
          "opcartesian lift differs from the global sections");
    auto ra = verify_restricted_adjunction(d, b, ss.uspace);
    r.add("duality", "restricted_adjunction", n, ra.ok(), ra.failure, ra.to_json());
  }
  ContextMorphism cm;
  try {
    cm = o.morphism.empty() ? identity_context_morphism(ctx) : load_context_morphism(o.morphism);
  } catch (const std::exception& e) {
    throw input_error(o.morphism + ": " + e.what());
  }
  auto v = validate_context_morphism(cm);
  r.add("duality", "context_morphism", cm.name, v.ok(), v.failure, v.to_json());
  r.add("duality", "gstar_preserves_du", cm.name, v.gstar_preserves_du, v.failure);
  r.add("duality", "factorization_lemma", cm.name, v.factorization_lemma, v.failure);
  if (!v.ok()) return;
  Options src = o;
  if (!o.morphism.empty()) src.bspaces.clear();
  for (const auto& [n, s] : bspace_fixtures(*cm.c1, src)) {
    auto t = transport(cm, s);
    r.add("duality", "transport", n, t.ok(), t.failure, t.to_json(*cm.c2));
  }
}

int cmd_spec(const Options& o) {
  auto ctx = open_instance(o);
  if (!o.bspaces.empty()) {
    auto s = open_bspace(*ctx, o.bspaces.front());
    auto st = bspace_structural_sheaf(*ctx, s);
    if (o.emit == "dot") {
      std::cout << st.glued.to_dot(*ctx);
    } else if (o.emit == "text") {
      std::cout << "glued spectrum: " << st.glued.points.size() << " points over " << s.size() << "\n";
      for (size_t i = 0; i < st.glued.points.size(); ++i)
        std::cout << "  " << i << ": base " << st.glued.points[i].base << ", local "
                  << ctx->local().obj_name(st.uspace.local[i]) << "\n";
    } else {
      print({{"instance", ctx->name()}, {"bspace", o.bspaces.front()}, {"structure", st.to_json(*ctx)}});
    }
    return st.stalks_ok ? 0 : 1;
  }
  if (o.object.empty()) throw input_error("spec needs --object or --bspace");
  Obj b = open_object(*ctx, o.object);
  auto ss = structural_sheaf(*ctx, b);
  if (o.emit == "dot") {
    std::cout << ss.spec.to_dot(*ctx);
  } else if (o.emit == "text") {
    std::cout << "Spec " << name_of(*ctx, b) << ": " << ss.spec.points.size() << " points\n";
    for (size_t i = 0; i < ss.spec.points.size(); ++i)
      std::cout << "  " << i << ": " << ctx->ambient().mor_name(ss.spec.points[i].unit) << " -> "
                << ctx->local().obj_name(ss.spec.points[i].local) << "\n";
    std::cout << "opens: " << ss.spec.space.opens().size() << ", eta iso: " << (ss.eta_iso ? "yes" : "no") << "\n";
  } else {
    print({{"instance", ctx->name()},
           {"object", name_of(*ctx, b)},
           {"spectrum", ss.spec.to_json(*ctx)},
           {"structure", ss.to_json(*ctx)}});
  }
  return ss.stalks_ok ? 0 : 1;
}

int cmd_check(const Options& o) {
  static const std::vector<std::string> suites{"context", "spectrum", "sheaf", "adjunction", "bspace", "duality"};
  if (o.suite != "all" && std::find(suites.begin(), suites.end(), o.suite) == suites.end())
    throw input_error("unknown suite '" + o.suite + "'");
  auto ctx = open_instance(o);
  Report r;
  auto want = [&](const std::string& s) { return o.suite == "all" || o.suite == s; };
  auto run = [&](const std::string& s, const std::function<void()>& f) {
    if (!want(s)) return;
    try {
      f();
    } catch (const category_error& e) {
      r.add(s, "runs", ctx->name(), false, e.what());
    }
  };
  run("context", [&] { suite_context(*ctx, r); });
  run("spectrum", [&] { suite_spectrum(*ctx, r); });
  run("sheaf", [&] { suite_sheaf(*ctx, r); });
  run("adjunction", [&] { suite_adjunction(*ctx, r, 64); });
  run("bspace", [&] { suite_bspace(*ctx, o, r); });
  run("duality", [&] { suite_duality(*ctx, o, r); });
  r.emit(o.emit, ctx->name());
  return r.ok() ? 0 : 1;
}

int cmd_search(const Options& o) {
  std::mt19937_64 rng(o.seed);
  int max = o.max_size > 0 ? o.max_size : 4;
  json cases = json::array();
  long valid = 0, agree = 0;
  for (int i = 0; i < o.count; ++i) {
    auto ctx = random_thin_context(rng, max, max);
    if (!validate_context(*ctx).ok()) continue;
    ++valid;
    auto s = classify_separation(*ctx);
    if (s.agree()) {
      ++agree;
      continue;
    }
    json c = s.to_json();
    c["index"] = i;
    c["context"] = ctx->to_json();
    cases.push_back(std::move(c));
  }
  if (o.emit == "text") {
    std::cout << "seed " << o.seed << ": " << valid << " valid contexts, " << agree << " agree\n";
    for (const auto& c : cases) std::cout << "  disagreement at #" << c["index"] << "\n";
  } else {
    print({{"seed", o.seed}, {"generated", o.count}, {"valid", valid}, {"agree", agree}, {"disagreements", cases}});
  }
  return valid == agree ? 0 : 1;
}

int cmd_export(const Options& o) {
  if (!o.morphism.empty()) {
    ContextMorphism cm;
    try {
      cm = load_context_morphism(o.morphism);
    } catch (const std::exception& e) {
      throw input_error(o.morphism + ": " + e.what());
    }
    print(validate_context_morphism(cm).to_json());
    return 0;
  }
  auto ctx = open_instance(o);
  if (!o.bspaces.empty()) {
    print(open_bspace(*ctx, o.bspaces.front()).to_json());
    return 0;
  }
  if (!o.object.empty()) {
    print(ctx->ambient().obj_json(open_object(*ctx, o.object)));
    return 0;
  }
  if (auto* t = dynamic_cast<const TableContext*>(ctx.get())) {
    print(t->to_json());
    return 0;
  }
  json objs = json::array(), locals = json::array();
  for (Obj b : ctx->sample_objects()) objs.push_back(name_of(*ctx, b));
  for (Obj a : ctx->local_objects()) locals.push_back(ctx->local().obj_name(a));
  print({{"instance", ctx->name()}, {"objects", objs}, {"local_objects", locals}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diers spectra on finite instances"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* c) {
    c->add_option("--instance", o.instance, "trivial | zariski | boolean | table:<path>");
    c->add_option("--emit", o.emit, "json | dot | text")->check(CLI::IsMember({"json", "dot", "text"}));
    c->add_option("--max-size", o.max_size, "ring order or atom bound")->check(CLI::NonNegativeNumber);
  };
  auto* spec = app.add_subcommand("spec", "Spec of an object or of a B-space file");
  common(spec);
  spec->add_option("--object", o.object, "object name, or 'any'");
  spec->add_option("--bspace", o.bspaces, "B-space JSON file");
  auto* check = app.add_subcommand("check", "run verification suites");
  common(check);
  check->add_option("--suite", o.suite, "context | spectrum | sheaf | adjunction | bspace | duality | all");
  check->add_option("--bspace", o.bspaces, "B-space fixtures for the bspace and duality suites");
  check->add_option("--morphism", o.morphism, "context morphism JSON for the duality suite");
  check->add_option("--seed", o.seed);
  auto* search = app.add_subcommand("search", "random thin contexts against the separation classifier");
  common(search);
  search->add_option("--seed", o.seed);
  search->add_option("--count", o.count)->check(CLI::PositiveNumber);
  auto* exp = app.add_subcommand("export", "re-serialize a loaded artifact");
  common(exp);
  exp->add_option("--object", o.object);
  exp->add_option("--bspace", o.bspaces);
  exp->add_option("--morphism", o.morphism);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    if (*spec) return cmd_spec(o);
    if (*check) return cmd_check(o);
    if (*search) return cmd_search(o);
    return cmd_export(o);
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const category_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
