// Command-line front end: metric validation, union embedding, covers, the
// 1/2/3 lower-bound instance, gluing, and the acceptance self-test.
//
// Exit codes: 0 success, 1 input error (JSON description on stderr),
// 2 audit violation (the report is still written).

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "metric_union/metric_union.hpp"

namespace {

using metric_union::io::json;
namespace mu = metric_union;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitAudit = 2;

struct RunConfig {
  std::string command;
  std::string input_path;
  std::string output_path;
  std::optional<double> alpha;
  std::uint64_t seed = 1;
  double tol = 1e-7;
  std::optional<double> epsilon;
  std::size_t n = 64;
};

json read_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mu::InputError("FileNotFound", "cannot open input file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw mu::InputError("JsonParseError", e.what());
  }
}

void write_output(const RunConfig& cfg, const std::string& text) {
  if (cfg.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) throw mu::InputError("FileNotWritable", "cannot write " + cfg.output_path);
  out << text;
}

mu::EmbedOptions embed_options(const RunConfig& cfg) {
  mu::EmbedOptions o;
  o.alpha = cfg.alpha;
  o.tol = cfg.tol;
  o.strict = false;
  o.threads = mu::configured_threads();
  return o;
}

json optional_number(const json& j, const char* key) { return j.contains(key) ? j.at(key) : json(); }

int run_check_metric(const RunConfig& cfg) {
  if (cfg.input_path.empty()) throw mu::InputError("MissingInput", "check-metric needs --input");
  const json in = read_input(cfg.input_path);
  const mu::FiniteMetricSpace x = mu::io::space_of(in.contains("space") ? in.at("space") : in);
  write_output(cfg, mu::io::dump(json{{"valid", true}, {"size", x.size()}, {"diameter", x.diameter()}}));
  return kExitOk;
}

int run_embed(const RunConfig& cfg) {
  mu::EmbedOptions opt = embed_options(cfg);
  mu::UnionEmbedding e;
  json source;
  if (cfg.input_path.empty()) {
    const mu::TestInstance inst = mu::generate_instance(cfg.seed, 0);
    e = mu::embed_union(inst.space, inst.partition, inst.phi_a, inst.phi_b, opt);
    source = json{{"generator", "testgen"}, {"seed", cfg.seed}, {"size", inst.space.size()}};
  } else {
    const json in = read_input(cfg.input_path);
    if (!in.contains("space") || !in.contains("partition"))
      throw mu::InputError("SchemaError", "embed input needs \"space\" and \"partition\"");
    const mu::FiniteMetricSpace x = mu::io::space_of(in.at("space"));
    const mu::UnionPartition p = mu::io::partition_of(x, in.at("partition"));
    if (!opt.alpha && in.contains("alpha")) opt.alpha = in.at("alpha").get<double>();
    const bool has_a = in.contains("phi_a"), has_b = in.contains("phi_b");
    const mu::PointCloud phi_a =
        has_a ? mu::io::points_of(in.at("phi_a"), "phi_a") : mu::mds_isometric_embed(x.restrict(p.idx_a));
    const mu::PointCloud phi_b =
        has_b ? mu::io::points_of(in.at("phi_b"), "phi_b") : mu::mds_isometric_embed(x.restrict(p.idx_b));
    e = mu::embed_union(x, p, phi_a, phi_b, opt);
    source = json{{"file", cfg.input_path}, {"size", x.size()}, {"phi_a", has_a ? "given" : "mds"},
                  {"phi_b", has_b ? "given" : "mds"}, {"seed", optional_number(in, "seed")}};
  }
  json out{{"input", source}};
  const json body = mu::io::to_json(e);
  for (auto& [k, v] : body.items()) out[k] = v;
  write_output(cfg, mu::io::dump(out));
  return e.passed() ? kExitOk : kExitAudit;
}

int run_cover(const RunConfig& cfg) {
  const double alpha = cfg.alpha.value_or(mu::kGeneralAlpha);
  mu::FiniteMetricSpace x;
  mu::UnionPartition p;
  if (cfg.input_path.empty()) {
    mu::TestInstance inst = mu::generate_instance(cfg.seed, 0);
    x = std::move(inst.space);
    p = std::move(inst.partition);
  } else {
    const json in = read_input(cfg.input_path);
    if (!in.contains("space") || !in.contains("partition"))
      throw mu::InputError("SchemaError", "cover input needs \"space\" and \"partition\"");
    x = mu::io::space_of(in.at("space"));
    p = mu::io::partition_of(x, in.at("partition"));
  }
  const mu::CoverResult c = mu::build_cover(x, p, alpha);
  const mu::CoverCheck check = mu::verify_cover(x, p, c);
  json out = mu::io::to_json(c, mu::f_lipschitz_bound(alpha));
  out["property1"] = check.property1;
  out["property2"] = check.property2;
  out["nearest_exact"] = check.nearest_exact;
  write_output(cfg, mu::io::dump(out));
  return check.property1 && check.property2 && check.nearest_exact ? kExitOk : kExitAudit;
}

int run_lowerbound(const RunConfig& cfg) {
  const mu::BipartiteSplit split = mu::sample_split(cfg.n, cfg.seed);
  const double bound = mu::certified_lower_bound(split);
  const std::size_t n = split.n;
  const mu::Matrix l = mu::complete_bipartite_laplacian(n);
  const mu::Matrix l1 = mu::laplacian(2 * n, split.e1);
  const mu::Matrix l2 = mu::laplacian(2 * n, split.e2);
  const bool holds = mu::sandwich_holds(l, l1, l2, split.delta_star);
  const bool minimal = !mu::sandwich_holds(l, l1, l2, 0.9 * split.delta_star);

  auto [x, p] = mu::build_123_metric(split);
  const mu::UnionEmbedding emb = mu::embed_union_isometric(x, p, embed_options(cfg));
  const mu::PointCloud mds = mu::mds_best_effort(x);
  json probes = json::array();
  bool ok = holds && minimal;
  for (const auto& [name, images] : {std::pair<const char*, const mu::PointCloud*>{"embed_union", &emb.full},
                                     std::pair<const char*, const mu::PointCloud*>{"mds_best_effort", &mds}}) {
    const double d = mu::distortion_of(x, *images, std::nullopt, mu::configured_threads()).distortion;
    const bool respected = d >= bound - 1e-9;
    json probe{{"embedding", name}, {"distortion", d}, {"respects_bound", respected}};
    try {
      const mu::RatioCheck rc = mu::ratio_check(split, *images);
      probe["e1_over_all"] = rc.e1_over_all;
      probe["e2_over_all"] = rc.e2_over_all;
      probe["ratio_in_range"] = true;
    } catch (const mu::Error& e) {
      probe["ratio_in_range"] = false;
      probe["ratio_error"] = e.what();
      ok = false;
    }
    ok = ok && respected;
    probes.push_back(std::move(probe));
  }
  json out{{"split", mu::io::to_json(split)},
           {"delta_star", split.delta_star},
           {"certified_bound", bound},
           {"audits", {{"sandwich_holds", holds}, {"fails_at_0.9_delta", minimal}, {"embeddings", probes}}}};
  if (cfg.epsilon) {
    const mu::EpsilonTarget t = mu::target_epsilon(*cfg.epsilon, cfg.seed);
    json trail = json::array();
    for (auto [tn, d] : t.trail) trail.push_back(json{{"n", tn}, {"median_delta", d}});
    out["epsilon_target"] = json{{"epsilon", t.epsilon}, {"n", t.n},         {"median_delta", t.median_delta},
                                 {"bound", t.bound},     {"reached", t.reached}, {"trail", trail}};
  }
  write_output(cfg, mu::io::dump(out));
  return ok ? kExitOk : kExitAudit;
}

int run_glue(const RunConfig& cfg) {
  if (cfg.input_path.empty()) throw mu::InputError("MissingInput", "glue needs --input");
  const mu::GlueInstance g = mu::io::glue_of(read_input(cfg.input_path));
  const mu::ExternalExtension ext = mu::external_extend(g, embed_options(cfg));
  json out{{"glued",
            {{"size", ext.glued.space.size()},
             {"identified", g.a_idx.size()},
             {"d_f", ext.d_f},
             {"v_scale", ext.glued.f.scale}}},
           {"params", mu::io::to_json(ext.embedding.params)},
           {"f1", mu::io::to_json(ext.f1)},
           {"f2", mu::io::to_json(ext.f2)},
           {"distortion_f1", ext.distortion_f1},
           {"distortion_f2", ext.distortion_f2},
           {"bound", ext.bound},
           {"passed", ext.passed()},
           {"audit", mu::io::to_json(ext.audit)}};
  write_output(cfg, mu::io::dump(out));
  return ext.passed() ? kExitOk : kExitAudit;
}

int run_selftest(const RunConfig& cfg) {
  mu::acceptance::SuiteConfig sc;
  sc.seed = cfg.seed;
  sc.tol = cfg.tol;
  sc.threads = mu::configured_threads();
  sc.verbose_timing = true;
  const auto t0 = std::chrono::steady_clock::now();
  const mu::acceptance::SuiteReport rep = mu::acceptance::run_all(sc);
  std::fprintf(stderr, "selftest: %.2f s\n",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  const std::string table = mu::acceptance::table(rep);
  if (cfg.output_path.empty()) {
    std::cout << table;
  } else {
    std::cout << table;
    write_output(cfg, mu::io::dump(rep.to_json()));
  }
  return rep.passed() ? kExitOk : kExitAudit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-distortion Euclidean embeddings of unions of metric spaces"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  double alpha = 0.0, epsilon = 0.0;
  auto* alpha_opt = app.add_option("--alpha", alpha, "cover parameter (overrides the default choice)");
  auto* eps_opt = app.add_option("--epsilon", epsilon, "lowerbound: target 3 - epsilon, 0 < epsilon < 1");
  app.add_option("--input", cfg.input_path, "input JSON file");
  app.add_option("--output", cfg.output_path, "output file (default: stdout)");
  app.add_option("--seed", cfg.seed, "seed for every random choice");
  app.add_option("--tol", cfg.tol, "relative solver tolerance")->capture_default_str();
  app.add_option("--n", cfg.n, "lowerbound: points per side")->capture_default_str();

  const char* commands[][2] = {{"check-metric", "validate a distance matrix"},
                               {"embed", "embed A ∪ B and audit every bound"},
                               {"cover", "build and verify an alpha-cover of A with respect to B"},
                               {"lowerbound", "sample the 1/2/3 instance and certify its lower bound"},
                               {"glue", "external bi-Lipschitz extension of a map between point sets"},
                               {"selftest", "run the acceptance suite"}};
  for (auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (*alpha_opt) cfg.alpha = alpha;
  if (*eps_opt) cfg.epsilon = epsilon;

  try {
    if (cfg.command == "check-metric") return run_check_metric(cfg);
    if (cfg.command == "embed") return run_embed(cfg);
    if (cfg.command == "cover") return run_cover(cfg);
    if (cfg.command == "lowerbound") return run_lowerbound(cfg);
    if (cfg.command == "glue") return run_glue(cfg);
    return run_selftest(cfg);
  } catch (const mu::AuditViolation& e) {
    std::cerr << mu::io::dump(mu::io::error_json(e));
    return kExitAudit;
  } catch (const mu::Error& e) {
    std::cerr << mu::io::dump(mu::io::error_json(e));
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << mu::io::dump(json{{"error", "SchemaError"}, {"message", e.what()}});
    return kExitInput;
  }
}
