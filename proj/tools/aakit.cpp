// Command-line front end: synthetic data, fitting, hull selection, sketching
// and parameter sweeps. Every output file carries the run manifest.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aakit/aakit.hpp"
#include "aakit/serialize.hpp"

#ifndef AAKIT_BUILD_ID
#define AAKIT_BUILD_ID "aakit-dev"
#endif

namespace {

using namespace aakit;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNumeric = 4;

struct Environment {
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
};

std::uint64_t parse_env_u64(const char* name, const char* text) {
  std::uint64_t value = 0;
  const std::string_view s(text);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ContractViolation(std::string(name) + " must be a nonnegative integer, got '" + text + "'");
  return value;
}

Environment read_environment() {
  Environment env;
  if (const char* s = std::getenv("AAKIT_SEED"); s && *s) env.seed = parse_env_u64("AAKIT_SEED", s);
  if (const char* w = std::getenv("AAKIT_WORKERS"); w && *w)
    env.workers = resolve_workers(parse_env_u64("AAKIT_WORKERS", w));
  return env;
}

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

struct Input {
  DenseMatrix x;
  std::uint64_t digest = 0;
  std::size_t original_columns = 0;
  std::vector<std::size_t> kept;  // original index of every retained column
};

// Exact duplicate observations are dropped unless asked otherwise: they add
// nothing to the hull and only tie the projection counts.
Input load_input(const std::string& path, bool header, bool keep_duplicates) {
  Input in;
  in.x = read_matrix(path, CsvOptions{header});
  in.digest = content_digest(in.x);
  in.original_columns = in.x.cols();
  if (keep_duplicates) {
    in.kept.resize(in.x.cols());
    for (std::size_t j = 0; j < in.kept.size(); ++j) in.kept[j] = j;
  } else {
    in.kept = distinct_column_indices(in.x);
    if (in.kept.size() < in.x.cols()) {
      std::cerr << "note: dropped " << in.x.cols() - in.kept.size() << " duplicate observation(s)\n";
      in.x = select_columns(in.x, in.kept);
    }
  }
  return in;
}

Json input_json(const std::string& path, const Input& in) {
  Json j{{"path", path}, {"rows", in.x.rows()}, {"columns_read", in.original_columns}, {"columns_used", in.x.cols()}};
  if (in.kept.size() != in.original_columns) j["retained_columns"] = in.kept;
  return j;
}

Json manifest(const std::string& command, Json parameters, std::uint64_t seed, std::uint64_t digest,
              std::size_t workers, std::optional<std::map<std::string, double>> timings) {
  RunManifest m;
  m.command = command;
  m.parameters = std::move(parameters);
  m.seed = seed;
  m.input_digest = digest;
  m.timings = std::move(timings);
  m.build_id = AAKIT_BUILD_ID;
  m.workers = workers;
  return to_json(m);
}

void write_json(const std::string& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string input;
  bool header = false;
  std::string method = "aaa";
  std::size_t k = 1;
  std::size_t rank = 0;  // 0: method default
  double variance_keep = 0.9999;
  std::size_t krylov_s = 0;  // 0: ⌈log N⌉
  bool log2_depth = false;
  std::uint64_t projections = 10000;
  double eta = 0.003;
  double tol = 1e-3;
  std::size_t max_iter = 200;
  std::uint64_t seed = 0;
  std::string out;
  std::string metrics;
  bool keep_duplicates = false;
  bool timings = false;
};

struct MetricsRow {
  std::string method;
  std::size_t k = 0;
  std::string p, s, m, eta;
  double objective = 0.0;
  double explained = 0.0;
  std::size_t t = 0;
  std::string wall_ms;
};

const char* kMetricsHeader = "method,k,p,s,M,eta,objective,explained_variance,T,wall_ms\n";

std::string metrics_line(const MetricsRow& r) {
  return r.method + "," + std::to_string(r.k) + "," + r.p + "," + r.s + "," + r.m + "," + r.eta + "," +
         fmt(r.objective) + "," + fmt(r.explained) + "," + std::to_string(r.t) + "," + r.wall_ms + "\n";
}

int run_fit(const FitArgs& a, const Environment& env) {
  const std::uint64_t seed = env.seed.value_or(a.seed);
  const double start = now_ms();
  const Input in = load_input(a.input, a.header, a.keep_duplicates);
  const DenseMatrix& x = in.x;

  AAConfig aa;
  aa.k = a.k;
  aa.rel_tol = a.tol;
  aa.max_outer_iters = a.max_iter;
  aa.seed = seed;
  aa.workers = env.workers;

  Json params{{"method", a.method}, {"k", a.k},     {"tol", a.tol},
              {"max_iter", a.max_iter}, {"header", a.header}, {"keep_duplicates", a.keep_duplicates}};
  MetricsRow row;
  row.method = a.method;
  row.k = a.k;
  Json result;
  std::map<std::string, double> stage_ms;

  if (a.method == "exact") {
    const AAModel model = fit(x, x, aa);
    row.objective = model.objective_trace.back();
    row.explained = explained_variance(x, model);
    row.t = x.cols();
    result = Json{{"model", to_json(model)}, {"objective", row.objective}, {"explained_variance", row.explained}};
  } else if (a.method == "svd") {
    const SvdAAResult r = a.rank ? fit_svd_aa_rank(x, a.k, a.rank, aa) : fit_svd_aa(x, a.k, a.variance_keep, aa);
    params[a.rank ? "rank" : "variance_keep"] = a.rank ? Json(a.rank) : Json(a.variance_keep);
    row.objective = r.original_objective;
    row.explained = explained_variance(x, r.model);
    row.p = std::to_string(r.rank);
    row.t = x.cols();
    result = Json{{"model", to_json(r.model)},
                  {"rank", r.rank},
                  {"original_objective", r.original_objective},
                  {"explained_variance", row.explained}};
  } else {
    AAAConfig cfg;
    cfg.k = a.k;
    cfg.p = a.rank ? a.rank : 20;
    if (a.krylov_s) cfg.s = a.krylov_s;
    cfg.s_log_base = a.log2_depth ? LogBase::Two : LogBase::Natural;
    cfg.m = a.projections;
    cfg.eta = a.eta;
    cfg.seed = seed;
    cfg.aa = aa;
    cfg.workers = env.workers;
    params["rank"] = cfg.p;
    params["krylov_s"] = a.krylov_s ? Json(a.krylov_s) : Json(nullptr);
    params["log2_depth"] = a.log2_depth;
    params["projections"] = cfg.m;
    params["eta"] = cfg.eta;
    const AAAResult r = fit_aaa(x, cfg);
    for (const auto& w : r.sketch.warnings) std::cerr << "warning: " << w << "\n";
    row.objective = r.original_objective;
    row.explained = explained_variance(x, r.model);
    row.p = std::to_string(r.sketch.p);
    row.s = std::to_string(r.sketch.s);
    row.m = std::to_string(cfg.m);
    row.eta = fmt(cfg.eta);
    row.t = r.support.indices.size();
    result = to_json(r, a.timings);
    result["explained_variance"] = row.explained;
    stage_ms = {{"sketch_ms", r.timings.sketch_ms}, {"hull_ms", r.timings.hull_ms}, {"fit_ms", r.timings.fit_ms}};
  }

  std::optional<std::map<std::string, double>> timings;
  if (a.timings) {
    stage_ms["wall_ms"] = now_ms() - start;
    row.wall_ms = fmt(stage_ms["wall_ms"]);
    timings = stage_ms;
  }
  const Json man = manifest("fit", params, seed, in.digest, env.workers, timings);
  write_json(a.out, Json{{"manifest", man}, {"input", input_json(a.input, in)}, {"method", a.method}, {"result", result}});
  const std::string metrics_path = a.metrics.empty() ? a.out + ".metrics.csv" : a.metrics;
  write_text(metrics_path, "# " + man.dump() + "\n" + kMetricsHeader + metrics_line(row));
  std::cout << a.method << ": objective " << fmt(row.objective) << ", explained variance " << fmt(row.explained)
            << "\n";
  return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string kind;
  std::size_t n = 500;
  std::size_t d = 20;
  std::size_t k = 4;
  std::size_t rank = 5;
  double noise = 0.0;
  std::vector<double> profile;
  std::size_t sides = 0;
  std::size_t interior = 100;
  bool no_vertices = false;
  std::uint64_t seed = 0;
  std::string out;
};

int run_synth(const SynthArgs& a, const Environment& env) {
  const std::uint64_t seed = env.seed.value_or(a.seed);
  Json params{{"kind", a.kind}};
  Json truth{{"kind", a.kind}};
  DenseMatrix points;

  if (a.kind == "polytope") {
    const auto pp = planted_polytope(a.n, a.d, a.k, a.noise, seed, !a.no_vertices);
    params.update(Json{{"n", a.n}, {"d", a.d}, {"k", a.k}, {"noise", a.noise}, {"include_vertices", !a.no_vertices}});
    truth["vertices"] = columns_to_json(pp.vertices);
    truth["vertex_columns"] = Json::array();
    if (!a.no_vertices)
      for (std::size_t j = 0; j < a.k; ++j) truth["vertex_columns"].push_back(j);
    points = pp.points;
  } else if (a.kind == "lowrank-noise") {
    points = lowrank_noise(a.n, a.d, a.rank, a.noise, seed);
    params.update(Json{{"n", a.n}, {"d", a.d}, {"rank", a.rank}, {"noise", a.noise}});
    truth["rank"] = a.rank;
    truth["noise"] = a.noise;
  } else {
    const auto poly = a.profile.empty() ? regular_polygon(a.sides ? a.sides : 12, a.interior, seed)
                                        : polygon_from_curvature(a.profile, a.interior, seed);
    const std::size_t nv = poly.points.cols() - a.interior;
    params.update(Json{{"profile", a.profile}, {"sides", nv}, {"interior", a.interior}});
    truth["curvature"] = poly.curvature;
    truth["vertex_columns"] = Json::array();
    for (std::size_t j = 0; j < nv; ++j) truth["vertex_columns"].push_back(j);
    points = poly.points;
  }

  const Json man = manifest("synth", params, seed, content_digest(points), env.workers, std::nullopt);
  truth["manifest"] = man;
  write_text(a.out, format_csv(points, {}, man.dump()));
  write_json(a.out + ".truth.json", truth);
  std::cout << "wrote " << points.cols() << " points in R^" << points.rows() << " to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------- hull

struct HullArgs {
  std::string input;
  bool header = false;
  std::uint64_t projections = 10000;
  double eta = 0.003;
  std::uint64_t seed = 0;
  bool hausdorff = false;
  bool keep_duplicates = false;
  std::string out;
};

int run_hull(const HullArgs& a, const Environment& env) {
  const std::uint64_t seed = env.seed.value_or(a.seed);
  const Input in = load_input(a.input, a.header, a.keep_duplicates);
  const HullSupport t = approx_convex_hull(in.x, a.projections, a.eta, seed, env.workers);
  std::vector<std::size_t> original(t.indices.size());
  for (std::size_t i = 0; i < t.indices.size(); ++i) original[i] = in.kept[t.indices[i]];

  const Json params{{"projections", a.projections}, {"eta", a.eta}, {"hausdorff", a.hausdorff},
                    {"header", a.header}, {"keep_duplicates", a.keep_duplicates}};
  Json doc{{"manifest", manifest("hull", params, seed, in.digest, env.workers, std::nullopt)},
           {"input", input_json(a.input, in)},
           {"T", original},
           {"eta", t.eta},
           {"M", a.projections},
           {"seed", seed},
           {"L", t.L},
           {"clamped", t.clamped},
           {"cum_curvature_estimate", t.cum_curvature_estimate}};
  if (a.hausdorff) doc["hausdorff_estimate"] = hausdorff_to_subhull(in.x, t);
  write_json(a.out, doc);
  std::cout << "|T| = " << t.indices.size() << "\n";
  return 0;
}

// ---------------------------------------------------------------- rsvd

struct RsvdArgs {
  std::string input;
  bool header = false;
  std::size_t rank = 20;
  std::size_t krylov_s = 0;
  bool log2_depth = false;
  std::uint64_t seed = 0;
  std::string out;
};

int run_rsvd(const RsvdArgs& a, const Environment& env) {
  const std::uint64_t seed = env.seed.value_or(a.seed);
  const Input in = load_input(a.input, a.header, true);
  const std::size_t s =
      a.krylov_s ? a.krylov_s : krylov_default_s(in.x.cols(), a.log2_depth ? LogBase::Two : LogBase::Natural);
  const SketchResult sk = block_krylov_sketch(in.x, a.rank, s, seed, env.workers);
  for (const auto& w : sk.warnings) std::cerr << "warning: " << w << "\n";
  write_binary(a.out, sk.x_tilde);
  write_binary(a.out + ".basis.bin", sk.basis);
  const Json params{{"rank", a.rank}, {"krylov_s", s}, {"log2_depth", a.log2_depth}, {"header", a.header}};
  Json doc = sketch_metadata(sk);
  doc["spectral_error_estimate"] = sketch_spectral_error(in.x, sk);
  doc["manifest"] = manifest("rsvd", params, seed, in.digest, env.workers, std::nullopt);
  write_json(a.out + ".json", doc);
  std::cout << "rank " << sk.p << " sketch, depth " << sk.s << "\n";
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string spec;
  std::string out;
  bool timings = false;
};

struct BenchCell {
  std::string method;
  std::size_t k = 0, p = 0;
  std::uint64_t m = 0;
  double eta = 0.0;
};

struct BenchRow {
  std::size_t cell = 0, repeat = 0;
  std::uint64_t seed = 0;
  std::optional<MetricsRow> metrics;
  std::string error;
};

template <class T>
std::vector<T> grid_axis(const Json& grid, const char* name, std::vector<T> fallback) {
  if (!grid.contains(name)) return fallback;
  auto values = grid.at(name).get<std::vector<T>>();
  if (values.empty()) throw ContractViolation(std::string("bench: grid axis '") + name + "' is empty");
  return values;
}

DenseMatrix bench_data(const Json& spec, std::uint64_t& digest) {
  DenseMatrix x;
  if (spec.contains("input")) {
    x = read_matrix(spec.at("input").get<std::string>());
  } else {
    const Json& d = spec.at("data");
    const auto kind = d.value("kind", std::string("polytope"));
    const auto n = d.value("n", std::size_t{500});
    const auto dim = d.value("d", std::size_t{20});
    const auto noise = d.value("noise", 0.0);
    const auto seed = d.value("seed", std::uint64_t{0});
    if (kind == "polytope")
      x = planted_polytope(n, dim, d.value("k", std::size_t{4}), noise, seed).points;
    else if (kind == "lowrank-noise")
      x = lowrank_noise(n, dim, d.value("rank", std::size_t{5}), noise, seed);
    else
      throw ContractViolation("bench: unknown data kind '" + kind + "'");
  }
  digest = content_digest(x);
  return x;
}

MetricsRow bench_run(const DenseMatrix& x, const BenchCell& c, std::uint64_t seed, const Json& spec,
                     bool timings) {
  const double start = now_ms();
  AAConfig aa;
  aa.k = c.k;
  aa.rel_tol = spec.value("tol", 1e-3);
  aa.max_outer_iters = spec.value("max_iter", std::size_t{200});
  aa.seed = seed;
  MetricsRow row;
  row.method = c.method;
  row.k = c.k;
  if (c.method == "exact") {
    const AAModel model = fit(x, x, aa);
    row.objective = model.objective_trace.back();
    row.explained = explained_variance(x, model);
    row.t = x.cols();
  } else if (c.method == "svd") {
    const SvdAAResult r = fit_svd_aa(x, c.k, spec.value("variance_keep", 0.9999), aa);
    row.objective = r.original_objective;
    row.explained = explained_variance(x, r.model);
    row.p = std::to_string(r.rank);
    row.t = x.cols();
  } else {
    AAAConfig cfg;
    cfg.k = c.k;
    cfg.p = c.p;
    cfg.m = c.m;
    cfg.eta = c.eta;
    cfg.seed = seed;
    cfg.aa = aa;
    const AAAResult r = fit_aaa(x, cfg);
    row.objective = r.original_objective;
    row.explained = explained_variance(x, r.model);
    row.p = std::to_string(r.sketch.p);
    row.s = std::to_string(r.sketch.s);
    row.m = std::to_string(c.m);
    row.eta = fmt(c.eta);
    row.t = r.support.indices.size();
  }
  if (timings) row.wall_ms = fmt(now_ms() - start);
  return row;
}

int run_bench(const BenchArgs& a, const Environment& env) {
  const Json spec = Json::parse(detail::read_file(a.spec));
  const std::uint64_t seed = env.seed.value_or(spec.value("seed", std::uint64_t{0}));
  const auto methods = spec.value("methods", std::vector<std::string>{});
  if (methods.empty()) throw ContractViolation("bench: no methods given");
  for (const auto& m : methods)
    if (m != "exact" && m != "svd" && m != "aaa") throw ContractViolation("bench: unknown method '" + m + "'");
  const Json grid = spec.value("grid", Json::object());
  if (!grid.contains("k")) throw ContractViolation("bench: the grid must list at least one k");
  const auto ks = grid_axis<std::size_t>(grid, "k", {});
  const auto ps = grid_axis<std::size_t>(grid, "p", {20});
  const auto ms = grid_axis<std::uint64_t>(grid, "m", {10000});
  const auto etas = grid_axis<double>(grid, "eta", {0.003});
  const auto repeat = spec.value("repeat", std::size_t{1});
  if (repeat == 0) throw ContractViolation("bench: repeat must be positive");

  std::uint64_t digest = 0;
  const DenseMatrix x = bench_data(spec, digest);

  // Axes that a method ignores are collapsed so each cell is a distinct run.
  std::vector<BenchCell> cells;
  for (const auto& method : methods)
    for (auto k : ks) {
      if (method != "aaa") {
        cells.push_back({method, k, 0, 0, 0.0});
        continue;
      }
      for (auto p : ps)
        for (auto m : ms)
          for (auto eta : etas) cells.push_back({method, k, p, m, eta});
    }

  std::vector<BenchRow> rows;
  const CounterRng root(seed);
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::size_t r = 0; r < repeat; ++r) rows.push_back({c, r, root.split(c).split(r).next_u64(), {}, {}});

  parallel_chunks(rows.size(), env.workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        rows[i].metrics = bench_run(x, cells[rows[i].cell], rows[i].seed, spec, a.timings);
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    }
  });

  const Json params{{"spec", spec}, {"timings", a.timings}};
  std::string text = "# " + manifest("bench", params, seed, digest, env.workers, std::nullopt).dump() + "\n";
  text += "run_id,cell,repeat,method,k,p,s,M,eta,seed,objective,explained_variance,T,wall_ms,error\n";
  std::size_t ok = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const BenchRow& r = rows[i];
    const BenchCell& c = cells[r.cell];
    text += std::to_string(i) + "," + std::to_string(r.cell) + "," + std::to_string(r.repeat) + "," + c.method + "," +
            std::to_string(c.k) + ",";
    if (r.metrics) {
      ++ok;
      const MetricsRow& m = *r.metrics;
      text += m.p + "," + m.s + "," + m.m + "," + m.eta + "," + std::to_string(r.seed) + "," + fmt(m.objective) +
              "," + fmt(m.explained) + "," + std::to_string(m.t) + "," + m.wall_ms + ",\n";
    } else {
      const bool aaa = c.method == "aaa";
      text += (aaa ? std::to_string(c.p) : "") + ",," + (aaa ? std::to_string(c.m) : "") + "," +
              (aaa ? fmt(c.eta) : "") + "," + std::to_string(r.seed) + ",,,,," + csv_quote(r.error) + "\n";
    }
  }
  write_text(a.out, text);
  std::cout << ok << " of " << rows.size() << " runs succeeded\n";
  return ok > 0 ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Archetypal analysis toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", AAKIT_BUILD_ID);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit archetypes to a data matrix");
  fit_cmd->add_option("--input", fit_args.input, "CSV (one observation per line) or binary matrix")->required();
  fit_cmd->add_flag("--header", fit_args.header, "Skip the first non-comment CSV line");
  fit_cmd->add_option("--method", fit_args.method)->check(CLI::IsMember({"exact", "svd", "aaa"}))->capture_default_str();
  fit_cmd->add_option("--k", fit_args.k, "Number of archetypes")->check(CLI::PositiveNumber)->capture_default_str();
  fit_cmd->add_option("--rank", fit_args.rank, "Sketch rank p (aaa, default 20) or fixed SVD rank (svd)");
  fit_cmd->add_option("--variance-keep", fit_args.variance_keep, "Variance fraction kept by svd without --rank")
      ->capture_default_str();
  fit_cmd->add_option("--krylov-s", fit_args.krylov_s, "Krylov depth (default: ceil(log N))");
  fit_cmd->add_flag("--log2-depth", fit_args.log2_depth, "Use log base 2 for the default Krylov depth");
  fit_cmd->add_option("--projections", fit_args.projections, "Random projections M")->capture_default_str();
  fit_cmd->add_option("--eta", fit_args.eta, "Curvature mass left out of the hull")->capture_default_str();
  fit_cmd->add_option("--tol", fit_args.tol, "Relative objective decrease that stops the iteration")
      ->capture_default_str();
  fit_cmd->add_option("--max-iter", fit_args.max_iter, "Maximum outer iterations")->capture_default_str();
  fit_cmd->add_option("--seed", fit_args.seed)->capture_default_str();
  fit_cmd->add_option("--out", fit_args.out, "Result JSON")->required();
  fit_cmd->add_option("--metrics", fit_args.metrics, "Metrics CSV (default: <out>.metrics.csv)");
  fit_cmd->add_flag("--keep-duplicates", fit_args.keep_duplicates, "Do not drop repeated observations");
  fit_cmd->add_flag("--timings", fit_args.timings, "Record wall-clock timings (output is then not reproducible)");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic data with known structure");
  synth_cmd->add_option("--kind", synth_args.kind)
      ->required()
      ->check(CLI::IsMember({"polytope", "lowrank-noise", "polygon2d"}));
  synth_cmd->add_option("--n", synth_args.n, "Number of points")->capture_default_str();
  synth_cmd->add_option("--d", synth_args.d, "Ambient dimension")->capture_default_str();
  synth_cmd->add_option("--k", synth_args.k, "Planted vertices (polytope)")->capture_default_str();
  synth_cmd->add_option("--rank", synth_args.rank, "Signal rank (lowrank-noise)")->capture_default_str();
  synth_cmd->add_option("--noise", synth_args.noise, "Gaussian noise scale")->capture_default_str();
  synth_cmd->add_option("--profile", synth_args.profile, "Vertex curvatures summing to 1 (polygon2d)")
      ->delimiter(',');
  synth_cmd->add_option("--sides", synth_args.sides, "Regular polygon side count (polygon2d, default 12)");
  synth_cmd->add_option("--interior", synth_args.interior, "Interior points (polygon2d)")->capture_default_str();
  synth_cmd->add_flag("--no-vertices", synth_args.no_vertices, "Do not include the exact vertices (polytope)");
  synth_cmd->add_option("--seed", synth_args.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth_args.out, "Output CSV; ground truth goes to <out>.truth.json")->required();

  HullArgs hull_args;
  auto* hull_cmd = app.add_subcommand("hull", "Select high-curvature extreme points");
  hull_cmd->add_option("--input", hull_args.input)->required();
  hull_cmd->add_flag("--header", hull_args.header);
  hull_cmd->add_option("--projections", hull_args.projections)->capture_default_str();
  hull_cmd->add_option("--eta", hull_args.eta)->capture_default_str();
  hull_cmd->add_option("--seed", hull_args.seed)->capture_default_str();
  hull_cmd->add_flag("--hausdorff", hull_args.hausdorff, "Also report the distance from the data to conv(T)");
  hull_cmd->add_flag("--keep-duplicates", hull_args.keep_duplicates);
  hull_cmd->add_option("--out", hull_args.out)->required();

  RsvdArgs rsvd_args;
  auto* rsvd_cmd = app.add_subcommand("rsvd", "Rank-p block Krylov sketch");
  rsvd_cmd->add_option("--input", rsvd_args.input)->required();
  rsvd_cmd->add_flag("--header", rsvd_args.header);
  rsvd_cmd->add_option("--rank", rsvd_args.rank)->check(CLI::PositiveNumber)->capture_default_str();
  rsvd_cmd->add_option("--krylov-s", rsvd_args.krylov_s);
  rsvd_cmd->add_flag("--log2-depth", rsvd_args.log2_depth);
  rsvd_cmd->add_option("--seed", rsvd_args.seed)->capture_default_str();
  rsvd_cmd->add_option("--out", rsvd_args.out, "Reduced coordinates (binary); also <out>.basis.bin, <out>.json")
      ->required();

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Run a parameter sweep");
  bench_cmd->add_option("--spec", bench_args.spec, "Sweep description (JSON)")->required();
  bench_cmd->add_option("--out", bench_args.out, "Long-format CSV, one row per run")->required();
  bench_cmd->add_flag("--timings", bench_args.timings, "Fill the wall_ms column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const Environment env = read_environment();
    if (fit_cmd->parsed()) return run_fit(fit_args, env);
    if (synth_cmd->parsed()) return run_synth(synth_args, env);
    if (hull_cmd->parsed()) return run_hull(hull_args, env);
    if (rsvd_cmd->parsed()) return run_rsvd(rsvd_args, env);
    if (bench_cmd->parsed()) return run_bench(bench_args, env);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DegenerateGeometry& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
