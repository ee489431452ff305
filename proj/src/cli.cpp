#include "geodesica/cli.hpp"

#include "geodesica/convergence.hpp"
#include "geodesica/frechet.hpp"
#include "geodesica/geograph.hpp"
#include "geodesica/io.hpp"
#include "geodesica/mds.hpp"
#include "geodesica/projections.hpp"
#include "geodesica/svg.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace geodesica::cli {
namespace fs = std::filesystem;

namespace {

using manifolds::ManifoldOracle;
using manifolds::Rectangle;

enum class ParamType { Integer, Number, Text, Flag, Path, Manifold };

struct ParamSpec {
  std::string key;
  ParamType type;
  Json fallback;  // null: no default
  std::string help;
  bool required = false;
};

// Paths and manifold specs flowing between pipeline stages.
using Context = std::map<std::string, Json>;

struct StageSpec {
  std::string name;
  std::string help;
  std::vector<ParamSpec> params;
  std::function<std::string(const Json&)> tag;
  // Parameters that must be present once defaults and links are applied.
  std::function<std::vector<std::string>(const Json&)> needs;
  // Fills unset inputs from earlier pipeline stages.
  std::function<void(Json&, const Context&)> link;
  // Records this stage's artifacts for later stages.
  std::function<void(const Json&, const fs::path&, Context&)> publish;
  // Writes artifacts; returns their file names relative to out_dir.
  std::function<std::vector<std::string>(const Json&, const fs::path&)> run;
};

[[noreturn]] void config_error(const std::string& message) { throw Error("invalid_config", message); }

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

// Parameter access ---------------------------------------------------------------

bool has(const Json& p, const std::string& key) { return p.contains(key) && !p.at(key).is_null(); }

std::size_t get_size(const Json& p, const std::string& key) { return p.at(key).get<std::size_t>(); }
double get_number(const Json& p, const std::string& key) { return p.at(key).get<double>(); }
std::string get_text(const Json& p, const std::string& key) { return p.at(key).get<std::string>(); }
bool get_flag(const Json& p, const std::string& key) { return has(p, key) && p.at(key).get<bool>(); }
RandomSeed get_seed(const Json& p) { return RandomSeed{p.at("seed").get<std::uint64_t>()}; }

void require_keys(const Json& p, const std::vector<std::string>& keys, const std::string& stage) {
  for (const auto& key : keys) {
    if (!has(p, key)) config_error(stage + ": missing required parameter '" + key + "'");
  }
}

// Manifold specs ---------------------------------------------------------------------

Json vertices_json(std::initializer_list<std::pair<double, double>> pts) {
  Json out = Json::array();
  for (const auto& [x, y] : pts) out.push_back({x, y});
  return out;
}

const std::map<std::string, Json>& presets() {
  static const std::map<std::string, Json> table = [] {
    std::map<std::string, Json> t;
    const Json r1 = vertices_json({{-0.05, 0.05}, {0.05, 0.05}, {-0.05, 0.95}, {0.05, 0.95}});
    t["closed-curve"] = {{"kind", "rectangle-curve"}, {"vertices", r1}};
    t["circle-length-2"] = {{"kind", "circle"}, {"radius", 1.0 / M_PI}};
    t["unit-circle"] = {{"kind", "circle"}, {"radius", 1.0}};
    t["annulus-narrow"] = {{"kind", "annulus"},
                         {"inner", r1},
                         {"outer", vertices_json({{-0.1, 0.0}, {0.1, 0.0}, {-0.1, 1.0}, {0.1, 1.0}})}};
    t["annulus-wide"] = {{"kind", "annulus"},
                         {"inner", vertices_json({{-0.25, -1.2}, {0.55, -1.2}, {-0.25, 0.3}, {0.55, 0.3}})},
                         {"outer", vertices_json({{-1.75, -2.0}, {1.75, -2.0}, {-1.75, 1.5}, {1.75, 1.5}})}};
    t["sphere"] = {{"kind", "sphere-cap"}, {"max_colatitude", M_PI}};
    t["hemisphere"] = {{"kind", "sphere-cap"}, {"max_colatitude", M_PI / 2}};
    t["spiral"] = {{"kind", "spiral"}, {"beta", 1.0}, {"t_min", 1.0}, {"t_max", 10.0}};
    t["swiss-roll"] = {{"kind", "swiss-roll"}, {"beta", 1.0}, {"s_min", 1.0}, {"s_max", 10.0},
                       {"h_min", 0.0}, {"h_max", 10.0}};
    return t;
  }();
  return table;
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      config_error(what + ": unknown key '" + key + "'");
    }
  }
}

double number_field(const Json& j, const char* key, const std::string& what) {
  if (!j.contains(key) || !j.at(key).is_number()) config_error(what + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

Rectangle rectangle_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) config_error(std::string("manifold: '") + key + "' must list vertices");
  std::vector<manifolds::Point2> pts;
  for (const auto& v : j.at(key)) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      config_error(std::string("manifold: '") + key + "' vertices must be [x, y] pairs");
    }
    pts.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  return Rectangle::from_vertices(pts);
}

// Stage bodies --------------------------------------------------------------------------

void write_json(const fs::path& path, const Json& j) { io::write_text(path, j.dump(2) + "\n"); }

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("format_error", what + ": " + e.what());
  }
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(); }

std::vector<std::string> run_generate(const Json& p, const fs::path& out) {
  const auto oracle = manifold_from_json(p.at("manifold"));
  const auto n = get_size(p, "n");
  if (n == 0) throw Error("invalid_argument", "n must be positive");
  const auto sampler = get_text(p, "sampler");
  const bool closed = oracle.kind() == manifolds::ManifoldKind::ClosedCurve;
  PointCloud cloud;
  if (sampler == "equispaced" || (sampler == "auto" && closed)) {
    if (!closed) throw Error("invalid_argument", "equispaced sampling needs a closed curve");
    if (const auto* rect = std::get_if<manifolds::RectangleCurve>(&oracle.shape())) {
      cloud = manifolds::sample_closed_curve_rectangle(n, rect->rect);
    } else {
      cloud = manifolds::sample_closed_curve_circle(n, std::get<manifolds::CircleCurve>(oracle.shape()).radius);
    }
  } else if (sampler == "uniform" || sampler == "auto") {
    cloud = oracle.sample(n, get_seed(p));
  } else {
    throw Error("invalid_argument", "unknown sampler '" + sampler + "'");
  }
  io::save_point_cloud(out / "points.csv", cloud);
  return {"points.csv"};
}

std::vector<std::string> run_geodesics(const Json& p, const fs::path& out) {
  const auto oracle = manifold_from_json(p.at("manifold"));
  const auto cloud = io::load_point_cloud(get_text(p, "points"));
  io::save_dissimilarity(out / "geodesics.csv", oracle.distance_matrix(cloud));
  return {"geodesics.csv"};
}

std::vector<std::string> run_graph(const Json& p, const fs::path& out) {
  const auto cloud = io::load_point_cloud(get_text(p, "points"));
  const auto rule_name = get_text(p, "rule");
  geograph::NeighborRule rule;
  if (rule_name == "epsilon") {
    if (!has(p, "epsilon")) throw Error("invalid_argument", "the epsilon rule needs --epsilon");
    rule = geograph::NeighborRule::eps(get_number(p, "epsilon"));
  } else if (rule_name == "knn") {
    if (!has(p, "k")) throw Error("invalid_argument", "the knn rule needs --k");
    rule = geograph::NeighborRule::knn(get_size(p, "k"));
  } else {
    throw Error("invalid_argument", "unknown graph rule '" + rule_name + "'");
  }
  const auto graph = geograph::build_graph(cloud, rule);
  const auto report = geograph::connectivity_report(graph, cloud);
  io::write_text(out / "graph.json", geograph::graph_to_json(graph));
  Json comp;
  comp["count"] = report.count();
  comp["sizes"] = report.sizes;
  comp["min_connecting_epsilon"] = report.min_connecting_epsilon;
  write_json(out / "components.json", comp);
  return {"graph.json", "components.json"};
}

std::vector<std::string> run_shortest_paths(const Json& p, const fs::path& out) {
  const auto graph = geograph::graph_from_json(io::read_text(get_text(p, "graph")));
  const auto cloud = io::load_point_cloud(get_text(p, "points"));
  if (graph.n != cloud.size()) throw Error("shape_mismatch", "graph and point cloud sizes differ");
  const auto metric_name = get_text(p, "metric");
  const bool restrict = get_flag(p, "largest_component");
  const bool keep_inf = get_flag(p, "keep_infinite");
  if (restrict && keep_inf) throw Error("invalid_argument", "--largest-component and --keep-infinite exclude each other");

  geograph::GraphMetric metric;
  if (metric_name == "euclidean") {
    metric = geograph::shortest_paths(graph);
  } else if (metric_name == "oracle") {
    if (!has(p, "manifold")) throw Error("invalid_argument", "the oracle metric needs --manifold");
    metric = geograph::shortest_paths(graph, cloud, manifold_from_json(p.at("manifold")));
  } else {
    throw Error("invalid_argument", "unknown metric '" + metric_name + "'");
  }
  const auto keep = geograph::largest_component(metric.component_of);
  const bool connected = keep.size() == cloud.size();
  if (!connected && !restrict && !keep_inf) {
    throw Error("disconnected_graph", "graph has several components; use --largest-component or --keep-infinite");
  }
  if (restrict) {
    if (!connected) std::cerr << "warning: restricting to the largest component (" << keep.size() << " of "
                              << cloud.size() << " points)\n";
    io::save_dissimilarity(out / "distances.csv", geograph::restrict_matrix(metric.distances, keep));
    io::save_point_cloud(out / "points_kept.csv", geograph::restrict_cloud(cloud, keep));
    std::ostringstream idx;
    idx << "index\n";
    for (auto i : keep) idx << i << "\n";
    io::write_text(out / "kept_indices.csv", idx.str());
    return {"distances.csv", "points_kept.csv", "kept_indices.csv"};
  }
  io::save_dissimilarity(out / "distances.csv", metric.distances);
  return {"distances.csv"};
}

std::vector<std::string> run_embed(const Json& p, const fs::path& out) {
  const auto delta = io::load_dissimilarity(get_text(p, "dissimilarity"), true);
  const auto method = get_text(p, "method");
  if (method != "cmds" && method != "smacof") throw Error("invalid_argument", "unknown method '" + method + "'");
  const auto dim = get_size(p, "dim");
  const auto init = mds::cmds_full(delta, dim);
  const auto edm = mds::classify_spectrum(init.gram.spectrum.values, mds::kZeroEigenvalueTol);

  Json stress;
  stress["method"] = method;
  Configuration config = init.config;
  if (method == "smacof") {
    mds::StressParams params;
    params.max_iters = get_size(p, "iters");
    params.rel_tol = get_number(p, "rel_tol");
    auto refined = mds::smacof(delta, init.config, params);
    stress["init_stress"] = refined.trace.front();
    stress["final_stress"] = refined.trace.back();
    stress["iterations"] = refined.iterations;
    stress["monotone"] = refined.monotone;
    stress["trace"] = refined.trace;
    config = std::move(refined.config);
  } else {
    const double s = mds::raw_stress(config, delta);
    stress["init_stress"] = s;
    stress["final_stress"] = s;
    stress["iterations"] = 0;
  }
  io::save_configuration(out / "embedding.csv", config);
  io::write_text(out / "spectrum.json", mds::spectrum_report_json(edm, dim));
  write_json(out / "stress.json", stress);
  return {"embedding.csv", "spectrum.json", "stress.json"};
}

Json delta_check_json(const convergence::DeltaSamplingCheck& c, double delta) {
  return {{"delta", delta}, {"satisfied", c.satisfied}, {"worst_gap", c.worst_gap}, {"probes", c.probes}};
}

std::vector<std::string> run_audit(const Json& p, const fs::path& out) {
  const auto kind = get_text(p, "kind");
  const auto oracle = manifold_from_json(p.at("manifold"));
  const auto seed = get_seed(p);
  const bool strict = get_flag(p, "strict");
  const std::string file = "audit_" + kind + ".json";
  Json report;
  report["kind"] = kind;
  report["manifold"] = manifolds::to_string(oracle.kind());
  std::string failure;

  if (kind == "sandwich") {
    const auto cloud = io::load_point_cloud(get_text(p, "points"));
    const auto metric = io::load_dissimilarity(get_text(p, "metric"), true);
    if (metric.size() != cloud.size()) throw Error("shape_mismatch", "metric and point cloud sizes differ");
    auto ctx = convergence::analytic_bound_params(oracle, 20000, derive_seed(seed, 1));
    ctx.epsilon = get_number(p, "epsilon");
    ctx.lambda = get_number(p, "lambda");
    ctx.delta = has(p, "delta") ? get_number(p, "delta") : ctx.lambda * ctx.epsilon / 4.0;
    const auto audit = convergence::audit_sandwich(oracle, cloud, metric.matrix(), ctx);
    report["r0"] = finite_or_null(ctx.r0);
    report["s0"] = finite_or_null(ctx.s0);
    report["s0_estimated"] = ctx.s0_estimated;
    report["corner_caveat"] = ctx.corner_caveat;
    report["epsilon"] = ctx.epsilon;
    report["lambda"] = ctx.lambda;
    report["delta"] = ctx.delta;
    report["max_epsilon_for_curvature"] = finite_or_null(convergence::max_epsilon_for_curvature(ctx.r0, ctx.lambda));
    report.update(parse_json(convergence::audit_report_json(audit), "audit"));
    bool covered = true;
    if (get_size(p, "probes") > 0) {
      const auto check = convergence::check_delta_sampling(oracle, cloud, ctx.delta, get_size(p, "probes"),
                                                           derive_seed(seed, 2));
      report["delta_sampling"] = delta_check_json(check, ctx.delta);
      covered = check.satisfied;
    }
    report["certified"] = audit.certified && covered;
    if (!audit.certified || !covered) {
      failure = "sandwich hypotheses do not hold";
    } else if (audit.violations_low + audit.violations_high > 0) {
      failure = "sandwich bound violated";
    }
  } else if (kind == "min-length") {
    const auto check = convergence::check_min_length_lemma(oracle, get_size(p, "trials"), seed);
    report["trials"] = check.trials;
    report["min_margin"] = check.min_margin;
    report["max_abs_margin"] = check.max_abs_margin;
    report["holds"] = check.min_margin >= -1e-9;
    if (check.min_margin < -1e-9) failure = "chord shorter than the minimum length bound";
  } else if (kind == "delta-sampling") {
    if (!has(p, "delta")) throw Error("invalid_argument", "delta-sampling audit needs --delta");
    const auto cloud = io::load_point_cloud(get_text(p, "points"));
    const double delta = get_number(p, "delta");
    const auto check = convergence::check_delta_sampling(oracle, cloud, delta, get_size(p, "probes"), seed);
    report.update(delta_check_json(check, delta));
    if (!check.satisfied) failure = "sample is not delta-dense";
  } else if (kind == "sampling-lemma") {
    if (!has(p, "delta")) throw Error("invalid_argument", "sampling-lemma audit needs --delta");
    const auto cover = convergence::build_sampling_cover(oracle, get_number(p, "delta"), derive_seed(seed, 1),
                                                         get_size(p, "reference_size"), get_size(p, "mass_draws"));
    std::size_t n = get_size(p, "n");
    if (n == 0) {
      // Smallest n whose bound reaches 1/2, where the comparison is most informative.
      n = 1;
      while (convergence::sampling_lemma_bound(cover.k(), cover.b, n) < 0.5) n *= 2;
      std::size_t lo = n / 2 + 1;
      while (lo < n) {
        const std::size_t mid = (lo + n) / 2;
        if (convergence::sampling_lemma_bound(cover.k(), cover.b, mid) >= 0.5) n = mid; else lo = mid + 1;
      }
    }
    const auto check = convergence::check_sampling_lemma(oracle, cover, n, get_size(p, "reps"), derive_seed(seed, 2));
    report["k"] = check.k;
    report["ball_radius"] = check.ball_radius;
    report["b"] = check.b;
    report["mass_exceeds_radius"] = check.mass_exceeds_radius;
    report["n"] = check.n;
    report["repetitions"] = check.repetitions;
    report["bound"] = check.bound;
    report["frequency"] = check.frequency;
    report["standard_error"] = check.standard_error;
    report["passes"] = check.passes();
    if (!check.passes()) failure = "covering frequency below the sampling bound";
  } else {
    throw Error("invalid_argument", "unknown audit kind '" + kind + "'");
  }
  write_json(out / file, report);
  if (strict && !failure.empty()) throw Error("hypothesis_failure", failure);
  return {file};
}

std::vector<std::string> run_project(const Json& p, const fs::path& out) {
  const auto name = get_text(p, "projection");
  const auto points = has(p, "coastline")
                          ? projections::load_coastline_csv(get_text(p, "coastline"), get_flag(p, "western"))
                          : projections::synthetic_hemisphere_grid(get_number(p, "grid_step"));
  const double lambda0 = get_number(p, "lambda0");
  Json report;
  report["projection"] = name;
  report["input_points"] = points.size();
  Configuration config;
  if (name == "mds") {
    mds::StressParams params;
    params.max_iters = get_size(p, "iters");
    params.rel_tol = get_number(p, "rel_tol");
    auto map = projections::mds_map(points, params);
    report["init_stress"] = map.init_stress;
    report["final_stress"] = map.final_stress;
    report["dropped"] = Json::array();
    config = std::move(map.config);
  } else {
    projections::Projection proj;
    if (name == "equirectangular") {
      proj = projections::equirectangular(points);
    } else if (name == "transverse-mercator") {
      proj = projections::transverse_mercator(points, lambda0);
    } else if (name == "lambert") {
      proj = projections::lambert_azimuthal(points, lambda0);
    } else {
      throw Error("invalid_argument", "unknown projection '" + name + "'");
    }
    report["dropped"] = proj.dropped;
    config = std::move(proj.config);
  }
  report["kept"] = config.size();
  const std::string stem = "projection_" + name;
  io::save_configuration(out / (stem + ".csv"), config);
  write_json(out / (stem + ".json"), report);
  return {stem + ".csv", stem + ".json"};
}

Json frechet_json(const frechet::FrechetResult& r) {
  return {{"method", frechet::to_string(r.method)}, {"index", r.index}, {"objective", r.objective}};
}

std::vector<std::string> run_frechet(const Json& p, const fs::path& out) {
  const auto delta = io::load_dissimilarity(get_text(p, "dissimilarity"));
  const auto config = io::load_configuration(get_text(p, "embedding"));
  const auto brute = frechet::sample_frechet_mean(delta);
  const auto embedded = frechet::embedded_frechet_mean(config, delta);
  Json report;
  report["brute_force"] = frechet_json(brute);
  report["embedded"] = frechet_json(embedded);
  report["same_index"] = brute.index == embedded.index;
  report["relative_gap"] = brute.objective > 0.0 ? embedded.objective / brute.objective - 1.0 : 0.0;
  write_json(out / "frechet.json", report);
  return {"frechet.json"};
}

std::vector<std::string> run_plot(const Json& p, const fs::path& out) {
  const auto config = io::load_configuration(get_text(p, "embedding"));
  const auto name = get_text(p, "name");
  svg::ScatterStyle style;
  style.title = get_text(p, "title");
  io::write_text(out / (name + ".svg"), svg::emit_svg_scatter(config, style));

  Matrix ambient;
  if (has(p, "points")) {
    ambient = io::load_point_cloud(get_text(p, "points")).points;
    if (static_cast<std::size_t>(ambient.rows()) != config.size()) {
      throw Error("shape_mismatch", "points and embedding sizes differ");
    }
  }
  std::ostringstream csv;
  csv << "index";
  for (std::size_t c = 0; c < config.dim(); ++c) csv << ",z" << c + 1;
  for (Eigen::Index c = 0; c < ambient.cols(); ++c) csv << ",x" << c + 1;
  csv << "\n";
  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    csv << i;
    for (Eigen::Index c = 0; c < config.coords.cols(); ++c) csv << ',' << io::format_double(config.coords(r, c));
    for (Eigen::Index c = 0; c < ambient.cols(); ++c) csv << ',' << io::format_double(ambient(r, c));
    csv << "\n";
  }
  io::write_text(out / (name + "_data.csv"), csv.str());
  return {name + ".svg", name + "_data.csv"};
}

// Stage table ----------------------------------------------------------------------------------

void link_key(Json& raw, const Context& ctx, const std::string& key, const std::string& role) {
  if (!raw.contains(key)) {
    if (auto it = ctx.find(role); it != ctx.end()) raw[key] = it->second;
  }
}

std::string path_of(const fs::path& out, const std::string& file) { return (out / file).string(); }

const std::vector<StageSpec>& stages() {
  using T = ParamType;
  static const std::vector<StageSpec> table = [] {
    std::vector<StageSpec> s;
    const auto plain = [](const std::string& name) { return [name](const Json&) { return name; }; };
    const auto none = [](const Json&) { return std::vector<std::string>{}; };

    s.push_back({"generate",
                 "Sample points on a manifold",
                 {{"manifold", T::Manifold, nullptr, "preset name, JSON file or inline JSON", true},
                  {"n", T::Integer, nullptr, "number of points", true},
                  {"seed", T::Integer, 0, "random seed"},
                  {"sampler", T::Text, "auto", "auto | uniform | equispaced"}},
                 plain("generate"), none, [](Json&, const Context&) {},
                 [](const Json&, const fs::path& out, Context& ctx) { ctx["points"] = path_of(out, "points.csv"); },
                 run_generate});
    s.push_back({"geodesics",
                 "Exact Riemannian distances between points",
                 {{"manifold", T::Manifold, nullptr, "manifold the points lie on", true},
                  {"points", T::Path, nullptr, "point cloud CSV", true}},
                 plain("geodesics"), none,
                 [](Json& raw, const Context& ctx) {
                   link_key(raw, ctx, "manifold", "manifold");
                   link_key(raw, ctx, "points", "points");
                 },
                 [](const Json&, const fs::path& out, Context& ctx) {
                   ctx["dissimilarity"] = path_of(out, "geodesics.csv");
                 },
                 run_geodesics});
    s.push_back({"graph",
                 "Neighborhood graph of a point cloud",
                 {{"points", T::Path, nullptr, "point cloud CSV", true},
                  {"rule", T::Text, "epsilon", "epsilon | knn"},
                  {"epsilon", T::Number, nullptr, "neighborhood radius"},
                  {"k", T::Integer, nullptr, "neighbor count"}},
                 plain("graph"), none, [](Json& raw, const Context& ctx) { link_key(raw, ctx, "points", "points"); },
                 [](const Json&, const fs::path& out, Context& ctx) { ctx["graph"] = path_of(out, "graph.json"); },
                 run_graph});
    s.push_back({"shortest-paths",
                 "Graph shortest-path distances (d_G, or d_S with the oracle metric)",
                 {{"graph", T::Path, nullptr, "graph JSON", true},
                  {"points", T::Path, nullptr, "point cloud CSV", true},
                  {"metric", T::Text, "euclidean", "euclidean | oracle"},
                  {"manifold", T::Manifold, nullptr, "manifold for the oracle metric"},
                  {"largest_component", T::Flag, false, "restrict to the largest component"},
                  {"keep_infinite", T::Flag, false, "write +inf between components"}},
                 plain("shortest-paths"),
                 [](const Json& p) {
                   return get_text(p, "metric") == "oracle" ? std::vector<std::string>{"manifold"}
                                                            : std::vector<std::string>{};
                 },
                 [](Json& raw, const Context& ctx) {
                   link_key(raw, ctx, "graph", "graph");
                   link_key(raw, ctx, "points", "points");
                   if (raw.value("metric", "") == "oracle") link_key(raw, ctx, "manifold", "manifold");
                 },
                 [](const Json& p, const fs::path& out, Context& ctx) {
                   ctx["dissimilarity"] = path_of(out, "distances.csv");
                   ctx["distances"] = path_of(out, "distances.csv");
                   if (get_flag(p, "largest_component")) ctx["points"] = path_of(out, "points_kept.csv");
                 },
                 run_shortest_paths});
    s.push_back({"embed",
                 "Euclidean embedding by CMDS, optionally refined by Guttman iterations",
                 {{"dissimilarity", T::Path, nullptr, "dissimilarity matrix CSV", true},
                  {"method", T::Text, "cmds", "cmds | smacof"},
                  {"dim", T::Integer, 2, "target dimension"},
                  {"iters", T::Integer, 20, "maximum Guttman iterations"},
                  {"rel_tol", T::Number, 1e-6, "relative stress decrease stopping rule"}},
                 plain("embed"), none,
                 [](Json& raw, const Context& ctx) { link_key(raw, ctx, "dissimilarity", "dissimilarity"); },
                 [](const Json& p, const fs::path& out, Context& ctx) {
                   ctx["embedding"] = path_of(out, "embedding.csv");
                   ctx["embedded_dissimilarity"] = p.at("dissimilarity");
                   if (ctx.count("points")) ctx["embedding_points"] = ctx["points"];
                   else ctx.erase("embedding_points");
                 },
                 run_embed});
    s.push_back({"audit",
                 "Numerical checks of the convergence bounds",
                 {{"kind", T::Text, nullptr, "sandwich | min-length | delta-sampling | sampling-lemma", true},
                  {"manifold", T::Manifold, nullptr, "manifold", true},
                  {"points", T::Path, nullptr, "point cloud CSV (sandwich, delta-sampling)"},
                  {"metric", T::Path, nullptr, "graph metric CSV (sandwich)"},
                  {"epsilon", T::Number, nullptr, "graph radius (sandwich)"},
                  {"lambda", T::Number, 0.1, "relative tolerance lambda (sandwich)"},
                  {"delta", T::Number, nullptr, "sampling density delta"},
                  {"probes", T::Integer, 2000, "probe points for the delta-sampling check"},
                  {"trials", T::Integer, 10000, "arcs for the minimum length check"},
                  {"n", T::Integer, 0, "sample size for the sampling lemma (0: bound near 1/2)"},
                  {"reps", T::Integer, 500, "repetitions for the sampling lemma"},
                  {"reference_size", T::Integer, 4000, "reference sample for the greedy net"},
                  {"mass_draws", T::Integer, 200000, "Monte Carlo draws for ball masses"},
                  {"seed", T::Integer, 0, "random seed"},
                  {"strict", T::Flag, false, "fail when a hypothesis or bound does not hold"}},
                 [](const Json& p) { return "audit_" + get_text(p, "kind"); },
                 [](const Json& p) {
                   const auto kind = get_text(p, "kind");
                   if (kind == "sandwich") return std::vector<std::string>{"points", "metric", "epsilon"};
                   if (kind == "delta-sampling") return std::vector<std::string>{"points", "delta"};
                   if (kind == "sampling-lemma") return std::vector<std::string>{"delta"};
                   return std::vector<std::string>{};
                 },
                 [](Json& raw, const Context& ctx) {
                   link_key(raw, ctx, "manifold", "manifold");
                   const auto kind = raw.value("kind", "");
                   if (kind == "sandwich" || kind == "delta-sampling") link_key(raw, ctx, "points", "points");
                   if (kind == "sandwich") link_key(raw, ctx, "metric", "distances");
                 },
                 [](const Json&, const fs::path&, Context&) {}, run_audit});
    s.push_back({"project",
                 "Map projections and MDS maps of hemisphere points",
                 {{"projection", T::Text, nullptr, "equirectangular | transverse-mercator | lambert | mds", true},
                  {"coastline", T::Path, nullptr, "CSV with lat_deg,lon_deg (default: synthetic grid)"},
                  {"western", T::Flag, false, "keep only Western Hemisphere rows"},
                  {"grid_step", T::Number, 5.0, "synthetic grid spacing in degrees"},
                  {"lambda0", T::Number, -M_PI / 2, "central meridian in radians"},
                  {"iters", T::Integer, 20, "Guttman iterations (mds)"},
                  {"rel_tol", T::Number, 1e-6, "stopping rule (mds)"}},
                 [](const Json& p) { return "project_" + get_text(p, "projection"); }, none,
                 [](Json&, const Context&) {},
                 [](const Json& p, const fs::path& out, Context& ctx) {
                   ctx["embedding"] = path_of(out, "projection_" + get_text(p, "projection") + ".csv");
                   ctx.erase("embedding_points");
                   ctx.erase("embedded_dissimilarity");
                 },
                 run_project});
    s.push_back({"frechet",
                 "Sample Frechet mean: brute force versus embedded average",
                 {{"dissimilarity", T::Path, nullptr, "dissimilarity matrix CSV", true},
                  {"embedding", T::Path, nullptr, "configuration CSV", true}},
                 plain("frechet"), none,
                 [](Json& raw, const Context& ctx) {
                   link_key(raw, ctx, "dissimilarity", "embedded_dissimilarity");
                   link_key(raw, ctx, "embedding", "embedding");
                 },
                 [](const Json&, const fs::path&, Context&) {}, run_frechet});
    s.push_back({"plot",
                 "SVG scatter and figure data of a 2-D configuration",
                 {{"embedding", T::Path, nullptr, "configuration CSV", true},
                  {"points", T::Path, nullptr, "ambient points to include in the figure data"},
                  {"name", T::Text, "figure", "output file stem"},
                  {"title", T::Text, "", "SVG title"}},
                 [](const Json& p) { return "plot_" + get_text(p, "name"); }, none,
                 [](Json& raw, const Context& ctx) {
                   link_key(raw, ctx, "embedding", "embedding");
                   link_key(raw, ctx, "points", "embedding_points");
                 },
                 [](const Json&, const fs::path&, Context&) {}, run_plot});
    return s;
  }();
  return table;
}

const StageSpec& find_stage(const std::string& name) {
  for (const auto& s : stages()) {
    if (s.name == name) return s;
  }
  config_error("unknown stage '" + name + "'");
}

bool is_nonnegative_integer(const Json& value) {
  return value.is_number_unsigned() || (value.is_number_integer() && value.get<long long>() >= 0);
}

Json convert_value(const ParamSpec& spec, const Json& value, const std::string& stage) {
  const auto bad = [&](const char* expected) {
    config_error(stage + ": parameter '" + spec.key + "' must be " + expected);
  };
  switch (spec.type) {
    case ParamType::Integer:
      if (!is_nonnegative_integer(value)) bad("a nonnegative integer");
      return value.get<std::uint64_t>();
    case ParamType::Number:
      if (!value.is_number()) bad("a number");
      return value.get<double>();
    case ParamType::Flag:
      if (!value.is_boolean()) bad("true or false");
      return value;
    case ParamType::Text:
    case ParamType::Path:
      if (!value.is_string()) bad("a string");
      return value;
    case ParamType::Manifold:
      return resolve_manifold_spec(value);
  }
  return value;
}

// Rejects unknown keys, checks types, applies defaults.
Json normalize(const StageSpec& spec, const Json& raw) {
  if (!raw.is_object()) config_error(spec.name + ": parameters must be a JSON object");
  for (const auto& [key, value] : raw.items()) {
    if (std::none_of(spec.params.begin(), spec.params.end(), [&](const ParamSpec& p) { return p.key == key; })) {
      config_error(spec.name + ": unknown parameter '" + key + "'");
    }
  }
  Json out = Json::object();
  for (const auto& param : spec.params) {
    if (raw.contains(param.key) && !raw.at(param.key).is_null()) {
      out[param.key] = convert_value(param, raw.at(param.key), spec.name);
    } else if (!param.fallback.is_null()) {
      out[param.key] = param.fallback;
    }
  }
  std::vector<std::string> needed;
  for (const auto& param : spec.params) {
    if (param.required) needed.push_back(param.key);
  }
  require_keys(out, needed, spec.name);
  require_keys(out, spec.needs(out), spec.name);
  return out;
}

Json file_entries(const std::vector<std::string>& files, const fs::path& base) {
  Json out = Json::array();
  for (const auto& f : files) out.push_back({{"path", f}, {"sha256", io::sha256_file(base / f)}});
  return out;
}

Json input_entries(const StageSpec& spec, const Json& params) {
  Json out = Json::array();
  for (const auto& param : spec.params) {
    if (param.type == ParamType::Path && has(params, param.key)) {
      const auto path = get_text(params, param.key);
      out.push_back({{"parameter", param.key}, {"path", path}, {"sha256", io::sha256_file(path)}});
    }
  }
  return out;
}

Json execute(const StageSpec& spec, const Json& params, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  Json manifest;
  manifest["command"] = spec.name;
  manifest["version"] = kVersion;
  manifest["seed"] = has(params, "seed") ? params.at("seed") : Json();
  manifest["parameters"] = params;
  manifest["inputs"] = input_entries(spec, params);
  const auto files = spec.run(params, out_dir);
  manifest["outputs"] = file_entries(files, out_dir);
  write_json(out_dir / ("manifest." + spec.tag(params) + ".json"), manifest);
  return manifest;
}

// Command line --------------------------------------------------------------------------------------

Json parse_cli_value(const ParamSpec& spec, const std::string& text) {
  switch (spec.type) {
    case ParamType::Integer: {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error("usage_error", "--" + dashed(spec.key) + " expects a nonnegative integer");
      }
      return v;
    }
    case ParamType::Number:
      try {
        return io::parse_double(text);
      } catch (const Error&) {
        throw Error("usage_error", "--" + dashed(spec.key) + " expects a number");
      }
    default:
      return text;
  }
}

void print_error(const std::string& code, const std::string& message) {
  Json j;
  j["error"] = code;
  j["message"] = message;
  std::cerr << j.dump() << "\n";
}

}  // namespace

Json resolve_manifold_spec(const Json& value) {
  if (value.is_object()) {
    manifold_from_json(value);  // validate
    return value;
  }
  if (!value.is_string()) config_error("manifold must be a preset name, a JSON file or a JSON object");
  const auto text = value.get<std::string>();
  if (auto it = presets().find(text); it != presets().end()) return it->second;
  Json spec;
  if (!text.empty() && text.front() == '{') {
    spec = parse_json(text, "manifold");
  } else if (fs::exists(text)) {
    spec = parse_json(io::read_text(text), text);
  } else {
    std::string names;
    for (const auto& [name, _] : presets()) names += (names.empty() ? "" : ", ") + name;
    config_error("unknown manifold '" + text + "' (presets: " + names + ")");
  }
  return resolve_manifold_spec(spec);
}

manifolds::ManifoldOracle manifold_from_json(const Json& spec) {
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string()) {
    config_error("manifold: expected an object with a string 'kind'");
  }
  const auto kind = spec.at("kind").get<std::string>();
  const std::string what = "manifold " + kind;
  if (kind == "rectangle-curve") {
    check_keys(spec, {"kind", "vertices"}, what);
    return ManifoldOracle(manifolds::RectangleCurve{rectangle_field(spec, "vertices")});
  }
  if (kind == "circle") {
    check_keys(spec, {"kind", "radius"}, what);
    const double r = number_field(spec, "radius", what);
    if (!(r > 0.0)) throw Error("invalid_argument", "circle radius must be positive");
    return ManifoldOracle(manifolds::CircleCurve{r});
  }
  if (kind == "annulus") {
    check_keys(spec, {"kind", "inner", "outer"}, what);
    manifolds::RectangularAnnulus a{rectangle_field(spec, "inner"), rectangle_field(spec, "outer")};
    manifolds::validate_annulus(a);
    return ManifoldOracle(a);
  }
  if (kind == "sphere-cap") {
    check_keys(spec, {"kind", "max_colatitude"}, what);
    return ManifoldOracle(manifolds::SphereCap{number_field(spec, "max_colatitude", what)});
  }
  if (kind == "spiral") {
    check_keys(spec, {"kind", "beta", "t_min", "t_max"}, what);
    return ManifoldOracle(manifolds::Spiral{number_field(spec, "beta", what), number_field(spec, "t_min", what),
                                            number_field(spec, "t_max", what)});
  }
  if (kind == "swiss-roll") {
    check_keys(spec, {"kind", "beta", "s_min", "s_max", "h_min", "h_max"}, what);
    return ManifoldOracle(manifolds::SwissRoll{number_field(spec, "beta", what), number_field(spec, "s_min", what),
                                               number_field(spec, "s_max", what), number_field(spec, "h_min", what),
                                               number_field(spec, "h_max", what)});
  }
  config_error("unknown manifold kind '" + kind + "'");
}

Json run_stage(const std::string& command, const Json& params, const fs::path& out_dir) {
  const auto& spec = find_stage(command);
  return execute(spec, normalize(spec, params), out_dir);
}

Json run_pipeline(const Json& config) {
  if (!config.is_object()) config_error("run config must be a JSON object");
  check_keys(config, {"output_dir", "seed", "stages"}, "run config");
  if (!config.contains("stages") || !config.at("stages").is_array()) config_error("run config: 'stages' must be a list");
  if (config.contains("seed") && !is_nonnegative_integer(config.at("seed"))) {
    config_error("run config: 'seed' must be a nonnegative integer");
  }
  Json manifest;
  manifest["command"] = "pipeline";
  manifest["version"] = kVersion;
  manifest["stages"] = Json::array();
  manifest["outputs"] = Json::array();
  if (config.at("stages").empty()) return manifest;
  if (!config.contains("output_dir") || !config.at("output_dir").is_string()) {
    config_error("run config: 'output_dir' must be a path");
  }
  const fs::path out_dir = config.at("output_dir").get<std::string>();
  const Json seed = config.value("seed", Json(0));

  // Resolve every stage before running any of them.
  std::vector<std::pair<const StageSpec*, Json>> plan;
  Context ctx;
  std::size_t index = 0;
  for (const auto& raw_stage : config.at("stages")) {
    ++index;
    if (!raw_stage.is_object() || !raw_stage.contains("stage") || !raw_stage.at("stage").is_string()) {
      config_error("stage " + std::to_string(index) + ": expected an object with a string 'stage'");
    }
    const auto& spec = find_stage(raw_stage.at("stage").get<std::string>());
    Json raw = raw_stage;
    raw.erase("stage");
    const bool takes_seed = std::any_of(spec.params.begin(), spec.params.end(),
                                        [](const ParamSpec& p) { return p.key == "seed"; });
    if (takes_seed && !raw.contains("seed")) raw["seed"] = seed;
    spec.link(raw, ctx);
    Json params;
    try {
      params = normalize(spec, raw);
    } catch (const Error& e) {
      throw Error(e.code(), "stage " + std::to_string(index) + " (" + spec.name + "): " + e.what() +
                                ". Inputs come from earlier stages or explicit paths");
    }
    if (has(params, "manifold")) ctx["manifold"] = params.at("manifold");
    spec.publish(params, out_dir, ctx);
    plan.emplace_back(&spec, std::move(params));
  }

  Json resolved = config;
  resolved["output_dir"] = out_dir.string();
  resolved["seed"] = seed;
  resolved["stages"] = Json::array();
  for (const auto& [spec, params] : plan) {
    Json stage = {{"stage", spec->name}};
    stage.update(params);
    resolved["stages"].push_back(stage);
    const auto stage_manifest = execute(*spec, params, out_dir);
    manifest["stages"].push_back({{"stage", spec->name}, {"manifest", "manifest." + spec->tag(params) + ".json"}});
    for (const auto& o : stage_manifest.at("outputs")) manifest["outputs"].push_back(o);
  }
  manifest["config"] = resolved;
  write_json(out_dir / "manifest.pipeline.json", manifest);
  return manifest;
}

Json replay(const fs::path& manifest_path, const fs::path& out_dir) {
  const auto recorded = parse_json(io::read_text(manifest_path), manifest_path.string());
  if (!recorded.is_object() || !recorded.contains("command") || !recorded.contains("outputs")) {
    throw Error("format_error", manifest_path.string() + ": not a run manifest");
  }
  const auto command = recorded.at("command").get<std::string>();
  Json rerun;
  if (command == "pipeline") {
    Json config = recorded.at("config");
    config["output_dir"] = out_dir.string();
    rerun = run_pipeline(config);
  } else {
    rerun = run_stage(command, recorded.at("parameters"), out_dir);
  }
  std::map<std::string, std::string> fresh;
  for (const auto& o : rerun.at("outputs")) fresh[o.at("path").get<std::string>()] = o.at("sha256").get<std::string>();
  Json mismatches = Json::array();
  for (const auto& o : recorded.at("outputs")) {
    const auto path = o.at("path").get<std::string>();
    auto it = fresh.find(path);
    if (it == fresh.end() || it->second != o.at("sha256").get<std::string>()) mismatches.push_back(path);
  }
  Json report;
  report["command"] = command;
  report["output_dir"] = out_dir.string();
  report["reproduced"] = mismatches.empty();
  report["mismatches"] = mismatches;
  return report;
}

int run(int argc, char** argv) {
  CLI::App app{"geodesica: geodesic distances, neighborhood graphs and Euclidean embeddings"};
  app.set_version_flag("--version", std::string("geodesica ") + kVersion);
  app.require_subcommand(1);

  struct Bound {
    const StageSpec* spec;
    CLI::App* sub;
    std::map<std::string, std::string> text;
    std::map<std::string, bool> flags;
    std::string out = ".";
  };
  std::vector<std::unique_ptr<Bound>> bound;
  for (const auto& spec : stages()) {
    auto b = std::make_unique<Bound>();
    b->spec = &spec;
    b->sub = app.add_subcommand(spec.name, spec.help);
    b->sub->add_option("-o,--out", b->out, "output directory")->capture_default_str();
    for (const auto& param : spec.params) {
      std::string help = param.help;
      if (!param.fallback.is_null() && param.type != ParamType::Flag) help += " [default: " + param.fallback.dump() + "]";
      if (param.type == ParamType::Flag) {
        b->sub->add_flag("--" + dashed(param.key), b->flags[param.key], help);
      } else {
        auto* opt = b->sub->add_option("--" + dashed(param.key), b->text[param.key], help);
        if (param.required) opt->required();
      }
    }
    bound.push_back(std::move(b));
  }

  std::string config_path;
  auto* pipeline = app.add_subcommand("pipeline", "Run a JSON run config");
  pipeline->add_option("config", config_path, "run config JSON")->required();
  std::string manifest_path, replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a manifest and compare output hashes");
  replay_cmd->add_option("manifest", manifest_path, "manifest JSON")->required();
  replay_cmd->add_option("-o,--out", replay_out, "output directory (default: the manifest's directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage_error", e.what());
    return 2;
  }

  try {
    Json result;
    if (pipeline->parsed()) {
      result = run_pipeline(parse_json(io::read_text(config_path), config_path));
    } else if (replay_cmd->parsed()) {
      fs::path out = replay_out.empty() ? fs::path(manifest_path).parent_path() : fs::path(replay_out);
      if (out.empty()) out = ".";
      result = replay(manifest_path, out);
      std::cout << result.dump(2) << "\n";
      return result.at("reproduced").get<bool>() ? 0 : 1;
    } else {
      for (const auto& b : bound) {
        if (!b->sub->parsed()) continue;
        Json raw = Json::object();
        for (const auto& param : b->spec->params) {
          if (param.type == ParamType::Flag) {
            if (b->flags[param.key]) raw[param.key] = true;
          } else if (b->sub->count("--" + dashed(param.key)) > 0) {
            raw[param.key] = parse_cli_value(param, b->text[param.key]);
          }
        }
        result = run_stage(b->spec->name, raw, b->out);
      }
    }
    std::cout << result.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    print_error(e.code(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal_error", e.what());
    return 3;
  }
}

}  // namespace geodesica::cli
