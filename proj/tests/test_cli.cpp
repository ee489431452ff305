#include "oracles.hpp"

#include "geodesica/cli.hpp"
#include "geodesica/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include <sys/wait.h>

using namespace geodesica;
using cli::Json;
namespace fs = std::filesystem;

namespace {

Json read_json(const fs::path& path) { return Json::parse(io::read_text(path)); }

struct Shell {
  int status = 0;
  std::string err;
};

// Runs the installed executable with stderr captured to a file.
Shell shell(const std::string& args, const fs::path& scratch) {
  const auto err = scratch / "stderr.txt";
  const std::string cmd = std::string("\"") + GEODESICA_CLI_PATH + "\" " + args + " > \"" +
                          (scratch / "stdout.txt").string() + "\" 2> \"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  Shell out;
  out.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  out.err = fs::exists(err) ? io::read_text(err) : "";
  return out;
}

std::size_t file_count(const fs::path& dir) {
  return fs::exists(dir) ? static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}))
                         : 0;
}

Json annulus_config(const fs::path& out) {
  return {{"output_dir", out.string()},
          {"seed", 5},
          {"stages",
           {{{"stage", "generate"}, {"manifold", "annulus-narrow"}, {"n", 120}},
            {{"stage", "graph"}, {"rule", "knn"}, {"k", 8}},
            {{"stage", "shortest-paths"}},
            {{"stage", "embed"}, {"method", "smacof"}, {"iters", 5}},
            {{"stage", "plot"}, {"name", "fig"}}}}};
}

}  // namespace

TEST_CASE("closed-curve spectrum through embed") {
  oracle::TempDir dir("cli_spectrum");
  cli::run_stage("generate", {{"manifold", "closed-curve"}, {"n", 200}}, dir.path());
  cli::run_stage("geodesics", {{"manifold", "closed-curve"}, {"points", (dir.path() / "points.csv").string()}},
                 dir.path());
  const auto manifest =
      cli::run_stage("embed", {{"dissimilarity", (dir.path() / "geodesics.csv").string()}, {"method", "cmds"}}, dir.path());
  const auto spectrum = read_json(dir.path() / "spectrum.json");
  CHECK(spectrum["n_pos"] == 100);
  CHECK(spectrum["n_zero"] == 1);
  CHECK(spectrum["n_neg"] == 99);
  CHECK(spectrum["pos_variation"].get<double>() == doctest::Approx(50.0).epsilon(1e-6));
  CHECK(io::load_configuration(dir.path() / "embedding.csv").dim() == 2);

  CHECK(manifest["command"] == "embed");
  CHECK(manifest["version"] == cli::kVersion);
  REQUIRE(manifest["inputs"].size() == 1);
  CHECK(manifest["inputs"][0]["sha256"] == io::sha256_file(dir.path() / "geodesics.csv"));
  REQUIRE(manifest["outputs"].size() == 3);
  for (const auto& o : manifest["outputs"]) {
    CHECK(o["sha256"] == io::sha256_file(dir.path() / o["path"].get<std::string>()));
  }
  CHECK(fs::exists(dir.path() / "manifest.embed.json"));
}

TEST_CASE("pipeline equals the individual stages") {
  oracle::TempDir a("cli_pipe"), b("cli_steps");
  const auto manifest = cli::run_pipeline(annulus_config(a.path()));
  CHECK(manifest["stages"].size() == 5);

  const auto p = [&](const char* f) { return (b.path() / f).string(); };
  cli::run_stage("generate", {{"manifold", "annulus-narrow"}, {"n", 120}, {"seed", 5}}, b.path());
  cli::run_stage("graph", {{"points", p("points.csv")}, {"rule", "knn"}, {"k", 8}}, b.path());
  cli::run_stage("shortest-paths", {{"graph", p("graph.json")}, {"points", p("points.csv")}}, b.path());
  cli::run_stage("embed", {{"dissimilarity", p("distances.csv")}, {"method", "smacof"}, {"iters", 5}}, b.path());
  cli::run_stage("plot", {{"embedding", p("embedding.csv")}, {"points", p("points.csv")}, {"name", "fig"}}, b.path());

  for (const auto& o : manifest["outputs"]) {
    const auto f = o["path"].get<std::string>();
    CHECK_MESSAGE(io::sha256_file(b.path() / f) == o["sha256"].get<std::string>(), f);
  }
  const auto data = io::read_text(a.path() / "fig_data.csv");
  CHECK(data.rfind("index,z1,z2,x1,x2\n", 0) == 0);
}

TEST_CASE("replay reproduces outputs") {
  oracle::TempDir a("cli_replay"), b("cli_replay_out");
  cli::run_pipeline(annulus_config(a.path()));
  const auto report = cli::replay(a.path() / "manifest.pipeline.json", b.path());
  CHECK(report["reproduced"] == true);
  CHECK(report["mismatches"].empty());

  const auto single = cli::replay(a.path() / "manifest.embed.json", b.path());
  CHECK(single["reproduced"] == true);

  // Tampered output is detected.
  auto recorded = read_json(a.path() / "manifest.embed.json");
  recorded["outputs"][0]["sha256"] = std::string(64, '0');
  std::ofstream(a.path() / "tampered.json") << recorded.dump(2);
  CHECK(cli::replay(a.path() / "tampered.json", b.path())["reproduced"] == false);
}

TEST_CASE("run config validation") {
  oracle::TempDir dir("cli_config");
  const auto empty_out = dir.path() / "empty";
  const auto m = cli::run_pipeline({{"output_dir", empty_out.string()}, {"stages", Json::array()}});
  CHECK(m["outputs"].empty());
  CHECK(!fs::exists(empty_out));

  auto bad = annulus_config(dir.path());
  bad["colour"] = "red";
  CHECK_THROWS_AS(cli::run_pipeline(bad), Error);

  bad = annulus_config(dir.path());
  bad["stages"][1]["radius"] = 0.2;
  CHECK_THROWS_AS(cli::run_pipeline(bad), Error);

  bad = annulus_config(dir.path());
  bad["seed"] = -1;
  CHECK_THROWS_AS(cli::run_pipeline(bad), Error);

  bad = annulus_config(dir.path());
  bad["stages"][0]["stage"] = "teleport";
  CHECK_THROWS_AS(cli::run_pipeline(bad), Error);

  // Stage without an upstream source for its input.
  const Json orphan = {{"output_dir", dir.path().string()}, {"stages", {{{"stage", "embed"}}}}};
  CHECK_THROWS_AS(cli::run_pipeline(orphan), Error);
  CHECK(file_count(dir.path()) == 0);  // nothing runs before the whole config resolves

  CHECK_THROWS_AS(cli::resolve_manifold_spec("no-such-preset"), Error);
  CHECK_THROWS_AS(cli::resolve_manifold_spec(Json{{"kind", "circle"}, {"radius", -1.0}}), Error);
  CHECK_THROWS_AS(cli::resolve_manifold_spec(Json{{"kind", "circle"}, {"radius", 1.0}, {"extra", 2}}), Error);
  CHECK(cli::manifold_from_json(cli::resolve_manifold_spec("hemisphere")).kind() ==
        manifolds::ManifoldKind::SpherePatch);
}

TEST_CASE("disconnected graphs") {
  oracle::TempDir dir("cli_disconnected");
  const auto p = [&](const char* f) { return (dir.path() / f).string(); };
  io::write_text(dir.path() / "points.csv", "dim=2\n0,0\n0.1,0\n5,0\n5.1,0\n5.2,0\n");
  cli::run_stage("graph", {{"points", p("points.csv")}, {"epsilon", 0.5}}, dir.path());
  const auto comp = read_json(dir.path() / "components.json");
  CHECK(comp["count"] == 2);
  CHECK(comp["sizes"] == Json::array({2, 3}));

  try {
    cli::run_stage("shortest-paths", {{"graph", p("graph.json")}, {"points", p("points.csv")}}, dir.path());
    FAIL("expected a disconnected-graph error");
  } catch (const Error& e) {
    CHECK(std::string(e.code()) == "disconnected_graph");
  }
  cli::run_stage("shortest-paths", {{"graph", p("graph.json")}, {"points", p("points.csv")}, {"largest_component", true}},
                 dir.path());
  CHECK(io::load_dissimilarity(dir.path() / "distances.csv").size() == 3);
  CHECK(io::load_point_cloud(dir.path() / "points_kept.csv").size() == 3);
}

TEST_CASE("executable exit codes and error JSON") {
  oracle::TempDir dir("cli_exe");
  const auto out = dir.path().string();

  auto r = shell("generate --manifold unit-circle --n 50 --seed 3 -o \"" + out + "\"", dir.path());
  CHECK(r.status == 0);
  CHECK(io::load_point_cloud(dir.path() / "points.csv").size() == 50);
  CHECK(fs::exists(dir.path() / "manifest.generate.json"));

  r = shell("embed --dissimilarity \"" + out + "/missing.csv\" -o \"" + out + "\"", dir.path());
  CHECK(r.status == 1);
  const auto err = Json::parse(r.err);
  CHECK(err.contains("error"));
  CHECK(err.contains("message"));

  r = shell("generate --manifold unit-circle --n many -o \"" + out + "\"", dir.path());
  CHECK(r.status != 0);
  CHECK(Json::parse(r.err)["error"] == "usage_error");

  r = shell("frobnicate", dir.path());
  CHECK(r.status != 0);

  io::write_text(dir.path() / "empty.json", "{\"output_dir\": \"" + out + "/none\", \"stages\": []}");
  r = shell("pipeline \"" + out + "/empty.json\"", dir.path());
  CHECK(r.status == 0);
  CHECK(!fs::exists(dir.path() / "none"));

  r = shell("replay \"" + out + "/manifest.generate.json\" -o \"" + out + "/again\"", dir.path());
  CHECK(r.status == 0);
  CHECK(io::sha256_file(dir.path() / "again" / "points.csv") == io::sha256_file(dir.path() / "points.csv"));
}
