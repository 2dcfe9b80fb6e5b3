#include "bmaclust/core_model.hpp"
#include "bmaclust/io.hpp"
#include "bmaclust/metrics.hpp"
#include "bmaclust/pipeline.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace bmaclust;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI with stdout/stderr captured to files in dir; returns the exit code.
int cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = std::string("\"") + BMA_CLUSTER_EXE + "\" " + args + " > \"" +
                          (dir / "stdout.txt").string() + "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<int> modal_labels(const fs::path& allocations) {
  std::ifstream in(allocations);
  std::string line;
  std::getline(in, line);
  std::vector<int> out;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    out.push_back(std::stoi(fields[fields.size() - 2]));
  }
  return out;
}

void three_pair_data(const fs::path& dir) {
  write(dir / "data.csv", "x\n0\n0.2\n5\n5.3\n10\n10.1\n");
  write(dir / "alloc.csv", "label\n1\n1\n2\n2\n3\n3\n");
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("model spec parsing") {
  const ModelSpec a = parse_model_spec("kmeans:5");
  CHECK(a.kind == ModelSpec::Kind::KMeans);
  CHECK(a.k == 5);
  CHECK_FALSE(a.seed);
  const ModelSpec b = parse_model_spec("gmm:4:17");
  CHECK(b.kind == ModelSpec::Kind::Gmm);
  CHECK(b.seed == 17u);
  CHECK(parse_model_spec("hclust:2").kind == ModelSpec::Kind::Hclust);
  CHECK_THROWS_AS(parse_model_spec("kmeans"), BmaError);
  CHECK_THROWS_AS(parse_model_spec("dbscan:3"), BmaError);
  CHECK_THROWS_AS(parse_model_spec("kmeans:three"), BmaError);
}

TEST_CASE("TOML config with defaults and relative paths") {
  const fs::path dir = testsupport::scratch_dir("config");
  write(dir / "run.toml", R"(data = "data.csv"
seed = 5
out = "result"
k_bma = 3

[[models]]
alloc = "a.csv"

[[models]]
algorithm = "gmm"
k = 3
seed = 9
id = "mixture"

[weights]
mode = "literal"
prior = [0.25, 0.75]

[ssmf]
lambda = 0.05
restarts = 4
)");
  const PipelineConfig cfg = load_config(dir / "run.toml");
  CHECK(cfg.data == dir / "data.csv");
  CHECK(cfg.out == dir / "result");
  CHECK(cfg.seed == 5);
  CHECK(cfg.k_bma == 3);
  REQUIRE(cfg.models.size() == 2);
  CHECK(cfg.models[0].kind == ModelSpec::Kind::AllocationFile);
  CHECK(cfg.models[0].path == dir / "a.csv");
  CHECK(cfg.models[1].kind == ModelSpec::Kind::Gmm);
  CHECK(cfg.models[1].seed == 9u);
  CHECK(cfg.models[1].id == "mixture");
  CHECK(cfg.mode == WeightMode::Literal);
  CHECK(cfg.prior == std::vector<double>{0.25, 0.75});
  CHECK(cfg.ssmf.lambda == 0.05);
  CHECK(cfg.ssmf.restarts == 4);
  CHECK(cfg.ssmf.max_iter == 1000);
  CHECK(cfg.ssmf.tol == 1e-8);

  write(dir / "broken.toml", "data = [\n");
  CHECK_THROWS_AS(load_config(dir / "broken.toml"), BmaError);
}

TEST_CASE("in-memory pipeline on identical allocations") {
  const fs::path dir = testsupport::scratch_dir("identical");
  three_pair_data(dir);
  PipelineConfig cfg;
  for (int m = 0; m < 3; ++m) {
    ModelSpec s;
    s.path = dir / "alloc.csv";
    cfg.models.push_back(s);
  }
  const PipelineResult r = compute_pipeline(io::read_feature_csv(dir / "data.csv"), cfg);
  CHECK(r.weights.model_ids == std::vector<std::string>{"alloc", "alloc_2", "alloc_3"});
  for (double w : r.weights.weights) CHECK(w == 1.0 / 3.0);
  CHECK((r.consensus.values - r.similarities[0].values).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(r.bma.k_bma == 3);
  CHECK(adjusted_rand_index(harden(r.bma.allocation), std::vector<int>{1, 1, 2, 2, 3, 3}) == 1.0);
}

TEST_CASE("bic mode requires gmm models") {
  const fs::path dir = testsupport::scratch_dir("bicmode");
  three_pair_data(dir);
  PipelineConfig cfg;
  cfg.mode = WeightMode::Bic;
  cfg.models.push_back(parse_model_spec("kmeans:2"));
  CHECK_THROWS_AS(compute_pipeline(io::read_feature_csv(dir / "data.csv"), cfg), BmaError);

  cfg.models = {parse_model_spec("gmm:2"), parse_model_spec("gmm:3")};
  const PipelineResult r = compute_pipeline(io::read_feature_csv(dir / "data.csv"), cfg);
  CHECK(r.weights.mode == WeightMode::Bic);
  CHECK(r.weights.weights[0] + r.weights.weights[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cli run writes the full bundle") {
  const fs::path dir = testsupport::scratch_dir("cli_bundle");
  REQUIRE(cli(dir, "simulate --n-per-cluster 40 --k 3 --d 2 --separation 0.4 --seed 2 --out \"" +
                       (dir / "data.csv").string() + "\"") == 0);
  const std::string run = "run --data \"" + (dir / "data.csv").string() +
                          "\" --model kmeans:3 --model hclust:3 --model gmm:3 --seed 4 --out \"";
  REQUIRE(cli(dir, run + (dir / "out1").string() + "\"") == 0);
  for (const char* f : {"weights.json", "consensus.csv", "allocations.csv", "diagnostics.json",
                        "similarity_kmeans_k3.csv", "similarity_hclust_k3.csv", "similarity_gmm_k3.csv",
                        "heatmap_kmeans_k3.svg", "heatmap_consensus.svg", "scatter.svg", "gmm_gmm_k3.json",
                        "model_kmeans_k3.csv"}) {
    CHECK_MESSAGE(fs::exists(dir / "out1" / f), f);
  }
  const auto labels = modal_labels(dir / "out1" / "allocations.csv");
  CHECK(labels.size() == 120);

  const io::Json w = io::Json::parse(slurp(dir / "out1" / "weights.json"));
  CHECK(w["mode"] == "standard");
  CHECK(w["weights"].size() == 3);
  CHECK(w["raw_indices"]["kmeans_k3"].contains("ch"));

  SUBCASE("identical config and seed give byte-identical output") {
    REQUIRE(cli(dir, run + (dir / "out2").string() + "\"") == 0);
    for (const auto& entry : fs::directory_iterator(dir / "out1")) {
      const fs::path twin = dir / "out2" / entry.path().filename();
      REQUIRE(fs::exists(twin));
      CHECK_MESSAGE(slurp(entry.path()) == slurp(twin), entry.path().filename().string());
    }
  }
}

TEST_CASE("cli run on three identical allocation files") {
  const fs::path dir = testsupport::scratch_dir("cli_identical");
  three_pair_data(dir);
  for (const char* name : {"a.csv", "b.csv", "c.csv"}) fs::copy_file(dir / "alloc.csv", dir / name);
  REQUIRE(cli(dir, "run --data \"" + (dir / "data.csv").string() + "\" --alloc \"" + (dir / "a.csv").string() +
                       "\" --alloc \"" + (dir / "b.csv").string() + "\" --alloc \"" + (dir / "c.csv").string() +
                       "\" --out \"" + (dir / "out").string() + "\"") == 0);
  const io::Json w = io::Json::parse(slurp(dir / "out" / "weights.json"));
  for (const char* id : {"a", "b", "c"}) CHECK(w["weights"][id].get<double>() == 1.0 / 3.0);
  const std::string consensus = slurp(dir / "out" / "consensus.csv");
  CHECK(consensus == slurp(dir / "out" / "similarity_a.csv"));
  CHECK(consensus == slurp(dir / "out" / "similarity_c.csv"));
}

TEST_CASE("cli run from a config file") {
  const fs::path dir = testsupport::scratch_dir("cli_config");
  three_pair_data(dir);
  write(dir / "run.toml", "data = \"data.csv\"\nout = \"bundle\"\nheatmaps = false\n\n[[models]]\nalloc = \"alloc.csv\"\n\n"
                          "[[models]]\nalgorithm = \"kmeans\"\nk = 2\n");
  REQUIRE(cli(dir, "run --config \"" + (dir / "run.toml").string() + "\"") == 0);
  CHECK(fs::exists(dir / "bundle" / "allocations.csv"));
  CHECK_FALSE(fs::exists(dir / "bundle" / "heatmap_consensus.svg"));
  const io::Json d = io::Json::parse(slurp(dir / "bundle" / "diagnostics.json"));
  CHECK(d["k_bma"] == 3);
  CHECK(d["models"].size() == 2);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = testsupport::scratch_dir("cli_errors");
  three_pair_data(dir);
  const std::string data = "run --data \"" + (dir / "data.csv").string() + "\" --out \"" + (dir / "o").string() + "\" ";

  write(dir / "short.csv", "label\n1\n2\n");
  CHECK(cli(dir, data + "--alloc \"" + (dir / "short.csv").string() + "\"") == 3);

  write(dir / "bad.csv", "c1,c2\n1,0\n1,0\n0.5,0.2\n0,1\n0,1\n0,1\n");
  CHECK(cli(dir, data + "--alloc \"" + (dir / "bad.csv").string() + "\"") == 2);
  const std::string err = slurp(dir / "stderr.txt");
  CHECK(err.find("bad.csv") != std::string::npos);
  CHECK(err.find("RowSumViolation") != std::string::npos);
  CHECK(err.find("row 3") != std::string::npos);

  write(dir / "text.csv", "label\n1\n1\nx\n2\n3\n3\n");
  CHECK(cli(dir, data + "--alloc \"" + (dir / "text.csv").string() + "\"") == 2);
  CHECK(slurp(dir / "stderr.txt").find("text.csv:4") != std::string::npos);

  CHECK(cli(dir, data + "--model kmeans:2 --weights-mode sideways") == 2);
  CHECK(cli(dir, data + "--model kmeans:2 --prior 0.2,0.2") == 2);
}

TEST_CASE("cli scan, simulate and heatmap") {
  const fs::path dir = testsupport::scratch_dir("cli_misc");
  REQUIRE(cli(dir, "simulate --n-per-cluster 30 --k 3 --separation 0.6 --seed 1 --out \"" +
                       (dir / "d.csv").string() + "\"") == 0);
  CHECK(slurp(dir / "stdout.txt").find("nearest-pair separation") != std::string::npos);
  const io::FeatureData data = io::read_feature_csv(dir / "d.csv");
  CHECK(data.x.n() == 90);
  REQUIRE(data.truth);

  REQUIRE(cli(dir, "scan --data \"" + (dir / "d.csv").string() + "\" --k-min 2 --k-max 5 --out \"" +
                       (dir / "scan.csv").string() + "\"") == 0);
  const std::string scan = slurp(dir / "scan.csv");
  CHECK(scan.rfind("k,ch,xb,dunn,silhouette,davies_bouldin\n2,", 0) == 0);
  CHECK(std::count(scan.begin(), scan.end(), '\n') == 5);
  CHECK(cli(dir, "scan --data \"" + (dir / "d.csv").string() + "\" --k-min 1 --k-max 3") == 2);

  io::write_matrix_csv(dir / "m.csv", Matrix::Identity(2, 2));
  REQUIRE(cli(dir, "heatmap --matrix \"" + (dir / "m.csv").string() + "\" --out \"" +
                       (dir / "m.svg").string() + "\"") == 0);
  const std::string svg = slurp(dir / "m.svg");
  CHECK(svg.find("fill=\"#000000\"") != std::string::npos);
  io::write_matrix_csv(dir / "big.csv", Matrix::Constant(2, 2, 2.0));
  CHECK(cli(dir, "heatmap --matrix \"" + (dir / "big.csv").string() + "\" --out \"" +
                     (dir / "big.svg").string() + "\"") == 2);
}

TEST_CASE("end-to-end recovery on well separated data") {
  const fs::path dir = testsupport::scratch_dir("cli_recovery");
  REQUIRE(cli(dir, "simulate --n-per-cluster 100 --k 5 --separation 0.6 --seed 3 --out \"" +
                       (dir / "d.csv").string() + "\"") == 0);
  REQUIRE(cli(dir, "run --data \"" + (dir / "d.csv").string() +
                       "\" --model kmeans:5 --model hclust:5 --model gmm:5 --seed 3 --no-heatmaps --out \"" +
                       (dir / "o").string() + "\"") == 0);
  const io::FeatureData data = io::read_feature_csv(dir / "d.csv");
  const auto labels = modal_labels(dir / "o" / "allocations.csv");
  CHECK(adjusted_rand_index(labels, *data.truth) > 0.9);
}

TEST_CASE("differing cluster counts combine into three clusters") {
  const fs::path dir = testsupport::scratch_dir("cli_mixed_k");
  REQUIRE(cli(dir, "simulate --n-per-cluster 100 --k 3 --separation 0.3 --seed 1 --out \"" +
                       (dir / "d.csv").string() + "\"") == 0);
  REQUIRE(cli(dir, "run --data \"" + (dir / "d.csv").string() +
                       "\" --model kmeans:3 --model hclust:2 --k-bma 3 --no-heatmaps --out \"" +
                       (dir / "o").string() + "\"") == 0);
  const io::Json d = io::Json::parse(slurp(dir / "o" / "diagnostics.json"));
  CHECK(d["emptied"].empty());
  auto labels = modal_labels(dir / "o" / "allocations.csv");
  std::sort(labels.begin(), labels.end());
  CHECK(std::unique(labels.begin(), labels.end()) - labels.begin() == 3);
}

}  // TEST_SUITE
