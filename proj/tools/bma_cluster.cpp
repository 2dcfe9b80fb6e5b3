// bma_cluster: command-line front end for the model-averaging pipeline.
//
//   bma_cluster run       combine clustering results into probabilistic allocations
//   bma_cluster scan      validity-index table across a range of k
//   bma_cluster simulate  separation-controlled Gaussian cluster data
//   bma_cluster heatmap   render an N x N matrix CSV as SVG

#include "bmaclust/clusterers.hpp"
#include "bmaclust/core_model.hpp"
#include "bmaclust/io.hpp"
#include "bmaclust/kernels.hpp"
#include "bmaclust/pipeline.hpp"
#include "bmaclust/simdata.hpp"
#include "bmaclust/svg.hpp"
#include "bmaclust/validity.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace bmaclust;
namespace fs = std::filesystem;

struct RunArgs {
  std::string config;
  std::string data;
  std::vector<std::string> allocs;
  std::vector<std::string> models;
  int k_bma = 0;
  std::string mode;
  std::vector<double> prior;
  double lambda = -1.0;
  int restarts = 0;
  int max_iter = 0;
  double tol = 0.0;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool no_heatmaps = false;
};

int exit_code_for(const BmaError& e) {
  switch (e.code()) {
    case ErrorCode::DimensionMismatch: return 3;
    default: return 2;
  }
}

int do_run(const RunArgs& a) {
  PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : load_config(a.config);
  if (!a.data.empty()) cfg.data = a.data;
  if (!a.allocs.empty() || !a.models.empty()) cfg.models.clear();
  for (const auto& path : a.allocs) {
    ModelSpec spec;
    spec.kind = ModelSpec::Kind::AllocationFile;
    spec.path = path;
    cfg.models.push_back(spec);
  }
  for (const auto& text : a.models) cfg.models.push_back(parse_model_spec(text));
  if (a.k_bma > 0) cfg.k_bma = a.k_bma;
  if (!a.mode.empty()) cfg.mode = parse_weight_mode(a.mode);
  if (!a.prior.empty()) cfg.prior = a.prior;
  if (a.lambda >= 0.0) cfg.ssmf.lambda = a.lambda;
  if (a.restarts > 0) cfg.ssmf.restarts = a.restarts;
  if (a.max_iter > 0) cfg.ssmf.max_iter = a.max_iter;
  if (a.tol > 0.0) cfg.ssmf.tol = a.tol;
  if (a.seed) cfg.seed = *a.seed;
  if (!a.out.empty()) cfg.out = a.out;
  if (a.no_heatmaps) cfg.heatmaps = false;

  const PipelineResult r = run_pipeline(cfg);
  std::cout << "models:";
  for (std::size_t m = 0; m < r.models.size(); ++m) {
    std::cout << ' ' << r.models[m].model_id() << '=' << io::format_double(r.weights.weights[m]);
  }
  std::cout << "\nk_bma: " << r.bma.k_bma << " (emptied " << r.bma.emptied.size() << ")\n";
  if (r.truth_ari) std::cout << "ari vs label column: " << io::format_double(*r.truth_ari) << '\n';
  std::cout << "wrote " << cfg.out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  kernels::apply_thread_cap_from_env();

  CLI::App app{"Bayesian model averaging across clustering solutions"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Combine clustering results into probabilistic allocations");
  run_cmd->add_option("--config", run.config, "TOML config file")->check(CLI::ExistingFile);
  run_cmd->add_option("--data", run.data, "Feature CSV (header row; optional trailing `label` column)");
  run_cmd->add_option("--alloc", run.allocs, "Allocation CSV (repeatable)");
  run_cmd->add_option("--model", run.models, "Built-in model algorithm:k[:seed], algorithm in kmeans|hclust|gmm (repeatable)");
  run_cmd->add_option("--k-bma", run.k_bma, "Final cluster count (default: largest model k)");
  run_cmd->add_option("--weights-mode", run.mode, "standard|literal|bic");
  run_cmd->add_option("--prior", run.prior, "Comma-separated prior model probabilities")->delimiter(',');
  run_cmd->add_option("--lambda", run.lambda, "Concentration weight of the factorisation");
  run_cmd->add_option("--restarts", run.restarts, "Factorisation restarts");
  run_cmd->add_option("--max-iter", run.max_iter, "Factorisation iteration cap");
  run_cmd->add_option("--tol", run.tol, "Relative objective tolerance");
  run_cmd->add_option("--seed", run.seed, "Seed for built-in clusterers and the factorisation");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_flag("--no-heatmaps", run.no_heatmaps, "Skip SVG output");

  std::string scan_data;
  std::string scan_algo = "kmeans";
  int k_min = 2;
  int k_max = 10;
  std::uint64_t scan_seed = 0;
  std::string scan_out;
  auto* scan_cmd = app.add_subcommand("scan", "Validity indices for each k in a range");
  scan_cmd->add_option("--data", scan_data, "Feature CSV")->required();
  scan_cmd->add_option("--algorithm", scan_algo, "kmeans|hclust|gmm");
  scan_cmd->add_option("--k-min", k_min, "Smallest k (>= 2)");
  scan_cmd->add_option("--k-max", k_max, "Largest k (<= N-1)");
  scan_cmd->add_option("--seed", scan_seed, "Clusterer seed");
  scan_cmd->add_option("--out", scan_out, "Output CSV (default stdout)");

  int n_per = 100;
  int sim_k = 5;
  int sim_d = 2;
  double separation = 0.6;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate separation-controlled Gaussian clusters");
  sim_cmd->add_option("--n-per-cluster", n_per, "Points per cluster");
  sim_cmd->add_option("--k", sim_k, "Number of clusters");
  sim_cmd->add_option("--d", sim_d, "Dimension");
  sim_cmd->add_option("--separation", separation, "Nearest-pair separation index in [-1, 1)");
  sim_cmd->add_option("--seed", sim_seed, "Random seed");
  sim_cmd->add_option("--out", sim_out, "Output CSV (x1..xd,label)")->required();

  std::string hm_matrix;
  std::string hm_out;
  std::string hm_order;
  auto* hm_cmd = app.add_subcommand("heatmap", "Render a header-less N x N CSV with entries in [0,1] as SVG");
  hm_cmd->add_option("--matrix", hm_matrix, "Matrix CSV")->required()->check(CLI::ExistingFile);
  hm_cmd->add_option("--out", hm_out, "Output SVG")->required();
  hm_cmd->add_option("--order-by", hm_order, "Allocation CSV whose modal labels order rows and columns");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return do_run(run);

    if (*scan_cmd) {
      const io::FeatureData data = io::read_feature_csv(scan_data);
      Clusterer clusterer;
      if (scan_algo == "kmeans") {
        clusterer = [&](const FeatureMatrix& x, int k) { return kmeans_fit(x, k, scan_seed).labels; };
      } else if (scan_algo == "hclust") {
        const auto tree = ward_tree(data.x);
        clusterer = [tree](const FeatureMatrix& x, int k) { return cut_tree(tree, x.n(), k); };
      } else if (scan_algo == "gmm") {
        clusterer = [&](const FeatureMatrix& x, int k) { return harden(gmm_diag(x, k, scan_seed).responsibilities); };
      } else {
        throw BmaError(ErrorCode::InvalidArgument, "unknown algorithm '" + scan_algo + "'");
      }
      const auto rows = index_scan(data.x, clusterer, k_min, k_max);
      if (scan_out.empty()) {
        io::write_scan_csv(std::cout, rows);
      } else {
        std::ofstream out(scan_out, std::ios::binary);
        if (!out) throw BmaError(ErrorCode::Io, "cannot write '" + scan_out + "'");
        io::write_scan_csv(out, rows);
      }
      for (const auto& row : rows) {
        if (!row.report) std::cerr << "k=" << row.k << ": " << row.error << '\n';
      }
      return 0;
    }

    if (*sim_cmd) {
      const SimulatedData data = generate_clusters(n_per, sim_k, sim_d, separation, sim_seed);
      io::write_data_csv(sim_out, data);
      std::cout << "wrote " << data.x.n() << " rows to " << sim_out << " (nearest-pair separation "
                << io::format_double(nearest_pair_separation(data.centres)) << ")\n";
      return 0;
    }

    if (*hm_cmd) {
      const Matrix m = io::read_matrix_csv(hm_matrix);
      std::vector<Eigen::Index> order;
      if (!hm_order.empty()) {
        const AllocationMatrix a = io::read_allocation_csv(hm_order, "order");
        if (a.n() != m.rows()) {
          throw BmaError(ErrorCode::DimensionMismatch, "order file has " + std::to_string(a.n()) +
                                                           " rows, matrix has " + std::to_string(m.rows()));
        }
        order = svg::order_by_label(harden(a));
      }
      svg::render_heatmap(m, hm_out, order);
      return 0;
    }
  } catch (const BmaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
