#pragma once

#include "bmaclust/io.hpp"
#include "bmaclust/ssmf.hpp"
#include "bmaclust/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bmaclust {

struct ModelSpec {
  enum class Kind { AllocationFile, KMeans, Hclust, Gmm };
  Kind kind = Kind::AllocationFile;
  std::filesystem::path path;  // AllocationFile only
  int k = 0;
  std::optional<std::uint64_t> seed;
  std::string id;  // derived when empty
};

/// "kmeans:5", "hclust:3", "gmm:4:17" (algorithm:k[:seed]).
ModelSpec parse_model_spec(const std::string& text);

struct PipelineConfig {
  std::filesystem::path data;
  std::vector<ModelSpec> models;
  std::optional<int> k_bma;
  WeightMode mode = WeightMode::Standard;
  std::vector<double> prior;  // empty means uniform
  SsmfOptions ssmf;
  std::uint64_t seed = 0;
  std::filesystem::path out = "bma_out";
  bool heatmaps = true;
};

/// Reads a TOML config. Relative paths are resolved against the file's
/// directory. The ssmf seed follows the top-level seed.
PipelineConfig load_config(const std::filesystem::path& path);

struct PipelineResult {
  std::vector<AllocationMatrix> models;
  std::vector<GmmFit> gmm_fits;  // parallel to models; meaningful for GMM entries only
  std::vector<SimilarityMatrix> similarities;
  ModelWeights weights;
  ConsensusMatrix consensus;
  BmaResult bma;
  std::optional<double> truth_ari;  // when the data carries a label column
};

/// The five in-memory steps: allocations, similarities, weights, consensus,
/// factorisation. Allocation files named in the config are read here.
PipelineResult compute_pipeline(const io::FeatureData& data, const PipelineConfig& cfg);

/// compute_pipeline() plus the on-disk bundle in cfg.out.
PipelineResult run_pipeline(const PipelineConfig& cfg);

void write_bundle(const io::FeatureData& data, const PipelineConfig& cfg, const PipelineResult& result);

}  // namespace bmaclust
