#include "bmaclust/pipeline.hpp"

#include "bmaclust/clusterers.hpp"
#include "bmaclust/core_model.hpp"
#include "bmaclust/metrics.hpp"
#include "bmaclust/svg.hpp"
#include "bmaclust/weights.hpp"

#include <toml.hpp>

#include <charconv>
#include <set>

namespace bmaclust {
namespace {

namespace fs = std::filesystem;

std::string file_safe(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.';
    if (!ok) c = '_';
  }
  return out;
}

std::string_view kind_name(ModelSpec::Kind kind) {
  switch (kind) {
    case ModelSpec::Kind::AllocationFile: return "file";
    case ModelSpec::Kind::KMeans: return "kmeans";
    case ModelSpec::Kind::Hclust: return "hclust";
    case ModelSpec::Kind::Gmm: return "gmm";
  }
  return "file";
}

ModelSpec::Kind parse_kind(std::string_view name) {
  if (name == "kmeans") return ModelSpec::Kind::KMeans;
  if (name == "hclust" || name == "ward" || name == "ward.D2") return ModelSpec::Kind::Hclust;
  if (name == "gmm") return ModelSpec::Kind::Gmm;
  throw BmaError(ErrorCode::InvalidArgument,
                 "unknown clustering algorithm '" + std::string(name) + "' (kmeans|hclust|gmm)");
}

template <typename T>
T parse_number(std::string_view text, const std::string& what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw BmaError(ErrorCode::InvalidArgument, "bad " + what + " '" + std::string(text) + "'");
  }
  return v;
}

// Unique, non-empty ids in model order.
std::vector<std::string> model_ids(const std::vector<ModelSpec>& specs) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const ModelSpec& s : specs) {
    std::string base = s.id;
    if (base.empty()) {
      base = s.kind == ModelSpec::Kind::AllocationFile
                 ? s.path.stem().string()
                 : std::string(kind_name(s.kind)) + "_k" + std::to_string(s.k);
    }
    std::string id = base;
    for (int suffix = 2; seen.count(id); ++suffix) id = base + "_" + std::to_string(suffix);
    seen.insert(id);
    ids.push_back(id);
  }
  return ids;
}

}  // namespace

ModelSpec parse_model_spec(const std::string& text) {
  std::vector<std::string_view> parts;
  std::string_view rest = text;
  while (true) {
    const auto colon = rest.find(':');
    parts.push_back(rest.substr(0, colon));
    if (colon == std::string_view::npos) break;
    rest.remove_prefix(colon + 1);
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw BmaError(ErrorCode::InvalidArgument, "model spec '" + text + "' must be algorithm:k[:seed]");
  }
  ModelSpec spec;
  spec.kind = parse_kind(parts[0]);
  spec.k = parse_number<int>(parts[1], "cluster count");
  if (parts.size() == 3) spec.seed = parse_number<std::uint64_t>(parts[2], "seed");
  return spec;
}

PipelineConfig load_config(const fs::path& path) {
  toml::table tbl;
  try {
    tbl = toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    throw BmaError(ErrorCode::InvalidInput, path.string() + ": " + std::string(e.description()));
  }
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  PipelineConfig cfg;
  if (auto v = tbl["data"].value<std::string>()) cfg.data = resolve(*v);
  if (auto v = tbl["seed"].value<std::int64_t>()) cfg.seed = static_cast<std::uint64_t>(*v);
  if (auto v = tbl["out"].value<std::string>()) cfg.out = resolve(*v);
  if (auto v = tbl["k_bma"].value<std::int64_t>()) cfg.k_bma = static_cast<int>(*v);
  if (auto v = tbl["heatmaps"].value<bool>()) cfg.heatmaps = *v;

  if (const toml::array* models = tbl["models"].as_array()) {
    for (const toml::node& node : *models) {
      const toml::table* m = node.as_table();
      if (m == nullptr) throw BmaError(ErrorCode::InvalidInput, path.string() + ": models[] entries must be tables");
      ModelSpec spec;
      if (auto alloc = (*m)["alloc"].value<std::string>()) {
        spec.kind = ModelSpec::Kind::AllocationFile;
        spec.path = resolve(*alloc);
      } else if (auto algo = (*m)["algorithm"].value<std::string>()) {
        spec.kind = parse_kind(*algo);
        spec.k = static_cast<int>((*m)["k"].value_or<std::int64_t>(0));
        if (auto s = (*m)["seed"].value<std::int64_t>()) spec.seed = static_cast<std::uint64_t>(*s);
      } else {
        throw BmaError(ErrorCode::InvalidInput, path.string() + ": each model needs `alloc` or `algorithm`");
      }
      if (auto id = (*m)["id"].value<std::string>()) spec.id = *id;
      cfg.models.push_back(spec);
    }
  }

  if (auto mode = tbl["weights"]["mode"].value<std::string>()) cfg.mode = parse_weight_mode(*mode);
  if (const toml::array* prior = tbl["weights"]["prior"].as_array()) {
    for (const toml::node& p : *prior) {
      auto v = p.value<double>();
      if (!v) throw BmaError(ErrorCode::InvalidInput, path.string() + ": weights.prior must be numbers");
      cfg.prior.push_back(*v);
    }
  }

  if (auto v = tbl["ssmf"]["lambda"].value<double>()) cfg.ssmf.lambda = *v;
  if (auto v = tbl["ssmf"]["restarts"].value<std::int64_t>()) cfg.ssmf.restarts = static_cast<int>(*v);
  if (auto v = tbl["ssmf"]["max_iter"].value<std::int64_t>()) cfg.ssmf.max_iter = static_cast<int>(*v);
  if (auto v = tbl["ssmf"]["tol"].value<double>()) cfg.ssmf.tol = *v;
  cfg.ssmf.seed = cfg.seed;
  return cfg;
}

PipelineResult compute_pipeline(const io::FeatureData& data, const PipelineConfig& cfg) {
  if (cfg.models.empty()) throw BmaError(ErrorCode::NoModels, "no models configured");
  const FeatureMatrix& x = data.x;
  const std::vector<std::string> ids = model_ids(cfg.models);

  PipelineResult result;
  result.gmm_fits.resize(cfg.models.size());

  // Step 1: allocation matrices.
  for (std::size_t m = 0; m < cfg.models.size(); ++m) {
    const ModelSpec& spec = cfg.models[m];
    const std::uint64_t seed = spec.seed.value_or(cfg.seed);
    switch (spec.kind) {
      case ModelSpec::Kind::AllocationFile: {
        AllocationMatrix a = io::read_allocation_csv(spec.path, ids[m]);
        if (a.n() != x.n()) {
          throw BmaError(ErrorCode::DimensionMismatch, spec.path.string() + ": " + std::to_string(a.n()) +
                                                           " rows, data has " + std::to_string(x.n()));
        }
        result.models.push_back(std::move(a));
        break;
      }
      case ModelSpec::Kind::KMeans:
        result.models.push_back(kmeans(x, spec.k, seed, ids[m]));
        break;
      case ModelSpec::Kind::Hclust:
        result.models.push_back(ward_hclust(x, spec.k, ids[m]));
        break;
      case ModelSpec::Kind::Gmm:
        result.gmm_fits[m] = gmm_diag(x, spec.k, seed);
        result.models.push_back(result.gmm_fits[m].allocation(ids[m]));
        break;
    }
  }

  // Step 2: similarity matrices.
  for (const AllocationMatrix& a : result.models) {
    result.similarities.push_back(similarity_from_allocation(a));
  }

  // Step 3: model weights.
  if (cfg.mode == WeightMode::Bic) {
    for (const ModelSpec& spec : cfg.models) {
      if (spec.kind != ModelSpec::Kind::Gmm) {
        throw BmaError(ErrorCode::InvalidArgument, "weights mode 'bic' needs every model to be a built-in gmm");
      }
    }
    result.weights = bic_weights(result.gmm_fits, ids);
  } else {
    result.weights = chxb_weights(x, result.models, cfg.mode);
  }
  if (!cfg.prior.empty()) result.weights = apply_prior(result.weights, cfg.prior);

  // Step 4: consensus matrix.
  result.consensus = consensus(result.similarities, result.weights);

  // Step 5: factorisation.
  const int k_bma = cfg.k_bma.value_or(suggest_k_bma(result.models));
  SsmfOptions opts = cfg.ssmf;
  opts.seed = cfg.seed;
  result.bma = factorize(result.consensus, k_bma, opts);

  if (data.truth) result.truth_ari = adjusted_rand_index(*data.truth, harden(result.bma.allocation));
  return result;
}

void write_bundle(const io::FeatureData& data, const PipelineConfig& cfg, const PipelineResult& result) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw BmaError(ErrorCode::Io, "cannot create '" + cfg.out.string() + "': " + ec.message());

  io::write_text(cfg.out / "weights.json", io::weights_json(result.weights).dump(2) + "\n");

  const Labels modal = harden(result.bma.allocation);
  const std::vector<Eigen::Index> order = svg::order_by_label(modal);
  for (std::size_t m = 0; m < result.models.size(); ++m) {
    const std::string name = file_safe(result.models[m].model_id());
    io::write_matrix_csv(cfg.out / ("similarity_" + name + ".csv"), result.similarities[m].values);
    if (cfg.models[m].kind != ModelSpec::Kind::AllocationFile) {
      io::write_allocation_csv(cfg.out / ("model_" + name + ".csv"), result.models[m]);
    }
    if (cfg.models[m].kind == ModelSpec::Kind::Gmm) {
      io::write_text(cfg.out / ("gmm_" + name + ".json"), io::gmm_json(result.gmm_fits[m]).dump(2) + "\n");
    }
    if (cfg.heatmaps) {
      svg::render_heatmap(result.similarities[m].values, cfg.out / ("heatmap_" + name + ".svg"), order,
                          result.models[m].model_id() + " (weight " +
                              io::format_double(result.weights.weights[m]) + ")");
    }
  }
  io::write_matrix_csv(cfg.out / "consensus.csv", result.consensus.values);
  if (cfg.heatmaps) {
    svg::render_heatmap(result.consensus.values, cfg.out / "heatmap_consensus.svg", order, "consensus");
    if (data.x.d() >= 2) {
      svg::render_scatter(data.x.values(), modal, result.bma.uncertainty, cfg.out / "scatter.svg");
    }
  }
  io::write_allocations_csv(cfg.out / "allocations.csv", result.bma);

  io::Json diag = io::diagnostics_json(result.bma);
  diag["n"] = data.x.n();
  diag["weights_mode"] = std::string(to_string(result.weights.mode));
  io::Json models = io::Json::array();
  for (std::size_t m = 0; m < result.models.size(); ++m) {
    io::Json entry;
    entry["id"] = result.models[m].model_id();
    entry["source"] = std::string(kind_name(cfg.models[m].kind));
    entry["k"] = result.models[m].k();
    entry["hard"] = result.models[m].hard();
    entry["weight"] = result.weights.weights[m];
    models.push_back(entry);
  }
  diag["models"] = models;
  if (result.truth_ari) diag["truth_ari"] = *result.truth_ari;
  io::write_text(cfg.out / "diagnostics.json", diag.dump(2) + "\n");
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  if (cfg.data.empty()) throw BmaError(ErrorCode::InvalidArgument, "no feature data file configured");
  const io::FeatureData data = io::read_feature_csv(cfg.data);
  PipelineResult result = compute_pipeline(data, cfg);
  write_bundle(data, cfg, result);
  return result;
}

}  // namespace bmaclust
