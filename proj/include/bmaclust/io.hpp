#pragma once

#include "bmaclust/clusterers.hpp"
#include "bmaclust/simdata.hpp"
#include "bmaclust/types.hpp"
#include "bmaclust/validity.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bmaclust::io {

using Json = nlohmann::ordered_json;

/// Shortest text that round-trips the double.
std::string format_double(double v);

struct FeatureData {
  FeatureMatrix x;
  std::vector<std::string> columns;
  std::optional<Labels> truth;  // from a trailing `label` column, if present
};

/// Feature CSV with a header row. A final column named `label` is treated as
/// ground truth and kept out of the feature matrix.
FeatureData read_feature_csv(const std::filesystem::path& path);

/// Allocation CSV: header `c1,...,cK` with probability rows, or a single
/// `label` column of 1-based integer labels.
AllocationMatrix read_allocation_csv(const std::filesystem::path& path, const std::string& model_id);

/// Header-less square matrix of numbers.
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// `c1..cK,label,uncertainty` for a BMA result.
void write_allocations_csv(const std::filesystem::path& path, const BmaResult& r);

/// Allocation CSV in the shared input format (soft columns, or `label` when hard).
void write_allocation_csv(const std::filesystem::path& path, const AllocationMatrix& a);

/// `x1..xd,label` simulated data.
void write_data_csv(const std::filesystem::path& path, const SimulatedData& data);

/// One row per k, one column per index; failed rows carry NA.
void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows);

Json weights_json(const ModelWeights& w);
Json diagnostics_json(const BmaResult& r);
Json gmm_json(const GmmFit& fit);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace bmaclust::io
