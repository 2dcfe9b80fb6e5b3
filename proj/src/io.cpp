#include "bmaclust/io.hpp"

#include "bmaclust/core_model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bmaclust::io {
namespace {

namespace fs = std::filesystem;

struct CsvRows {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

CsvRows read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw BmaError(ErrorCode::Io, "cannot open '" + path.string() + "'");
  CsvRows out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    out.rows.push_back(std::move(fields));
    out.line_numbers.push_back(line_no);
  }
  return out;
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

double parse_double(const std::string& field, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw BmaError(ErrorCode::InvalidInput, where(path, line) + ": '" + field + "' is not a number");
  }
  return v;
}

int parse_label(const std::string& field, const fs::path& path, std::size_t line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw BmaError(ErrorCode::InvalidInput, where(path, line) + ": '" + field + "' is not an integer label");
  }
  return v;
}

void check_width(const CsvRows& csv, std::size_t width, const fs::path& path) {
  for (std::size_t r = 1; r < csv.rows.size(); ++r) {
    if (csv.rows[r].size() != width) {
      throw BmaError(ErrorCode::InvalidInput, where(path, csv.line_numbers[r]) + ": expected " +
                                                  std::to_string(width) + " fields, got " +
                                                  std::to_string(csv.rows[r].size()));
    }
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BmaError(ErrorCode::Io, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

FeatureData read_feature_csv(const fs::path& path) {
  const CsvRows csv = read_csv(path);
  if (csv.rows.size() < 2) {
    throw BmaError(ErrorCode::InvalidInput, path.string() + ": needs a header and at least one data row");
  }
  const auto& header = csv.rows.front();
  check_width(csv, header.size(), path);
  const bool has_label = header.size() > 1 && header.back() == "label";
  const std::size_t d = has_label ? header.size() - 1 : header.size();

  Matrix values(static_cast<Eigen::Index>(csv.rows.size() - 1), static_cast<Eigen::Index>(d));
  Labels truth;
  for (std::size_t r = 1; r < csv.rows.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
          parse_double(csv.rows[r][c], path, csv.line_numbers[r]);
    }
    if (has_label) truth.push_back(parse_label(csv.rows[r].back(), path, csv.line_numbers[r]));
  }
  try {
    FeatureData out{FeatureMatrix(std::move(values)), {header.begin(), header.begin() + static_cast<std::ptrdiff_t>(d)}, std::nullopt};
    if (has_label) out.truth = std::move(truth);
    return out;
  } catch (const BmaError& e) {
    throw BmaError(e.code(), path.string() + ": " + e.what());
  }
}

AllocationMatrix read_allocation_csv(const fs::path& path, const std::string& model_id) {
  const CsvRows csv = read_csv(path);
  if (csv.rows.size() < 2) {
    throw BmaError(ErrorCode::InvalidInput, path.string() + ": needs a header and at least one data row");
  }
  const auto& header = csv.rows.front();
  check_width(csv, header.size(), path);
  try {
    if (header.size() == 1 && header.front() == "label") {
      Labels labels;
      for (std::size_t r = 1; r < csv.rows.size(); ++r) {
        labels.push_back(parse_label(csv.rows[r][0], path, csv.line_numbers[r]));
      }
      return allocation_from_labels(labels, model_id);
    }
    for (const auto& name : header) {
      if (name.empty() || name.front() != 'c') {
        throw BmaError(ErrorCode::InvalidInput, where(path, csv.line_numbers.front()) +
                                                    ": header must be `label` or `c1,...,cK`");
      }
    }
    Matrix probs(static_cast<Eigen::Index>(csv.rows.size() - 1), static_cast<Eigen::Index>(header.size()));
    for (std::size_t r = 1; r < csv.rows.size(); ++r) {
      for (std::size_t c = 0; c < header.size(); ++c) {
        probs(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
            parse_double(csv.rows[r][c], path, csv.line_numbers[r]);
      }
    }
    return validate_allocation(probs, model_id);
  } catch (const BmaError& e) {
    if (e.code() == ErrorCode::InvalidInput) throw;
    throw BmaError(e.code(), path.string() + ": " + e.what());
  }
}

Matrix read_matrix_csv(const fs::path& path) {
  const CsvRows csv = read_csv(path);
  if (csv.rows.empty()) throw BmaError(ErrorCode::InvalidInput, path.string() + ": empty matrix file");
  const std::size_t width = csv.rows.front().size();
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    if (csv.rows[r].size() != width) {
      throw BmaError(ErrorCode::InvalidInput, where(path, csv.line_numbers[r]) + ": ragged row");
    }
  }
  Matrix m(static_cast<Eigen::Index>(csv.rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_double(csv.rows[r][c], path, csv.line_numbers[r]);
    }
  }
  return m;
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_allocations_csv(const fs::path& path, const BmaResult& r) {
  std::ofstream out = open_out(path);
  for (Eigen::Index k = 0; k < r.allocation.cols(); ++k) out << 'c' << (k + 1) << ',';
  out << "label,uncertainty\n";
  const Labels modal = harden(r.allocation);
  for (Eigen::Index i = 0; i < r.allocation.rows(); ++i) {
    for (Eigen::Index k = 0; k < r.allocation.cols(); ++k) out << format_double(r.allocation(i, k)) << ',';
    out << modal[static_cast<std::size_t>(i)] << ',' << format_double(r.uncertainty[static_cast<std::size_t>(i)])
        << '\n';
  }
}

void write_allocation_csv(const fs::path& path, const AllocationMatrix& a) {
  std::ofstream out = open_out(path);
  if (a.hard()) {
    out << "label\n";
    for (int l : harden(a)) out << l << '\n';
    return;
  }
  for (int k = 0; k < a.k(); ++k) out << (k ? "," : "") << 'c' << (k + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < a.n(); ++i) {
    for (int k = 0; k < a.k(); ++k) out << (k ? "," : "") << format_double(a.probs()(i, k));
    out << '\n';
  }
}

void write_data_csv(const fs::path& path, const SimulatedData& data) {
  std::ofstream out = open_out(path);
  const Matrix& v = data.x.values();
  for (Eigen::Index j = 0; j < v.cols(); ++j) out << 'x' << (j + 1) << ',';
  out << "label\n";
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) out << format_double(v(i, j)) << ',';
    out << data.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
  out << "k,ch,xb,dunn,silhouette,davies_bouldin\n";
  for (const ScanRow& row : rows) {
    out << row.k;
    if (row.report) {
      const IndexReport& r = *row.report;
      for (double v : {r.ch, r.xb, r.dunn, r.silhouette, r.davies_bouldin}) out << ',' << format_double(v);
    } else {
      out << ",NA,NA,NA,NA,NA";
    }
    out << '\n';
  }
}

namespace {

// JSON has no infinity; the sentinel is written as a string.
Json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

Json weights_json(const ModelWeights& w) {
  Json j;
  j["mode"] = std::string(to_string(w.mode));
  Json weights = Json::object();
  Json raw = Json::object();
  Json prior = Json::object();
  for (std::size_t m = 0; m < w.size(); ++m) {
    const std::string id = m < w.model_ids.size() ? w.model_ids[m] : "model" + std::to_string(m + 1);
    weights[id] = w.weights[m];
    prior[id] = w.prior[m];
    Json entry = Json::object();
    if (m < w.ch.size()) entry["ch"] = number(w.ch[m]);
    if (m < w.xb.size()) entry["xb"] = number(w.xb[m]);
    if (m < w.bic.size()) entry["bic"] = number(w.bic[m]);
    raw[id] = entry;
  }
  j["weights"] = weights;
  j["raw_indices"] = raw;
  j["prior"] = prior;
  return j;
}

Json diagnostics_json(const BmaResult& r) {
  Json j;
  j["k_bma"] = r.k_bma;
  j["seed"] = r.seed;
  j["lambda"] = r.lambda;
  j["restarts"] = r.restarts;
  j["best_restart"] = r.best_restart;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["final_objective"] = r.objective_trace.empty() ? 0.0 : r.objective_trace.back();
  j["emptied"] = r.emptied;
  j["objective_trace"] = r.objective_trace;
  return j;
}

Json gmm_json(const GmmFit& fit) {
  auto rows = [](const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      out.push_back(row);
    }
    return out;
  };
  Json j;
  j["k"] = fit.means.rows();
  j["n"] = fit.n;
  j["loglik"] = fit.loglik;
  j["kappa"] = fit.kappa;
  j["bic"] = fit.bic;
  j["converged"] = fit.converged;
  j["iterations"] = fit.loglik_trace.size();
  j["mixing"] = std::vector<double>(fit.mixing.data(), fit.mixing.data() + fit.mixing.size());
  j["means"] = rows(fit.means);
  j["variances"] = rows(fit.variances);
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw BmaError(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

}  // namespace bmaclust::io
