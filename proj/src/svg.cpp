#include "bmaclust/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace bmaclust::svg {
namespace {

constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BmaError(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw BmaError(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

std::string hex_gray(int level) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out = "#";
  for (int rep = 0; rep < 3; ++rep) {
    out += digits[(level >> 4) & 0xF];
    out += digits[level & 0xF];
  }
  return out;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

int gray_level(double v) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<int>(std::lround(255.0 * (1.0 - clamped)));
}

std::string heatmap(const Matrix& m, std::span<const Eigen::Index> order, const std::string& title) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw BmaError(ErrorCode::DimensionMismatch, "heatmap needs a square matrix");
  if (!order.empty() && static_cast<Eigen::Index>(order.size()) != n) {
    throw BmaError(ErrorCode::DimensionMismatch, "heatmap order length differs from matrix size");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(m(i, j) >= 0.0 && m(i, j) <= 1.0)) {
        throw BmaError(ErrorCode::InvalidInput, "heatmap entry (" + std::to_string(i + 1) + ", " +
                                                    std::to_string(j + 1) + ") outside [0, 1]");
      }
    }
  }
  auto at = [&](Eigen::Index p) { return order.empty() ? p : order[static_cast<std::size_t>(p)]; };

  const Eigen::Index pixels = std::clamp<Eigen::Index>(n * 8, 200, 800);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels
      << "\" viewBox=\"0 0 " << n << ' ' << n << "\" shape-rendering=\"crispEdges\">\n";
  if (!title.empty()) out << "<title>" << escape(title) << "</title>\n";
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out << "<rect x=\"" << c << "\" y=\"" << r << "\" width=\"1\" height=\"1\" fill=\""
          << hex_gray(gray_level(m(at(r), at(c)))) << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

void render_heatmap(const Matrix& m, const std::filesystem::path& path,
                    std::span<const Eigen::Index> order, const std::string& title) {
  write_file(path, heatmap(m, order, title));
}

std::vector<Eigen::Index> order_by_label(std::span<const int> labels) {
  std::vector<Eigen::Index> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return labels[static_cast<std::size_t>(a)] < labels[static_cast<std::size_t>(b)];
  });
  return order;
}

void render_scatter(const Matrix& x, std::span<const int> labels, std::span<const double> uncertainty,
                    const std::filesystem::path& path) {
  if (x.cols() < 2) throw BmaError(ErrorCode::InvalidArgument, "scatter needs at least 2 feature columns");
  if (static_cast<Eigen::Index>(labels.size()) != x.rows() ||
      static_cast<Eigen::Index>(uncertainty.size()) != x.rows()) {
    throw BmaError(ErrorCode::DimensionMismatch, "scatter inputs differ in length");
  }
  constexpr double size = 600.0;
  constexpr double margin = 20.0;
  const double x0 = x.col(0).minCoeff();
  const double x1 = x.col(0).maxCoeff();
  const double y0 = x.col(1).minCoeff();
  const double y1 = x.col(1).maxCoeff();
  const double sx = x1 > x0 ? (size - 2 * margin) / (x1 - x0) : 1.0;
  const double sy = y1 > y0 ? (size - 2 * margin) / (y1 - y0) : 1.0;

  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n"
      << "<rect width=\"600\" height=\"600\" fill=\"#ffffff\"/>\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    const char* colour = kPalette[static_cast<std::size_t>(std::max(label - 1, 0)) % kPalette.size()];
    const double cx = margin + (x(i, 0) - x0) * sx;
    const double cy = size - margin - (x(i, 1) - y0) * sy;
    const double r = 2.0 + 8.0 * uncertainty[static_cast<std::size_t>(i)];
    out << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r << "\" fill=\"" << colour
        << "\" fill-opacity=\"0.7\"/>\n";
  }
  out << "</svg>\n";
  write_file(path, out.str());
}

}  // namespace bmaclust::svg
