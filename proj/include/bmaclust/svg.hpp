#pragma once

#include "bmaclust/types.hpp"

#include <filesystem>
#include <span>
#include <string>

namespace bmaclust::svg {

/// Grayscale level (0..255) for a value in [0,1]: 0 is white, 1 is black.
int gray_level(double v);

/// SVG document with one square per cell in row/column order. When `order`
/// is non-empty it lists the 0-based row (and column) to draw at each
/// position.
std::string heatmap(const Matrix& m, std::span<const Eigen::Index> order = {},
                    const std::string& title = {});

void render_heatmap(const Matrix& m, const std::filesystem::path& path,
                    std::span<const Eigen::Index> order = {}, const std::string& title = {});

/// Order that groups observations by label (stable within a label).
std::vector<Eigen::Index> order_by_label(std::span<const int> labels);

/// Scatter of the first two feature columns, coloured by label, with point
/// radius growing with uncertainty.
void render_scatter(const Matrix& x, std::span<const int> labels, std::span<const double> uncertainty,
                    const std::filesystem::path& path);

}  // namespace bmaclust::svg
