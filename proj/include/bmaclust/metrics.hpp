#pragma once

#include "bmaclust/types.hpp"

#include <span>

namespace bmaclust {

/// Hubert-Arabie adjusted Rand index between two labelings of the same
/// observations. 1 for identical partitions (up to relabelling).
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace bmaclust
