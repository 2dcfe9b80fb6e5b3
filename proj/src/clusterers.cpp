#include "bmaclust/clusterers.hpp"

#include "bmaclust/core_model.hpp"
#include "bmaclust/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bmaclust {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void check_k(const FeatureMatrix& x, int k, const char* who) {
  if (k < 1) throw BmaError(ErrorCode::InvalidK, std::string(who) + ": k must be >= 1");
  if (k > x.n()) {
    throw BmaError(ErrorCode::KTooLarge, std::string(who) + ": k=" + std::to_string(k) +
                                             " exceeds N=" + std::to_string(x.n()));
  }
}

// k-means++ seeding: first centre uniform, then proportional to squared
// distance from the nearest chosen centre.
Matrix kmeanspp(const Matrix& v, int k, Rng& rng) {
  const Eigen::Index n = v.rows();
  Matrix centres(k, v.cols());
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);

  auto pick_unchosen = [&](double u) {
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) if (!chosen[static_cast<std::size_t>(i)]) free.push_back(i);
    if (free.empty()) return static_cast<Eigen::Index>(0);
    const auto slot = std::min(free.size() - 1, static_cast<std::size_t>(u * static_cast<double>(free.size())));
    return free[slot];
  };

  Eigen::Index first = pick_unchosen(uniform01(rng));
  for (int c = 0; c < k; ++c) {
    Eigen::Index pick = first;
    if (c > 0) {
      double total = 0.0;
      for (double v2 : d2) total += v2;
      const double u = uniform01(rng);
      if (total > 0.0) {
        double target = u * total;
        pick = n - 1;
        for (Eigen::Index i = 0; i < n; ++i) {
          target -= d2[static_cast<std::size_t>(i)];
          if (target < 0.0 && d2[static_cast<std::size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = pick_unchosen(u);
      }
    }
    chosen[static_cast<std::size_t>(pick)] = 1;
    centres.row(c) = v.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], (v.row(i) - centres.row(c)).squaredNorm());
    }
  }
  return centres;
}

// Nearest centre for every row (ties to the lowest index); returns the cost
// sum_i d^2(x_i, centre of i).
double assign(const Matrix& v, const Matrix& centres, std::vector<int>& labels) {
  const Eigen::Index n = v.rows();
  std::vector<double> cost(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static) if (n > 4096)
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (v.row(i) - centres.row(0)).squaredNorm();
    for (Eigen::Index c = 1; c < centres.rows(); ++c) {
      const double d = (v.row(i) - centres.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    cost[static_cast<std::size_t>(i)] = best_d;
  }
  return std::accumulate(cost.begin(), cost.end(), 0.0);
}

void update_centres(const Matrix& v, std::vector<int>& labels, Matrix& centres) {
  const Eigen::Index k = centres.rows();
  const Eigen::Index n = v.rows();
  Matrix sums = Matrix::Zero(k, v.cols());
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    sums.row(labels[static_cast<std::size_t>(i)]) += v.row(i);
    ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) {
      centres.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
  }
  // Empty clusters take the point farthest from its own centre.
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) continue;
    Eigen::Index far = -1;
    double far_d = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int own = labels[static_cast<std::size_t>(i)];
      if (counts[static_cast<std::size_t>(own)] < 2) continue;
      const double d = (v.row(i) - centres.row(own)).squaredNorm();
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far < 0) continue;
    --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
    labels[static_cast<std::size_t>(far)] = static_cast<int>(c);
    counts[static_cast<std::size_t>(c)] = 1;
    centres.row(c) = v.row(far);
  }
}

}  // namespace

KMeansFit kmeans_fit(const FeatureMatrix& x, int k, std::uint64_t seed, const KMeansOptions& opts) {
  check_k(x, k, "kmeans");
  const Matrix& v = x.values();
  const Eigen::Index n = x.n();

  KMeansFit best;
  best.within_ss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Matrix centres = kmeanspp(v, k, rng);
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    std::vector<double> trace{assign(v, centres, labels)};
    for (int it = 0; it < opts.max_iter; ++it) {
      const std::vector<int> before = labels;
      update_centres(v, labels, centres);
      trace.push_back(assign(v, centres, labels));
      if (labels == before) break;
    }
    update_centres(v, labels, centres);
    double wss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      wss += (v.row(i) - centres.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
    }
    if (wss < best.within_ss) {
      best.within_ss = wss;
      best.centroids = centres;
      best.ss_trace = std::move(trace);
      best.best_restart = r;
      best.labels.resize(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        best.labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(i)] + 1;
      }
    }
  }
  return best;
}

AllocationMatrix kmeans(const FeatureMatrix& x, int k, std::uint64_t seed, const std::string& model_id) {
  return allocation_from_labels(kmeans_fit(x, k, seed).labels, model_id);
}

std::vector<Merge> ward_tree(const FeatureMatrix& x) {
  const Eigen::Index n = x.n();
  Matrix d2(n, n);
  {
    const Matrix& v = x.values();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) d2(i, j) = (v.row(i) - v.row(j)).squaredNorm();
    }
  }
  std::vector<double> size(static_cast<std::size_t>(n), 1.0);
  std::vector<char> active(static_cast<std::size_t>(n), 1);
  std::vector<Merge> merges;
  merges.reserve(static_cast<std::size_t>(n - 1));

  // Cached nearest active neighbour with a larger index, per row.
  std::vector<Eigen::Index> nn(static_cast<std::size_t>(n), -1);
  auto refresh = [&](Eigen::Index i) {
    Eigen::Index best = -1;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!active[static_cast<std::size_t>(j)]) continue;
      if (best < 0 || d2(i, j) < d2(i, best)) best = j;
    }
    nn[static_cast<std::size_t>(i)] = best;
  };
  for (Eigen::Index i = 0; i < n; ++i) refresh(i);

  for (Eigen::Index step = 0; step + 1 < n; ++step) {
    Eigen::Index bi = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index j = nn[static_cast<std::size_t>(i)];
      if (!active[static_cast<std::size_t>(i)] || j < 0) continue;
      if (bi < 0 || d2(i, j) < d2(bi, nn[static_cast<std::size_t>(bi)])) bi = i;
    }
    const Eigen::Index bj = nn[static_cast<std::size_t>(bi)];
    const double dij = d2(bi, bj);
    merges.push_back({static_cast<int>(bi), static_cast<int>(bj), std::sqrt(std::max(dij, 0.0))});

    const double ni = size[static_cast<std::size_t>(bi)];
    const double nj = size[static_cast<std::size_t>(bj)];
    active[static_cast<std::size_t>(bj)] = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!active[static_cast<std::size_t>(k)] || k == bi) continue;
      const double nk = size[static_cast<std::size_t>(k)];
      const double updated = ((ni + nk) * d2(bi, k) + (nj + nk) * d2(bj, k) - nk * dij) / (ni + nj + nk);
      d2(bi, k) = updated;
      d2(k, bi) = updated;
    }
    size[static_cast<std::size_t>(bi)] = ni + nj;

    // Rows whose cached neighbour changed or whose distance to bi changed.
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      const Eigen::Index j = nn[static_cast<std::size_t>(i)];
      if (i == bi || j == bi || j == bj || i < bi) refresh(i);
    }
  }
  return merges;
}

Labels cut_tree(const std::vector<Merge>& merges, Eigen::Index n, int k) {
  if (k < 1 || k > n) {
    throw BmaError(ErrorCode::KTooLarge, "cut_tree: k=" + std::to_string(k) + " outside [1, " +
                                             std::to_string(n) + "]");
  }
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  };
  const std::size_t steps = static_cast<std::size_t>(n - k);
  for (std::size_t s = 0; s < steps && s < merges.size(); ++s) {
    const Eigen::Index ra = find(merges[s].a);
    const Eigen::Index rb = find(merges[s].b);
    parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
  }
  Labels labels(static_cast<std::size_t>(n));
  std::vector<int> root_label(static_cast<std::size_t>(n), 0);
  int next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index r = find(i);
    int& l = root_label[static_cast<std::size_t>(r)];
    if (l == 0) l = ++next;
    labels[static_cast<std::size_t>(i)] = l;
  }
  return labels;
}

AllocationMatrix ward_hclust(const FeatureMatrix& x, int k, const std::string& model_id) {
  check_k(x, k, "ward_hclust");
  return allocation_from_labels(cut_tree(ward_tree(x), x.n(), k), model_id);
}

int gmm_parameter_count(int k, Eigen::Index d) {
  return k * static_cast<int>(2 * d) + (k - 1);
}

double bic_score(double loglik, int kappa, Eigen::Index n) {
  return 2.0 * loglik - static_cast<double>(kappa) * std::log(static_cast<double>(n));
}

AllocationMatrix GmmFit::allocation(const std::string& model_id) const {
  return validate_allocation(responsibilities, model_id);
}

GmmFit gmm_diag(const FeatureMatrix& x, int k, std::uint64_t seed, const GmmOptions& opts) {
  check_k(x, k, "gmm_diag");
  if (k >= x.n()) {
    throw BmaError(ErrorCode::KTooLarge, "gmm_diag: needs N > k (N=" + std::to_string(x.n()) +
                                             ", k=" + std::to_string(k) + ")");
  }
  const Matrix& v = x.values();
  const Eigen::Index n = x.n();
  const Eigen::Index d = x.d();

  const Eigen::RowVectorXd col_mean = v.colwise().mean();
  Eigen::RowVectorXd col_var = (v.rowwise() - col_mean).array().square().colwise().sum() /
                               static_cast<double>(n);
  const double max_var = col_var.maxCoeff();
  if (!(max_var > 0.0)) {
    throw BmaError(ErrorCode::DegenerateData, "gmm_diag: every feature has zero variance");
  }
  Eigen::RowVectorXd floor(d);
  for (Eigen::Index c = 0; c < d; ++c) {
    floor(c) = opts.variance_floor_scale * (col_var(c) > 0.0 ? col_var(c) : max_var);
  }

  GmmFit fit;
  fit.n = n;
  fit.kappa = gmm_parameter_count(k, d);
  fit.means = Matrix::Zero(k, d);
  fit.variances = Matrix::Zero(k, d);
  fit.mixing = Vector::Zero(k);
  fit.responsibilities = Matrix::Zero(n, k);

  // Hard start from k-means.
  {
    const KMeansFit km = kmeans_fit(x, k, seed);
    std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = km.labels[static_cast<std::size_t>(i)] - 1;
      counts[static_cast<std::size_t>(c)] += 1.0;
      fit.means.row(c) += v.row(i);
    }
    for (int c = 0; c < k; ++c) {
      const double nc = std::max(counts[static_cast<std::size_t>(c)], 1.0);
      fit.means.row(c) /= nc;
      fit.mixing(c) = counts[static_cast<std::size_t>(c)] / static_cast<double>(n);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = km.labels[static_cast<std::size_t>(i)] - 1;
      fit.variances.row(c).array() += (v.row(i) - fit.means.row(c)).array().square();
    }
    for (int c = 0; c < k; ++c) {
      const double nc = std::max(counts[static_cast<std::size_t>(c)], 1.0);
      fit.variances.row(c) = (fit.variances.row(c) / nc).cwiseMax(floor);
    }
  }

  std::vector<double> row_ll(static_cast<std::size_t>(n));
  auto e_step = [&]() {
    Matrix log_var = fit.variances.array().log().matrix();
    Vector log_norm(k);
    Vector log_mix(k);
    for (int c = 0; c < k; ++c) {
      log_norm(c) = -0.5 * (static_cast<double>(d) * kLog2Pi + log_var.row(c).sum());
      log_mix(c) = fit.mixing(c) > 0.0 ? std::log(fit.mixing(c))
                                       : -std::numeric_limits<double>::infinity();
    }
#pragma omp parallel for schedule(static) if (n > 4096)
    for (Eigen::Index i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double maha =
            ((v.row(i) - fit.means.row(c)).array().square() / fit.variances.row(c).array()).sum();
        const double lp = log_mix(c) + log_norm(c) - 0.5 * maha;
        fit.responsibilities(i, c) = lp;
        mx = std::max(mx, lp);
      }
      double s = 0.0;
      for (int c = 0; c < k; ++c) s += std::exp(fit.responsibilities(i, c) - mx);
      const double lse = mx + std::log(s);
      for (int c = 0; c < k; ++c) {
        fit.responsibilities(i, c) = std::exp(fit.responsibilities(i, c) - lse);
      }
      row_ll[static_cast<std::size_t>(i)] = lse;
    }
    return std::accumulate(row_ll.begin(), row_ll.end(), 0.0);
  };

  auto m_step = [&]() {
    for (int c = 0; c < k; ++c) {
      const double nc = fit.responsibilities.col(c).sum();
      fit.mixing(c) = nc / static_cast<double>(n);
      if (!(nc > 0.0)) continue;  // dead component keeps its parameters
      Eigen::RowVectorXd mean = (fit.responsibilities.col(c).transpose() * v) / nc;
      Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(d);
      for (Eigen::Index i = 0; i < n; ++i) {
        var.array() += fit.responsibilities(i, c) * (v.row(i) - mean).array().square();
      }
      fit.means.row(c) = mean;
      fit.variances.row(c) = (var / nc).cwiseMax(floor);
    }
    fit.mixing /= fit.mixing.sum();
  };

  const int max_iter = std::max(1, opts.max_iter);
  for (int it = 0; it < max_iter; ++it) {
    const double ll = e_step();
    fit.loglik_trace.push_back(ll);
    fit.loglik = ll;
    if (it > 0 && std::abs(ll - fit.loglik_trace[fit.loglik_trace.size() - 2]) < opts.tol) {
      fit.converged = true;
      break;
    }
    if (it + 1 == max_iter) break;
    m_step();
  }
  fit.bic = bic_score(fit.loglik, fit.kappa, n);
  return fit;
}

}  // namespace bmaclust
