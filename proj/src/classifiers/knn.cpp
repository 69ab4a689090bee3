#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

#include "szt/classifiers.hpp"
#include "szt/errors.hpp"
#include "szt/kernels.hpp"

namespace szt {

KnnModel knn_fit(const Dataset& data, const KnnConfig& config) {
  data.validate();
  if (data.rows() == 0) throw DataError("knn_fit: empty training set");
  if (config.k < 1) throw UsageError("knn_fit: k must be >= 1");
  if (static_cast<std::size_t>(config.k) > data.rows()) {
    throw UsageError("knn_fit: k = " + std::to_string(config.k) + " exceeds " + std::to_string(data.rows()) +
                     " training rows");
  }
  return KnnModel{config, data.x, data.y};
}

namespace {

struct Neighbor {
  double dist2;
  std::size_t index;
  bool operator<(const Neighbor& o) const { return dist2 < o.dist2 || (dist2 == o.dist2 && index < o.index); }
};

int vote(const KnnModel& model, std::span<const Neighbor> nn) {
  std::array<double, kNumClasses> score{};
  const bool inverse = model.config.vote == Vote::InverseDistance;
  if (inverse && nn.front().dist2 == 0.0) {
    // Exact matches dominate any finite inverse-distance weight.
    for (const auto& n : nn) {
      if (n.dist2 == 0.0) score[model.y[n.index]] += 1.0;
    }
  } else {
    for (const auto& n : nn) score[model.y[n.index]] += inverse ? 1.0 / std::sqrt(n.dist2) : 1.0;
  }
  const double best = *std::max_element(score.begin(), score.end());
  std::array<bool, kNumClasses> tied{};
  int n_tied = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    tied[c] = score[c] == best;
    n_tied += tied[c] ? 1 : 0;
  }
  if (n_tied == 1) return static_cast<int>(std::max_element(score.begin(), score.end()) - score.begin());
  // Nearest neighbour among tied classes; equal distances go to the lowest id.
  double nearest = -1.0;
  int choice = kNumClasses;
  for (const auto& n : nn) {
    const int c = model.y[n.index];
    if (!tied[c]) continue;
    if (nearest < 0.0) nearest = n.dist2;
    if (n.dist2 != nearest) break;
    choice = std::min(choice, c);
  }
  return choice;
}

}  // namespace

std::vector<int> knn_predict(const KnnModel& model, const RealMatrix& x, int workers) {
  if (x.rows() == 0) return {};
  if (x.cols() != model.x.cols()) {
    throw DimensionError("knn_predict: query width " + std::to_string(x.cols()) + " != training width " +
                         std::to_string(model.x.cols()));
  }
  const std::size_t n_train = model.x.rows();
  const auto k = static_cast<std::size_t>(model.config.k);
  std::vector<int> out(x.rows());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::vector<Neighbor> all(n_train);
    for (std::size_t q = next++; q < x.rows(); q = next++) {
      const auto query = x.row(q);
      for (std::size_t i = 0; i < n_train; ++i) all[i] = {kernels::squared_distance(query, model.x.row(i)), i};
      std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
      out[q] = vote(model, std::span<const Neighbor>(all.data(), k));
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, workers));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(n_workers, x.rows()); ++t) pool.emplace_back(worker);
  }
  return out;
}

}  // namespace szt
