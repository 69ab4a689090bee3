#include <algorithm>
#include <cmath>
#include <numeric>

#include "szt/classifiers.hpp"
#include "szt/errors.hpp"
#include "szt/log.hpp"

namespace szt {

double RegressionTree::predict(std::span<const double> x) const {
  int i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& n = nodes[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[i].value;
}

namespace {

// Feature columns presorted once per fit; trees are grown level by level so
// every level costs one pass over each sorted column.
class TreeBuilder {
 public:
  TreeBuilder(const RealMatrix& x, const GbtConfig& config) : x_(x), config_(config) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    inverse_.resize(n + 1);
    for (std::size_t k = 1; k <= n; ++k) inverse_[k] = 1.0 / static_cast<double>(k);
    sorted_.resize(d * n);
    sorted_values_.resize(d * n);
    for (std::size_t f = 0; f < d; ++f) {
      auto* col = sorted_.data() + f * n;
      std::iota(col, col + n, std::uint32_t{0});
      std::stable_sort(col, col + n, [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
      for (std::size_t k = 0; k < n; ++k) sorted_values_[f * n + k] = x(col[k], f);
    }
  }

  // Fits one tree to the residuals; fitted receives each sample's leaf value.
  RegressionTree build(std::span<const double> residual, std::span<double> fitted) {
    const std::size_t n = x_.rows();
    const std::size_t d = x_.cols();
    RegressionTree tree;
    tree.nodes.push_back({});
    node_of_.assign(n, 0);
    packed_.resize(n);

    std::vector<int> frontier = {0};
    std::vector<double> sums = {std::accumulate(residual.begin(), residual.end(), 0.0)};
    std::vector<std::size_t> counts = {n};

    for (int depth = 0; depth < config_.max_depth && !frontier.empty(); ++depth) {
      const std::size_t m = frontier.size();
      // frontier slot of each tree node, -1 when not on the frontier
      std::vector<int> slot(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < m; ++s) slot[frontier[s]] = static_cast<int>(s);
      for (std::size_t i = 0; i < n; ++i) packed_[i] = {slot[node_of_[i]], residual[i]};

      // A split must beat the parent's own sum^2 / count to reduce squared error.
      std::vector<double> best_score(m);
      for (std::size_t s = 0; s < m; ++s) best_score[s] = sums[s] * sums[s] * inverse_[counts[s]];
      std::vector<int> best_feature(m, -1);
      std::vector<double> best_threshold(m, 0.0);
      std::vector<double> left_sum(m);
      std::vector<std::size_t> left_count(m);
      std::vector<double> last_value(m);

      for (std::size_t f = 0; f < d; ++f) {
        std::fill(left_sum.begin(), left_sum.end(), 0.0);
        std::fill(left_count.begin(), left_count.end(), 0);
        const auto* col = sorted_.data() + f * n;
        const auto* vals = sorted_values_.data() + f * n;
        for (std::size_t k = 0; k < n; ++k) {
          const SlotResidual sr = packed_[col[k]];
          const int s = sr.slot;
          if (s < 0) continue;
          const double v = vals[k];
          const std::size_t nl = left_count[s];
          if (nl > 0 && v > last_value[s]) {
            const std::size_t nr = counts[s] - nl;
            if (nl >= static_cast<std::size_t>(config_.min_leaf) && nr >= static_cast<std::size_t>(config_.min_leaf)) {
              const double sl = left_sum[s];
              const double sr = sums[s] - sl;
              const double score = sl * sl * inverse_[nl] + sr * sr * inverse_[nr];
              if (score > best_score[s]) {
                best_score[s] = score;
                best_feature[s] = static_cast<int>(f);
                double thr = 0.5 * (last_value[s] + v);
                if (!(thr < v)) thr = last_value[s];
                best_threshold[s] = thr;
              }
            }
          }
          left_sum[s] += sr.residual;
          ++left_count[s];
          last_value[s] = v;
        }
      }

      std::vector<int> next_frontier;
      std::vector<double> next_sums;
      std::vector<std::size_t> next_counts;
      std::vector<int> split_left(m, -1);
      for (std::size_t s = 0; s < m; ++s) {
        if (best_feature[s] < 0) continue;
        const int id = frontier[s];
        const int l = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes.push_back({});
        tree.nodes[id].feature = best_feature[s];
        tree.nodes[id].threshold = best_threshold[s];
        tree.nodes[id].left = l;
        tree.nodes[id].right = l + 1;
        split_left[s] = l;
        next_frontier.push_back(l);
        next_frontier.push_back(l + 1);
        next_sums.push_back(0.0);
        next_sums.push_back(0.0);
        next_counts.push_back(0);
        next_counts.push_back(0);
      }
      if (next_frontier.empty()) break;
      std::vector<int> child_slot(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < next_frontier.size(); ++s) child_slot[next_frontier[s]] = static_cast<int>(s);
      for (std::size_t i = 0; i < n; ++i) {
        const int node = node_of_[i];
        const int s = slot[node];
        if (s < 0 || split_left[s] < 0) continue;
        const TreeNode& parent = tree.nodes[node];
        const int child = x_(i, parent.feature) <= parent.threshold ? parent.left : parent.right;
        node_of_[i] = child;
        const int cs = child_slot[child];
        next_sums[cs] += residual[i];
        ++next_counts[cs];
      }
      frontier = std::move(next_frontier);
      sums = std::move(next_sums);
      counts = std::move(next_counts);
    }

    // Leaf values are mean residuals of the samples that reached them.
    std::vector<double> leaf_sum(tree.nodes.size(), 0.0);
    std::vector<std::size_t> leaf_count(tree.nodes.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      leaf_sum[node_of_[i]] += residual[i];
      ++leaf_count[node_of_[i]];
    }
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      if (tree.nodes[id].feature < 0 && leaf_count[id] > 0) {
        tree.nodes[id].value = leaf_sum[id] / static_cast<double>(leaf_count[id]);
      }
    }
    for (std::size_t i = 0; i < n; ++i) fitted[i] = tree.nodes[node_of_[i]].value;
    return tree;
  }

 private:
  const RealMatrix& x_;
  const GbtConfig& config_;
  std::vector<std::uint32_t> sorted_;
  std::vector<double> sorted_values_;
  std::vector<double> inverse_;  // 1 / k
  std::vector<int> node_of_;
  // Frontier slot and residual side by side so the column scan touches one cache line per sample.
  struct SlotResidual {
    int slot;
    double residual;
  };
  std::vector<SlotResidual> packed_;
};

double mean_log_loss(const RealMatrix& scores, std::span<const int> y) {
  double loss = 0.0;
  std::array<double, kNumClasses> p{};
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::copy(scores.row(i).begin(), scores.row(i).end(), p.begin());
    softmax_inplace(p);
    loss -= std::log(std::max(p[y[i]], 1e-300));
  }
  return loss / static_cast<double>(scores.rows());
}

}  // namespace

GbtModel gbt_fit(const Dataset& data, const GbtConfig& config, std::uint64_t /*seed*/) {
  data.validate();
  if (data.rows() == 0) throw DataError("gbt_fit: empty training set");
  if (config.rounds < 1) throw UsageError("gbt_fit: rounds must be >= 1");
  if (config.max_depth < 0) throw UsageError("gbt_fit: max depth must be >= 0");
  if (config.min_leaf < 1) throw UsageError("gbt_fit: min leaf must be >= 1");
  if (config.eta < 0.0) throw UsageError("gbt_fit: learning rate must be >= 0");

  const std::size_t n = data.rows();
  GbtModel model;
  model.config = config;
  model.dim = data.dim();

  std::array<std::size_t, kNumClasses> counts{};
  for (int label : data.y) ++counts[label];
  if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) == 1) {
    log::warn("gbt_single_class_training_set", {{"rows", n}});
  }
  for (int c = 0; c < kNumClasses; ++c) {
    model.prior[c] = std::log(std::max(static_cast<double>(counts[c]) / static_cast<double>(n), 1e-12));
  }

  RealMatrix scores(n, kNumClasses);
  for (std::size_t i = 0; i < n; ++i) std::copy(model.prior.begin(), model.prior.end(), scores.row(i).begin());

  TreeBuilder builder(data.x, config);
  std::vector<double> residual(n);
  std::vector<double> fitted(n);
  RealMatrix probs(n, kNumClasses);
  model.rounds.reserve(static_cast<std::size_t>(config.rounds));
  for (int round = 0; round < config.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(scores.row(i).begin(), scores.row(i).end(), probs.row(i).begin());
      softmax_inplace(probs.row(i));
    }
    std::array<RegressionTree, kNumClasses> trees;
    for (int c = 0; c < kNumClasses; ++c) {
      for (std::size_t i = 0; i < n; ++i) residual[i] = (data.y[i] == c ? 1.0 : 0.0) - probs(i, c);
      trees[c] = builder.build(residual, fitted);
      for (std::size_t i = 0; i < n; ++i) scores(i, c) += config.eta * fitted[i];
    }
    model.rounds.push_back(std::move(trees));
    model.train_loss.push_back(mean_log_loss(scores, data.y));
  }
  return model;
}

namespace {

void gbt_scores(const GbtModel& model, std::span<const double> x, std::span<double> out) {
  std::copy(model.prior.begin(), model.prior.end(), out.begin());
  for (const auto& trees : model.rounds) {
    for (int c = 0; c < kNumClasses; ++c) out[c] += model.config.eta * trees[c].predict(x);
  }
}

}  // namespace

RealMatrix gbt_probabilities(const GbtModel& model, const RealMatrix& x) {
  if (x.rows() > 0 && x.cols() != model.dim) throw DimensionError("gbt_predict: feature width mismatch");
  RealMatrix out(x.rows(), kNumClasses);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    gbt_scores(model, x.row(i), out.row(i));
    softmax_inplace(out.row(i));
  }
  return out;
}

std::vector<int> gbt_predict(const GbtModel& model, const RealMatrix& x) {
  if (x.rows() > 0 && x.cols() != model.dim) throw DimensionError("gbt_predict: feature width mismatch");
  std::vector<int> out(x.rows());
  std::array<double, kNumClasses> s{};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    gbt_scores(model, x.row(i), s);
    out[i] = static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
  }
  return out;
}

}  // namespace szt
