#include <algorithm>
#include <string>

#include "szt/classifiers.hpp"
#include "szt/errors.hpp"

namespace szt {

using nlohmann::json;

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::Sgd: return "sgd";
    case ClassifierKind::Gbt: return "gbt";
  }
  return "knn";
}

ClassifierKind parse_classifier_kind(std::string_view name) {
  if (name == "knn") return ClassifierKind::Knn;
  if (name == "sgd") return ClassifierKind::Sgd;
  if (name == "gbt") return ClassifierKind::Gbt;
  throw UsageError("unknown classifier \"" + std::string(name) + "\" (expected knn, sgd or gbt)");
}

ClassifierKind kind_of(const ModelConfig& config) { return static_cast<ClassifierKind>(config.index()); }
ClassifierKind kind_of(const Model& model) { return static_cast<ClassifierKind>(model.index()); }

std::size_t model_dim(const Model& model) {
  struct {
    std::size_t operator()(const KnnModel& m) const { return m.x.cols(); }
    std::size_t operator()(const LinearModel& m) const { return m.weights.cols(); }
    std::size_t operator()(const GbtModel& m) const { return m.dim; }
  } visitor;
  return std::visit(visitor, model);
}

Model fit_model(const ModelConfig& config, const Dataset& data, std::uint64_t seed, int /*workers*/) {
  struct {
    const Dataset& data;
    std::uint64_t seed;
    Model operator()(const KnnConfig& c) const { return knn_fit(data, c); }
    Model operator()(const SgdConfig& c) const { return sgd_fit(data, c, seed); }
    Model operator()(const GbtConfig& c) const { return gbt_fit(data, c, seed); }
  } visitor{data, seed};
  return std::visit(visitor, config);
}

std::vector<int> predict_labels(const Model& model, const RealMatrix& x, int workers) {
  if (x.rows() == 0) return {};
  if (x.cols() != model_dim(model)) {
    throw DimensionError("predict_labels: input width " + std::to_string(x.cols()) + " != model width " +
                         std::to_string(model_dim(model)));
  }
  struct {
    const RealMatrix& x;
    int workers;
    std::vector<int> operator()(const KnnModel& m) const { return knn_predict(m, x, workers); }
    std::vector<int> operator()(const LinearModel& m) const { return sgd_predict(m, x); }
    std::vector<int> operator()(const GbtModel& m) const { return gbt_predict(m, x); }
  } visitor{x, workers};
  return std::visit(visitor, model);
}

// ---- JSON -------------------------------------------------------------------

namespace {

std::string_view vote_name(Vote v) { return v == Vote::Uniform ? "uniform" : "inverse-distance"; }
Vote parse_vote(const std::string& s) {
  if (s == "uniform") return Vote::Uniform;
  if (s == "inverse-distance") return Vote::InverseDistance;
  throw UsageError("unknown k-NN vote mode \"" + s + "\"");
}
std::string_view schedule_name(LrSchedule s) { return s == LrSchedule::Constant ? "constant" : "inv-scaling"; }
LrSchedule parse_schedule(const std::string& s) {
  if (s == "constant") return LrSchedule::Constant;
  if (s == "inv-scaling") return LrSchedule::InverseScaling;
  throw UsageError("unknown learning-rate schedule \"" + s + "\"");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("classifier parameter \"") + key + "\" has the wrong type");
  }
}

void check_keys(const json& p, std::initializer_list<std::string_view> known) {
  for (auto it = p.begin(); it != p.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw UsageError("unknown classifier parameter \"" + it.key() + "\"");
    }
  }
}

json matrix_json(const RealMatrix& m) { return json(std::vector<double>(m.values().begin(), m.values().end())); }

RealMatrix matrix_from(const json& values, std::size_t rows, std::size_t cols) {
  return RealMatrix(rows, cols, values.get<std::vector<double>>());
}

}  // namespace

json config_to_json(const ModelConfig& config) {
  struct {
    json operator()(const KnnConfig& c) const { return {{"k", c.k}, {"vote", vote_name(c.vote)}}; }
    json operator()(const SgdConfig& c) const {
      return {{"alpha", c.alpha}, {"lr0", c.lr0}, {"schedule", schedule_name(c.schedule)}, {"epochs", c.epochs}};
    }
    json operator()(const GbtConfig& c) const {
      return {{"algorithm", "gbt-exact"},
              {"rounds", c.rounds},
              {"depth", c.max_depth},
              {"eta", c.eta},
              {"min_leaf", c.min_leaf}};
    }
  } visitor;
  return std::visit(visitor, config);
}

ModelConfig config_from_json(ClassifierKind kind, const json& p) {
  if (!p.is_object()) throw UsageError("classifier parameters must be a JSON object");
  switch (kind) {
    case ClassifierKind::Knn: {
      check_keys(p, {"k", "vote"});
      KnnConfig c;
      c.k = get_or(p, "k", c.k);
      c.vote = parse_vote(get_or<std::string>(p, "vote", std::string(vote_name(c.vote))));
      return c;
    }
    case ClassifierKind::Sgd: {
      check_keys(p, {"alpha", "lr0", "schedule", "epochs"});
      SgdConfig c;
      c.alpha = get_or(p, "alpha", c.alpha);
      c.lr0 = get_or(p, "lr0", c.lr0);
      c.schedule = parse_schedule(get_or<std::string>(p, "schedule", std::string(schedule_name(c.schedule))));
      c.epochs = get_or(p, "epochs", c.epochs);
      return c;
    }
    case ClassifierKind::Gbt: {
      check_keys(p, {"algorithm", "rounds", "depth", "eta", "min_leaf"});
      if (get_or<std::string>(p, "algorithm", "gbt-exact") != "gbt-exact") {
        throw UsageError("gbt: only algorithm \"gbt-exact\" is available");
      }
      GbtConfig c;
      c.rounds = get_or(p, "rounds", c.rounds);
      c.max_depth = get_or(p, "depth", c.max_depth);
      c.eta = get_or(p, "eta", c.eta);
      c.min_leaf = get_or(p, "min_leaf", c.min_leaf);
      return c;
    }
  }
  throw UsageError("unknown classifier kind");
}

json model_to_json(const Model& model) {
  struct {
    json operator()(const KnnModel& m) const {
      return {{"kind", "knn"},
              {"params", config_to_json(m.config)},
              {"rows", m.x.rows()},
              {"dim", m.x.cols()},
              {"x", matrix_json(m.x)},
              {"y", m.y}};
    }
    json operator()(const LinearModel& m) const {
      return {{"kind", "sgd"},
              {"params", config_to_json(m.config)},
              {"seed", m.seed},
              {"dim", m.weights.cols()},
              {"weights", matrix_json(m.weights)},
              {"bias", m.bias},
              {"epoch_loss", m.epoch_loss}};
    }
    json operator()(const GbtModel& m) const {
      json rounds = json::array();
      for (const auto& trees : m.rounds) {
        json per_class = json::array();
        for (const auto& t : trees) {
          json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
               value = json::array();
          for (const auto& n : t.nodes) {
            feature.push_back(n.feature);
            threshold.push_back(n.threshold);
            left.push_back(n.left);
            right.push_back(n.right);
            value.push_back(n.value);
          }
          per_class.push_back(
              {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}});
        }
        rounds.push_back(per_class);
      }
      return {{"kind", "gbt"},     {"params", config_to_json(m.config)}, {"dim", m.dim},
              {"prior", m.prior}, {"rounds", rounds},                    {"train_loss", m.train_loss}};
    }
  } visitor;
  return std::visit(visitor, model);
}

Model model_from_json(const json& doc) {
  try {
    const ClassifierKind kind = parse_classifier_kind(doc.at("kind").get<std::string>());
    const ModelConfig config = config_from_json(kind, doc.at("params"));
    const auto dim = doc.at("dim").get<std::size_t>();
    switch (kind) {
      case ClassifierKind::Knn: {
        KnnModel m;
        m.config = std::get<KnnConfig>(config);
        m.x = matrix_from(doc.at("x"), doc.at("rows").get<std::size_t>(), dim);
        m.y = doc.at("y").get<std::vector<int>>();
        return m;
      }
      case ClassifierKind::Sgd: {
        LinearModel m;
        m.config = std::get<SgdConfig>(config);
        m.seed = doc.at("seed").get<std::uint64_t>();
        m.weights = matrix_from(doc.at("weights"), kNumClasses, dim);
        m.bias = doc.at("bias").get<std::array<double, kNumClasses>>();
        m.epoch_loss = doc.value("epoch_loss", std::vector<double>{});
        return m;
      }
      case ClassifierKind::Gbt: {
        GbtModel m;
        m.config = std::get<GbtConfig>(config);
        m.dim = dim;
        m.prior = doc.at("prior").get<std::array<double, kNumClasses>>();
        for (const auto& r : doc.at("rounds")) {
          std::array<RegressionTree, kNumClasses> trees;
          if (r.size() != kNumClasses) throw DataError("model JSON: round must hold one tree per class");
          for (int c = 0; c < kNumClasses; ++c) {
            const auto& t = r.at(static_cast<std::size_t>(c));
            const auto feature = t.at("feature").get<std::vector<int>>();
            const auto threshold = t.at("threshold").get<std::vector<double>>();
            const auto left = t.at("left").get<std::vector<int>>();
            const auto right = t.at("right").get<std::vector<int>>();
            const auto value = t.at("value").get<std::vector<double>>();
            const std::size_t n = feature.size();
            for (std::size_t i = 0; i < n; ++i) {
              if (feature[i] >= static_cast<int>(dim)) throw DataError("model JSON: split feature out of range");
              const bool internal = feature[i] >= 0;
              if (internal && (left[i] <= 0 || right[i] <= 0 || static_cast<std::size_t>(left[i]) >= n ||
                               static_cast<std::size_t>(right[i]) >= n)) {
                throw DataError("model JSON: bad child index");
              }
              trees[c].nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i]});
            }
          }
          m.rounds.push_back(std::move(trees));
        }
        m.train_loss = doc.value("train_loss", std::vector<double>{});
        return m;
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("model JSON: ") + e.what());
  }
  throw DataError("model JSON: unknown kind");
}

}  // namespace szt
