#include <cmath>

#include "szt/errors.hpp"
#include "szt/hpo.hpp"

namespace szt {

Dimension Dimension::integer(std::string name, int lo, int hi) {
  Dimension d;
  d.name = std::move(name);
  d.kind = Kind::Integer;
  d.lo = lo;
  d.hi = hi;
  return d;
}

Dimension Dimension::real(std::string name, double lo, double hi, bool log_scale) {
  Dimension d;
  d.name = std::move(name);
  d.kind = Kind::Real;
  d.lo = lo;
  d.hi = hi;
  d.log_scale = log_scale;
  return d;
}

Dimension Dimension::categorical(std::string name, std::vector<std::string> values) {
  Dimension d;
  d.name = std::move(name);
  d.kind = Kind::Categorical;
  d.categories = std::move(values);
  return d;
}

void SearchSpace::validate() const {
  for (const auto& d : dims) {
    switch (d.kind) {
      case Dimension::Kind::Categorical:
        if (d.categories.empty()) throw UsageError("search space: categorical \"" + d.name + "\" is empty");
        break;
      case Dimension::Kind::Integer:
      case Dimension::Kind::Real:
        if (!(d.hi >= d.lo)) throw UsageError("search space: range \"" + d.name + "\" is empty");
        if (d.log_scale && !(d.lo > 0.0)) throw UsageError("search space: log range \"" + d.name + "\" must be > 0");
        break;
    }
  }
}

nlohmann::json SearchSpace::sample(Rng& rng) const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& d : dims) {
    switch (d.kind) {
      case Dimension::Kind::Integer: {
        const auto lo = static_cast<std::int64_t>(d.lo);
        const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(d.hi) - lo + 1);
        out[d.name] = lo + static_cast<std::int64_t>(rng.below(span));
        break;
      }
      case Dimension::Kind::Real:
        out[d.name] = d.log_scale ? std::exp(rng.uniform(std::log(d.lo), std::log(d.hi))) : rng.uniform(d.lo, d.hi);
        break;
      case Dimension::Kind::Categorical:
        out[d.name] = d.categories[rng.below(d.categories.size())];
        break;
    }
  }
  return out;
}

SearchSpace default_space(ClassifierKind kind) {
  SearchSpace s;
  switch (kind) {
    case ClassifierKind::Knn:
      s.dims = {Dimension::integer("k", 1, 30), Dimension::categorical("vote", {"uniform", "inverse-distance"})};
      break;
    case ClassifierKind::Sgd:
      s.dims = {Dimension::real("alpha", 1e-7, 1e-1, true), Dimension::real("lr0", 1e-4, 1.0, true),
                Dimension::categorical("schedule", {"constant", "inv-scaling"}), Dimension::integer("epochs", 5, 50)};
      break;
    case ClassifierKind::Gbt:
      s.dims = {Dimension::integer("rounds", 20, 300), Dimension::integer("depth", 2, 8),
                Dimension::real("eta", 0.01, 0.5, true), Dimension::integer("min_leaf", 1, 20)};
      break;
  }
  return s;
}

nlohmann::json sample_trial_config(const SearchSpace& space, std::uint64_t seed, std::size_t index) {
  Rng rng(mix_seed(seed, index));
  return space.sample(rng);
}

}  // namespace szt
