#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "szt/errors.hpp"
#include "szt/hpo.hpp"

namespace szt {

SearchResult random_search(const SearchSpace& space, const Objective& objective, std::size_t budget,
                           std::uint64_t seed, int workers) {
  if (budget < 1) throw UsageError("random_search: budget must be >= 1");
  space.validate();

  SearchResult result;
  result.budget = budget;
  result.seed = seed;
  result.trials.resize(budget);
  for (std::size_t i = 0; i < budget; ++i) {
    result.trials[i].index = i;
    result.trials[i].config = sample_trial_config(space, seed, i);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < budget; i = next++) {
      Trial& t = result.trials[i];
      const auto start = std::chrono::steady_clock::now();
      try {
        t.objective = objective(t.config);
        if (!std::isfinite(t.objective)) {
          t.status = TrialStatus::Failed;
          t.error = "objective is not finite";
        }
      } catch (const std::exception& e) {
        t.status = TrialStatus::Failed;
        t.error = e.what();
      }
      t.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, workers));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(n_workers, budget); ++w) pool.emplace_back(worker);
  }

  bool found = false;
  for (const Trial& t : result.trials) {
    if (t.status != TrialStatus::Ok) continue;
    if (!found || t.objective > result.trials[result.best_index].objective) {
      result.best_index = t.index;
      found = true;
    }
  }
  if (!found) {
    throw NumericError("random_search: all " + std::to_string(budget) + " trials failed; first error: " +
                       result.trials.front().error);
  }
  return result;
}

std::string trial_log_jsonl(const SearchResult& result) {
  std::string out;
  for (const Trial& t : result.trials) {
    nlohmann::json line = {{"index", t.index},
                           {"config", t.config},
                           {"objective", t.status == TrialStatus::Ok ? nlohmann::json(t.objective) : nlohmann::json()},
                           {"status", t.status == TrialStatus::Ok ? "ok" : "failed"},
                           {"duration_s", t.duration_s},
                           {"sampler", result.sampler}};
    if (t.status == TrialStatus::Failed) line["error"] = t.error;
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace szt
