#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "ontorel/backend.hpp"
#include "ontorel/gold.hpp"
#include "ontorel/strategy.hpp"

namespace ontorel {

struct RunProgress {
    std::size_t done = 0;
    std::size_t total = 0;
    std::size_t invalid = 0;
};

/// Outcome of a (possibly aborted) run. `completed` holds predictions in
/// gold-record order with the holes of unfinished pairs removed, and
/// `completed_gold` the matching gold records; `error` is the first failure,
/// if any. Exchanges already performed live on in the store, so a re-run
/// resumes from the cache.
struct RunResult {
    std::vector<PairPrediction> completed;
    std::vector<GoldRecord> completed_gold;
    std::exception_ptr error;

    void rethrow_if_failed() const {
        if (error) std::rethrow_exception(error);
    }
};

/// Drives the strategy over all gold pairs with a bounded worker pool. Pairs
/// are independent; results land at their gold index, so the output order is
/// the dataset order no matter how threads interleave. On the first failure
/// the remaining pairs are abandoned (finished ones are kept).
inline RunResult run_pairs(const GoldDataset& gold, StrategyKind strategy, Backend& backend,
                           const PromptSet& prompts, const ParsePolicy& policy,
                           unsigned workers = 0,
                           const std::function<void(const RunProgress&)>& on_progress = {}) {
    const std::size_t total = gold.records.size();
    if (workers == 0)
        workers = static_cast<unsigned>(std::max(1, backend.config().max_in_flight));
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(total, 1)));

    std::vector<std::optional<PairPrediction>> slots(total);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex state_mutex;
    RunProgress progress{0, total, 0};
    std::exception_ptr first_error;

    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= total || abort.load()) return;
            try {
                PairPrediction p =
                    run_pair(gold.records[i].pair, strategy, backend, prompts, policy);
                std::lock_guard lock(state_mutex);
                progress.done++;
                if (!p.final.is_valid()) progress.invalid++;
                slots[i] = std::move(p);
                if (on_progress) on_progress(progress);
            } catch (...) {
                std::lock_guard lock(state_mutex);
                if (!first_error) first_error = std::current_exception();
                abort.store(true);
                return;
            }
        }
    };

    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    RunResult result;
    result.error = first_error;
    for (std::size_t i = 0; i < total; ++i) {
        if (!slots[i]) continue;
        result.completed.push_back(std::move(*slots[i]));
        result.completed_gold.push_back(gold.records[i]);
    }
    return result;
}

} // namespace ontorel
