#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace de::pipeline {

/// Runs `work` over `n` items on up to `parallelism` threads and hands each
/// result to `sink` on the calling thread in item order. If an item throws,
/// every earlier result is still delivered, then the exception is rethrown.
template <typename R>
void run_ordered(std::size_t n, std::size_t parallelism, const std::function<R(std::size_t)>& work,
                 const std::function<void(std::size_t, R&&)>& sink) {
    if (n == 0) return;
    parallelism = std::clamp<std::size_t>(parallelism, 1, n);

    std::mutex mu;
    std::condition_variable cv;
    std::vector<std::optional<R>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::size_t claimed = 0;
    bool stop = false;

    auto worker = [&] {
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard lock(mu);
                if (stop || claimed >= n) return;
                idx = claimed++;
            }
            std::optional<R> r;
            std::exception_ptr err;
            try {
                r.emplace(work(idx));
            } catch (...) {
                err = std::current_exception();
            }
            {
                std::lock_guard lock(mu);
                if (err) {
                    errors[idx] = err;
                    stop = true;
                } else {
                    results[idx] = std::move(r);
                }
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(parallelism);
    for (std::size_t t = 0; t < parallelism; ++t) threads.emplace_back(worker);

    std::exception_ptr failure;
    for (std::size_t idx = 0; idx < n && !failure; ++idx) {
        std::optional<R> r;
        {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return results[idx] || errors[idx] || (stop && idx >= claimed); });
            if (results[idx]) {
                r = std::move(results[idx]);
            } else if (errors[idx]) {
                failure = errors[idx];
            } else {
                // Never claimed: find the error that stopped the run.
                for (auto& e : errors) {
                    if (e) {
                        failure = e;
                        break;
                    }
                }
            }
        }
        if (r) {
            try {
                sink(idx, std::move(*r));
            } catch (...) {
                {
                    std::lock_guard lock(mu);
                    stop = true;
                }
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::lock_guard lock(mu);
        stop = true;
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace de::pipeline
