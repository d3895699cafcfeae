#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace drainage {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEightPi = 8.0 * std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;

/// Threshold a = sqrt(pi/2) above which non-flat steady vortex tori exist;
/// also the small-amplitude period of f'' = 8 pi (1 - e^f).
inline const double kBifurcationPeriod = 1.2533141373155002512078826;

/// Raised when an iterative method fails to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sum in a fixed binary-tree order; the result depends only on the input
/// sequence, never on how the values were produced.
double pairwise_sum(std::span<const double> values);

/// Shortest decimal text carrying 17 significant digits, locale independent.
std::string format_double(double value);

/// Locale-independent parse of the whole string; throws std::invalid_argument.
double parse_double(std::string_view text);

/// Parses "start:stop:step" (inclusive of stop within half a step) or a
/// comma-separated list.
std::vector<double> parse_range(std::string_view text);

/// Worker thread count: `requested` if nonzero, otherwise the
/// DRAINAGE_THREADS environment variable, otherwise hardware concurrency.
std::size_t thread_count(std::size_t requested = 0);

}  // namespace drainage

#include <exception>
#include <mutex>
#include <thread>

namespace drainage {

/// Runs fn(i) for i in [0, count) on up to `threads` workers using a fixed
/// contiguous partition. The first exception thrown is rethrown.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = count * t / threads;
        const std::size_t end = count * (t + 1) / threads;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace drainage
