#include "evt/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "evt/errors.hpp"

namespace evt {

double compensated_sum(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    unsigned nt = threads > 0 ? static_cast<unsigned>(threads)
                              : std::max(1u, std::thread::hardware_concurrency());
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, count));
    if (nt <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

std::vector<double> run_replicates(std::size_t reps, int threads,
                                   const std::function<double(std::size_t)>& fn) {
    std::vector<double> out(reps);
    parallel_for(reps, threads, [&](std::size_t r) { out[r] = fn(r); });
    return out;
}

SummaryStats summarize(const std::vector<double>& v) {
    if (v.empty()) throw domain_error("summarize: empty replicate vector");
    SummaryStats s;
    s.reps = v.size();
    const double n = static_cast<double>(v.size());
    s.mean = compensated_sum(v) / n;
    std::vector<double> dev2(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = v[i] - s.mean;
        dev2[i] = d * d;
    }
    s.sd = v.size() > 1 ? std::sqrt(compensated_sum(dev2) / (n - 1.0)) : 0.0;
    s.se = s.sd / std::sqrt(n);

    std::vector<double> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    auto q = [&sorted](double p) {
        const double idx = p * (static_cast<double>(sorted.size()) - 1.0);
        return sorted[static_cast<std::size_t>(std::llround(idx))];
    };
    s.min = sorted.front();
    s.q05 = q(0.05);
    s.q25 = q(0.25);
    s.median = q(0.5);
    s.q75 = q(0.75);
    s.q95 = q(0.95);
    s.max = sorted.back();
    return s;
}

} // namespace evt
