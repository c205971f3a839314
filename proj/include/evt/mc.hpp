#ifndef EVT_MC_HPP
#define EVT_MC_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "evt/reports.hpp"

namespace evt {

// Neumaier-compensated sum, fixed order.
double compensated_sum(const std::vector<double>& v);

// Runs fn(i) for i = 0..count-1 on a worker pool (threads = 0 picks the
// hardware count). Each index is visited exactly once; workers write to
// disjoint slots, so results are independent of scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

// Replicate runner: returns fn(rep) indexed by rep. Replicates must derive
// all randomness from stream(seed, rep), so the result is independent of the
// thread count; the caller reduces in fixed order.
std::vector<double> run_replicates(std::size_t reps, int threads,
                                   const std::function<double(std::size_t)>& fn);

SummaryStats summarize(const std::vector<double>& replicate_stats);

} // namespace evt

#endif
