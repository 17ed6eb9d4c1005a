#pragma once

#include <Eigen/Dense>
#include <functional>

namespace dlasso {

// Worker-pool size: --threads / DEBIAS_LASSO_THREADS / hardware concurrency,
// in that order. Results never depend on the value; only wall time does.
int default_threads();
void set_default_threads(int n);

// Runs f(i) for i in [begin, end) on up to `threads` workers. Each index must
// write only its own output slot; with that contract the result is identical
// for every thread count.
void parallel_for(Eigen::Index begin, Eigen::Index end, int threads,
                  const std::function<void(Eigen::Index)>& f);

}  // namespace dlasso
