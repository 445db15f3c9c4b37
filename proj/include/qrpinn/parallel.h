#pragma once

#include <cstddef>
#include <functional>

namespace qrpinn {

// Worker count: QRS_THREADS if set and positive, else hardware concurrency (at least 1).
std::size_t thread_count();

// Runs task(i) for i in [0, n_tasks) on up to thread_count() threads. Tasks must write
// only to their own slots; callers reduce the slots in index order so results do not
// depend on scheduling. The first exception thrown by a task is rethrown.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& task);

}  // namespace qrpinn
