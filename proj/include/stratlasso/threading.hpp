#pragma once

#include <cstddef>

namespace stratlasso {

/// Global cap on the number of OpenMP threads the library may use.
/// 0 means "whatever the runtime allows". All parallel kernels produce
/// results that are bitwise independent of this setting.
void set_max_threads(int n);
int max_threads();

/// Threads actually worth spawning for `work` independent items.
int threads_for(std::size_t work);

}  // namespace stratlasso
