// Copyright 2026 The GEAT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "geat/threading.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace geat {

void configure_threads_from_env() {
#ifdef _OPENMP
  const char* env = std::getenv("GEAT_THREADS");
  if (env == nullptr || *env == '\0') return;
  try {
    const int requested = std::stoi(env);
    if (requested >= 1) {
      omp_set_num_threads(std::min(requested, omp_get_num_procs()));
    }
  } catch (...) {
    // ignore unparsable values; keep the OpenMP default
  }
#endif
}

int worker_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace geat
