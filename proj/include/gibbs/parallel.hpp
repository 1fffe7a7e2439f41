/*
 * Copyright 2026 the artifact authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GIBBS_PARALLEL_HPP
#define GIBBS_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace gibbs {

// Runs fn(i) for every i in [0, n), distributing indices over `workers`
// threads. Scheduling order is unspecified, so callers that need
// reproducible results must make fn(i) write only to slot i and combine
// the slots in index order afterwards. Exceptions thrown by fn are
// captured and the first one is rethrown after all threads join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

} // namespace gibbs

#endif // GIBBS_PARALLEL_HPP
