#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <string>
#include <vector>

namespace wzlab {

/// Serial is the reference path; parallel runs the same body under OpenMP.
enum class Execution { serial, parallel };

[[nodiscard]] Execution parse_execution(const std::string& s);
[[nodiscard]] std::string to_string(Execution e);

/// Calls body(i) for i in [0, count). Each index must write only its own
/// output slot, so results are identical for every execution mode and worker
/// count. The first exception (lowest index) is rethrown after the loop.
void for_each_index(std::size_t count, Execution execution, int workers, const std::function<void(std::size_t)>& body);

/// Threads the parallel path would use for `workers` (0 = runtime default).
[[nodiscard]] int effective_workers(int workers);

}  // namespace wzlab
