#include "wzlab/parallel.hpp"

#include "wzlab/errors.hpp"

#include <omp.h>

#include <cstdint>

namespace wzlab {

Execution parse_execution(const std::string& s) {
    if (s == "serial") return Execution::serial;
    if (s == "parallel") return Execution::parallel;
    throw ParameterError("unknown execution mode '" + s + "'");
}

std::string to_string(Execution e) { return e == Execution::serial ? "serial" : "parallel"; }

int effective_workers(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

void for_each_index(std::size_t count, Execution execution, int workers,
                    const std::function<void(std::size_t)>& body) {
    if (execution == Execution::serial) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(effective_workers(workers))
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace wzlab
