#pragma once

#include <cstddef>
#include <exception>
#include <string_view>

namespace dandelion {

// Serial is the reference path; parallel fans independent work items out over
// OpenMP threads. Work items own their randomness, so both give identical results.
enum class ExecutionPolicy { serial, parallel };

std::string_view to_string(ExecutionPolicy policy);
int worker_count();

template <class Body>
void for_each_index(std::size_t count, ExecutionPolicy policy, Body&& body) {
    if (policy == ExecutionPolicy::serial) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(dandelion_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace dandelion
