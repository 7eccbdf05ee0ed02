#pragma once

#include <cstddef>
#include <string>

#include "recfact/error.hpp"

namespace recfact::detail {

[[noreturn]] inline void diverged(std::size_t epoch)
{
    fail(ErrorCode::kDivergence, "training diverged in epoch " + std::to_string(epoch) +
                                     " (loss became non-finite); try a smaller alpha");
}

// Runs one epoch; a non-finite gradient inside a trainer is reported as divergence.
template <class Body>
void guard_epoch(std::size_t epoch, Body&& body)
{
    try {
        body();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::kGradient)
            diverged(epoch);
        throw;
    }
}

} // namespace recfact::detail
