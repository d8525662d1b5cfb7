#pragma once

#include <chrono>
#include <optional>

#include "quasilin/errors.hpp"

namespace quasilin {

namespace detail {
inline thread_local std::optional<std::chrono::steady_clock::time_point> active_deadline;
}

/// Throws ResourceLimit once the deadline installed by ScopedDeadline has passed.
/// Called from the inner loops of elimination and tower construction.
inline void check_deadline() {
  if (detail::active_deadline && std::chrono::steady_clock::now() > *detail::active_deadline) {
    throw ResourceLimit("time limit exceeded");
  }
}

/// Installs a wall-clock deadline for the current thread for the lifetime of the object.
class ScopedDeadline {
 public:
  explicit ScopedDeadline(std::chrono::duration<double> budget)
      : previous_(detail::active_deadline) {
    detail::active_deadline =
        std::chrono::steady_clock::now() +
        std::chrono::duration_cast<std::chrono::steady_clock::duration>(budget);
  }
  ScopedDeadline(const ScopedDeadline&) = delete;
  ScopedDeadline& operator=(const ScopedDeadline&) = delete;
  ~ScopedDeadline() { detail::active_deadline = previous_; }

 private:
  std::optional<std::chrono::steady_clock::time_point> previous_;
};

}  // namespace quasilin
