#include "lmmk/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

#include <spdlog/spdlog.h>

namespace lmmk::parallel {

int max_threads() { return omp_get_max_threads(); }

void set_thread_limit(int n) {
  if (n >= 1) omp_set_num_threads(n);
}

int configure_from_env() {
  if (const char* value = std::getenv("LMMK_THREADS"); value != nullptr && *value != '\0') {
    try {
      set_thread_limit(std::stoi(value));
    } catch (const std::exception&) {
      spdlog::warn("ignoring LMMK_THREADS={}: not an integer", value);
    }
  }
  return max_threads();
}

}  // namespace lmmk::parallel
