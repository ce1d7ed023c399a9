#include "eqop/runtime.hpp"

#include <cstdlib>
#include <string>
#include <thread>

#include <Eigen/Core>

#include "eqop/errors.hpp"

namespace eqop {

int thread_limit() {
  const char* env = std::getenv("EQOP_THREADS");
  if (env == nullptr || *env == '\0') {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(env, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != std::string(env).size() || n < 1) {
    throw ValidationError("EQOP_THREADS must be a positive integer, got '" + std::string(env) + "'");
  }
  return n;
}

int configure_threads() {
  const int n = thread_limit();
  Eigen::setNbThreads(n);
  return n;
}

}  // namespace eqop
