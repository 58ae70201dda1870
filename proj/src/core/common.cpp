#include "core/common.hpp"

#include <atomic>
#include <bit>
#include <cstdlib>
#include <thread>
#include <vector>

namespace spinn {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> salts) {
  std::uint64_t h = mix64(base + 0x9E3779B97F4A7C15ULL);
  for (std::uint64_t s : salts) {
    h = mix64(h ^ (s + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
  }
  return h;
}

std::uint64_t hash_double(double x) {
  if (x == 0.0) x = 0.0;  // collapse -0.0
  return std::bit_cast<std::uint64_t>(x);
}

namespace {
thread_local bool in_worker = false;
}

int max_workers() {
  if (in_worker) return 1;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("SPINN_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(hw);
}

void parallel_for(int n, const std::function<void(int)>& body) {
  if (n <= 0) return;
  const int workers = std::min(max_workers(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      in_worker = true;
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) break;
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);  // lowest index wins, deterministic
  }
}

OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  OlsFit fit;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (design.rows() < design.cols() || qr.rank() < design.cols()) {
    fit.degenerate = true;
    fit.coef = Eigen::VectorXd::Constant(
        design.cols(), std::numeric_limits<double>::quiet_NaN());
    return fit;
  }
  fit.coef = qr.solve(y);
  return fit;
}

}  // namespace spinn
