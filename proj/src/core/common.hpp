#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>

namespace spinn {

enum class ErrorKind { argument, numeric, io, format };

/// Library-wide exception; the kind maps onto the C API status codes and
/// the CLI exit codes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Deterministic random stream. Uniform and normal draws are generated from
/// raw mt19937_64 output so results do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform on [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal, Marsaglia polar method
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  // uniform integer in [0, bound), bound >= 1
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t z);

/// Derives an independent child seed from a base seed and a list of salts.
/// The same (base, salts) always yields the same seed.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> salts);

std::uint64_t hash_double(double x);

/// Number of worker threads honoring the SPINN_THREADS environment cap.
int max_workers();

/// Runs body(0..n-1), possibly on several threads. Iterations must be
/// independent; each writes only its own output slot, so results match
/// sequential execution regardless of scheduling. Nested calls run serially.
void parallel_for(int n, const std::function<void(int)>& body);

struct OlsFit {
  Eigen::VectorXd coef;
  bool degenerate = false;  // rank-deficient design (e.g. zero-variance regressor)
};

/// Least squares of y on the columns of design (caller includes the
/// intercept column).
OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

}  // namespace spinn
