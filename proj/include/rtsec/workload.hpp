#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rtsec/model.hpp"

namespace rtsec {

struct GenSpec {
  int n_rt = 5;
  int n_sec = 3;
  double rt_util_target = 0.5;
  // Desired security utilization as a fraction of rt_util_target, capped so
  // that security work stays below half of the combined load at f = 1.
  double sec_util_fraction = 0.5;
  std::vector<Time> period_menu = default_period_menu();  // real-time periods
  std::vector<Time> security_period_menu = default_security_period_menu();  // T_des
  std::uint64_t seed = 0;
  int min_active_level = 1;
  bool mirror_active = true;  // ACTIVE set copies the PASSIVE one (ids prefixed "a")

  static std::vector<Time> default_period_menu();
  static std::vector<Time> default_security_period_menu();
};

inline constexpr int kGenerateRetries = 1000;

// Throws ValidationError on an invalid spec and Error when no valid set is
// found within kGenerateRetries draws.
TaskSet generate(const GenSpec& spec);

// n utilizations summing to `total` (unbiased over the simplex).
template <class Rng>
std::vector<double> uunifast(int n, double total, Rng& rng);

}  // namespace rtsec

template <class Rng>
std::vector<double> rtsec::uunifast(int n, double total, Rng& rng) {
  std::vector<double> out;
  if (n <= 0) return out;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double sum = total;
  for (int i = 1; i < n; ++i) {
    const double next = sum * std::pow(u(rng), 1.0 / (n - i));
    out.push_back(sum - next);
    sum = next;
  }
  out.push_back(sum);
  return out;
}
