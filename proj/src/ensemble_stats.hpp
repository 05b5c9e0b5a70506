#pragma once

// Per-bin running statistics for trajectory ensembles. Merging is done in a
// fixed order by the callers, so results do not depend on scheduling.

#include "swapcool/core_state.hpp"

#include <cmath>
#include <vector>

namespace swapcool::detail {

inline constexpr int kFields = 8;

inline std::array<double, kFields> fields_of(const ObservableRecord& r) {
  return {r.mean_p, r.mean_p2, r.p_rms, r.P_e, r.xi_cum, r.mean_abs_p, r.jumps[0], r.jumps[2]};
}

struct BinStats {
  double n = 0.0;
  double t = 0.0;
  std::array<double, kFields> mean{};
  std::array<double, kFields> m2{};
  double jumps_zero_mean = 0.0;
  double jumps_zero_m2 = 0.0;

  void add(const ObservableRecord& r) {
    n += 1.0;
    t = r.t;
    const auto x = fields_of(r);
    for (int f = 0; f < kFields; ++f) {
      const double d = x[f] - mean[f];
      mean[f] += d / n;
      m2[f] += d * (x[f] - mean[f]);
    }
    const double d = r.jumps[1] - jumps_zero_mean;
    jumps_zero_mean += d / n;
    jumps_zero_m2 += d * (r.jumps[1] - jumps_zero_mean);
  }

  void merge(const BinStats& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double tot = n + o.n;
    for (int f = 0; f < kFields; ++f) {
      const double d = o.mean[f] - mean[f];
      mean[f] += d * o.n / tot;
      m2[f] += o.m2[f] + d * d * n * o.n / tot;
    }
    const double d = o.jumps_zero_mean - jumps_zero_mean;
    jumps_zero_mean += d * o.n / tot;
    jumps_zero_m2 += o.jumps_zero_m2 + d * d * n * o.n / tot;
    n = tot;
    t = o.t;
  }

  double se(double m2v) const { return n > 1.0 ? std::sqrt(m2v / (n - 1.0) / n) : 0.0; }

  /// Ensemble p_rms is sqrt of the ensemble <p^2> (error by the delta method).
  void finish(ObservableRecord& m, ObservableRecord& s) const {
    m = ObservableRecord{};
    s = ObservableRecord{};
    m.t = s.t = t;
    m.mean_p = mean[0];
    m.mean_p2 = mean[1];
    m.p_rms = std::sqrt(std::max(0.0, mean[1]));
    m.P_e = mean[3];
    m.xi_cum = mean[4];
    m.mean_abs_p = mean[5];
    m.jumps = {mean[6], jumps_zero_mean, mean[7]};
    s.mean_p = se(m2[0]);
    s.mean_p2 = se(m2[1]);
    s.p_rms = m.p_rms > 0.0 ? s.mean_p2 / (2.0 * m.p_rms) : 0.0;
    s.P_e = se(m2[3]);
    s.xi_cum = se(m2[4]);
    s.mean_abs_p = se(m2[5]);
    s.jumps = {se(m2[6]), se(jumps_zero_m2), se(m2[7])};
  }
};

}  // namespace swapcool::detail
