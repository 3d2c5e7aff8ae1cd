#pragma once

#include "modmpc/moo.hpp"
#include "modmpc/mpc.hpp"

#include <functional>
#include <vector>

namespace modmpc::resource {

/// Polynomial upper bound on per-instant QP solution time,
/// gamma(N) = sum_i a[i] * N^i. Non-negative coefficients keep the bound
/// monotone in N.
struct ResourceModel {
  std::vector<double> a;

  int degree() const { return static_cast<int>(a.size()) - 1; }
};

void validate(const ResourceModel& m);

/// Solution-time bound in seconds.
double gamma(const ResourceModel& m, int N);

/// Resource number eta(p) = gamma(N) / h: required processing power of the
/// implementation hardware relative to the calibration machine.
double eta(const ResourceModel& m, const moo::DesignPoint& p);

struct TimingSample {
  int N = 0;
  std::vector<double> times;  // seconds, all positive
  double h = 0.0;             // sampling period used while measuring
};

/// Least-squares polynomial fit to the per-N maxima of the measured times
/// (gamma is an upper bound, so maxima, not means). Negative fitted
/// coefficients are clamped to zero.
ResourceModel calibrate(const std::vector<TimingSample>& samples, int degree);

/// Wall-clock timing of solve_qp over representative initial states, reps
/// timed repetitions per N after two discarded warm-up solves. Runs
/// strictly sequentially; concurrent timing would corrupt the upper bound.
std::vector<TimingSample> measure(const std::function<mpc::OcpSpec(int)>& spec_family,
                                  const std::vector<int>& n_values, int reps);

}  // namespace modmpc::resource
