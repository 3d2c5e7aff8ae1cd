#include "modmpc/resource.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

namespace modmpc::resource {

void validate(const ResourceModel& m) {
  if (m.a.size() < 2) {
    throw std::invalid_argument("resource model: degree must be >= 1");
  }
  for (double c : m.a) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("resource model: coefficients must be finite and >= 0");
    }
  }
}

double gamma(const ResourceModel& m, int N) {
  validate(m);
  if (N < 1) {
    throw std::invalid_argument("gamma: N must be >= 1");
  }
  double value = 0.0;
  for (int i = static_cast<int>(m.a.size()) - 1; i >= 0; --i) {
    value = value * N + m.a[i];
  }
  return value;
}

double eta(const ResourceModel& m, const moo::DesignPoint& p) {
  if (!(p.h > 0.0)) {
    throw std::invalid_argument("eta: h must be positive");
  }
  return gamma(m, p.N) / p.h;
}

ResourceModel calibrate(const std::vector<TimingSample>& samples, int degree) {
  if (degree < 1) {
    throw std::invalid_argument("calibrate: degree must be >= 1");
  }
  std::map<int, double> max_by_n;
  for (const auto& s : samples) {
    if (s.times.empty()) {
      throw std::invalid_argument("calibrate: empty timing sample");
    }
    const double mx = *std::max_element(s.times.begin(), s.times.end());
    auto [it, inserted] = max_by_n.emplace(s.N, mx);
    if (!inserted) {
      it->second = std::max(it->second, mx);
    }
  }
  const int rows = static_cast<int>(max_by_n.size());
  if (rows < degree + 1) {
    throw std::invalid_argument("calibrate: need at least degree+1 distinct N values");
  }

  Matrix vand(rows, degree + 1);
  Vector rhs(rows);
  int r = 0;
  for (const auto& [n, mx] : max_by_n) {
    double pw = 1.0;
    for (int c = 0; c <= degree; ++c) {
      vand(r, c) = pw;
      pw *= n;
    }
    rhs[r] = mx;
    ++r;
  }
  const Vector coeffs = vand.colPivHouseholderQr().solve(rhs);

  ResourceModel m;
  m.a.resize(degree + 1);
  for (int c = 0; c <= degree; ++c) {
    m.a[c] = std::max(0.0, coeffs[c]);
  }
  return m;
}

std::vector<TimingSample> measure(const std::function<mpc::OcpSpec(int)>& spec_family,
                                  const std::vector<int>& n_values, int reps) {
  if (reps < 3) {
    throw std::invalid_argument("measure: reps must be >= 3");
  }
  using clock = std::chrono::steady_clock;

  std::vector<TimingSample> out;
  for (int n : n_values) {
    const mpc::OcpSpec spec = mpc::with_resolved_terminal_weight(spec_family(n));
    const int nx = spec.n_x();

    // Representative initial states: fractions of the state box (entries
    // without a finite bound fall back to unit scale).
    std::vector<Vector> x0s;
    for (double frac : {0.3, -0.3, 0.6}) {
      Vector x0(nx);
      for (int i = 0; i < nx; ++i) {
        const double hi = std::isfinite(spec.x_ub[i]) ? spec.x_ub[i] : 1.0;
        x0[i] = frac * hi;
      }
      x0s.push_back(x0);
    }

    qp::QpProblem q = mpc::build_qp(spec, x0s[0]);
    const auto solve_for = [&](int rep) {
      q.beq.head(nx) = x0s[rep % x0s.size()];
      (void)qp::solve_qp(q);
    };

    for (int w = 0; w < 2; ++w) {
      solve_for(w);  // warm-up, discarded
    }

    TimingSample sample;
    sample.N = n;
    sample.h = spec.h;
    for (int rep = 0; rep < reps; ++rep) {
      const auto start = clock::now();
      solve_for(rep);
      const auto stop = clock::now();
      const double secs = std::chrono::duration<double>(stop - start).count();
      sample.times.push_back(std::max(secs, 1e-9));
    }
    out.push_back(std::move(sample));
  }
  return out;
}

}  // namespace modmpc::resource
