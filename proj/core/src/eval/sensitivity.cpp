// Copyright 2026 The uemit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uemit/eval/sensitivity.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace uemit {

std::vector<SensitivityPoint> job_scale_sensitivity(const Dataset& data, const JobPool& pool,
                                                    const CrossvalConfig& config, const std::vector<double>& factors) {
  std::vector<SensitivityPoint> out;
  for (double f : factors) {
    if (!(f > 0.0)) throw std::invalid_argument("job scale factors must be > 0");
    auto c = config;
    c.env.job_scale = config.env.job_scale * f;
    out.push_back({f, run_crossval(data, pool, c).report});
  }
  return out;
}

std::string sensitivity_csv(const std::vector<SensitivityPoint>& points) {
  auto num = [](double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  std::ostringstream out;
  out << "factor,policy,ue_cost,mitigation_cost,total\n";
  for (const auto& p : points) {
    for (const auto& name : p.report.policies()) {
      const auto t = p.report.total(name);
      out << num(p.factor) << ',' << name << ',' << num(t.ue_cost) << ',' << num(t.mitigation_cost) << ','
          << num(t.total()) << '\n';
    }
  }
  return out.str();
}

double linear_r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_r_squared: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy == 0.0) return 1.0;
  if (sxx == 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

}  // namespace uemit
