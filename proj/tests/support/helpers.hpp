#pragma once

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "sctm/flux.hpp"
#include "sctm/model.hpp"

namespace sctm::test {

// Independent transcription of the two-class flux case analysis, written
// from the published equations in ratio form (jam/critical densities rather
// than occupancies). Oracle for the production implementation.
namespace cb_oracle {

struct State {
  double r1, r2;
};

inline double jam(const CbParams& p, double r1, double r2) {
  return p.lane_count * (r1 + r2) / (r1 * p.car_length_km + r2 * p.truck_length_km);
}

inline double crit(const CbParams& p, double r1, double r2) {
  return p.critical_fraction * jam(p, r1, r2);
}

inline bool free_flow(const CbParams& p, double r1, double r2) {
  if (r1 + r2 <= 0.0) return true;
  return r1 + r2 <= crit(p, r1, r2);
}

inline double cap_c(const CbParams& p) {
  // C = v_c * rho_c(rho1, 0) evaluated at any positive car density
  return p.critical_speed_kmh * p.critical_fraction * jam(p, 1.0, 0.0);
}

struct Flows {
  double q1, q2, v1, v2;
};

inline Flows flows(const CbParams& p, double r1, double r2) {
  Flows f{};
  if (r1 + r2 <= 0.0) {
    f.v1 = p.car_free_flow_kmh;
    f.v2 = p.truck_free_flow_kmh;
    return f;
  }
  if (free_flow(p, r1, r2)) {
    const double ratio = (r1 + r2) / crit(p, r1, r2);
    f.v1 = p.car_free_flow_kmh - (p.car_free_flow_kmh - p.critical_speed_kmh) * ratio;
    f.v2 =
        p.truck_free_flow_kmh - (p.truck_free_flow_kmh - p.critical_speed_kmh) * ratio;
  } else {
    const double rj = jam(p, r1, r2);
    const double rc = crit(p, r1, r2);
    const double qpce = cap_c(p) * (rj - (r1 + r2)) / (rj - rc);
    const double e = p.truck_length_km / p.car_length_km;
    const double v = qpce / (r1 + e * r2);
    f.v1 = v;
    f.v2 = v;
  }
  f.q1 = r1 * f.v1;
  f.q2 = r2 * f.v2;
  return f;
}

struct SendRecv {
  double delta1, delta2, delta, omega;
};

inline SendRecv send_recv(const CbParams& p, double r1, double r2) {
  const double e = p.truck_length_km / p.car_length_km;
  SendRecv s{};
  if (free_flow(p, r1, r2)) {
    const Flows f = flows(p, r1, r2);
    s.delta1 = f.q1;
    s.delta2 = f.q2;
    s.delta = s.delta1 + e * s.delta2;
    s.omega = cap_c(p);
  } else {
    const double c = cap_c(p);
    s.delta1 = r1 / (r1 + e * r2) * c;
    s.delta2 = r2 / (r1 + e * r2) * c;
    s.delta = c;
    const Flows f = flows(p, r1, r2);
    s.omega = (r1 + e * r2) * f.v1;
  }
  return s;
}

inline std::pair<double, double> flux(const CbParams& p, State up, State dn) {
  const double e = p.truck_length_km / p.car_length_km;
  const bool up_ff = free_flow(p, up.r1, up.r2);
  const bool dn_ff = free_flow(p, dn.r1, dn.r2);
  if (up_ff && !dn_ff) {
    const Flows fu = flows(p, up.r1, up.r2);
    const Flows fd = flows(p, dn.r1, dn.r2);
    const double num = (fu.q1 + e * fu.q2) - (fd.q1 + e * fd.q2);
    const double den = (up.r1 + e * up.r2) - (dn.r1 + e * dn.r2);
    if (den != 0.0) {
      const double s = num / den;
      if (s < 0.0) {
        const double v = fd.v1;  // common downstream speed
        return {v * (fu.q1 - s * up.r1) / (v - s), v * (fu.q2 - s * up.r2) / (v - s)};
      }
    }
  }
  const SendRecv su = send_recv(p, up.r1, up.r2);
  const SendRecv sd = send_recv(p, dn.r1, dn.r2);
  if (su.delta <= sd.omega) return {su.delta1, su.delta2};
  const double share = up.r1 + e * up.r2;
  return {up.r1 / share * sd.omega, up.r2 / share * sd.omega};
}

}  // namespace cb_oracle

// Random admissible cell states.
struct StateSampler {
  std::mt19937_64 rng;
  explicit StateSampler(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }

  double daganzo(const DaganzoParams& p) { return uniform(0.0, p.jam_density_veh_km); }

  std::pair<double, double> cb(const CbParams& p, double occ_hi = 1.0) {
    const double occ = uniform(0.0, occ_hi * p.lane_count);
    const double split = uniform(0.0, 1.0);
    return {split * occ / p.car_length_km, (1.0 - split) * occ / p.truck_length_km};
  }
};

// Central finite differences of a flux model, step in veh/km.
inline std::vector<double> fd_gradient(const FluxModel& f, std::vector<double> up,
                                       std::vector<double> dn, double step = 1e-4) {
  const int m = f.class_count();
  std::vector<double> g(2 * m * m), lo(m), hi(m);
  for (int k = 0; k < m; ++k) {
    auto bump = [&](std::vector<double>& v, double delta, std::span<double> out) {
      const double saved = v[k];
      v[k] = saved + delta;
      f.eval(up, dn, out);
      v[k] = saved;
    };
    bump(up, +step, hi);
    bump(up, -step, lo);
    for (int j = 0; j < m; ++j) g[j * 2 * m + k] = (hi[j] - lo[j]) / (2.0 * step);
    auto bump_dn = [&](double delta, std::span<double> out) {
      const double saved = dn[k];
      dn[k] = saved + delta;
      f.eval(up, dn, out);
      dn[k] = saved;
    };
    bump_dn(+step, hi);
    bump_dn(-step, lo);
    for (int j = 0; j < m; ++j) g[j * 2 * m + m + k] = (hi[j] - lo[j]) / (2.0 * step);
  }
  return g;
}

inline const DaganzoParams kFig1Params{.free_flow_speed_kmh = 60.0,
                                       .wave_speed_kmh = 12.0,
                                       .capacity_veh_h = 1800.0,
                                       .jam_density_veh_km = 180.0};

inline const DaganzoParams kValidationParams{.free_flow_speed_kmh = 100.0,
                                             .wave_speed_kmh = 20.0,
                                             .capacity_veh_h = 1800.0,
                                             .jam_density_veh_km = 105.0};

inline const CbParams kTwoClassParams{.car_free_flow_kmh = 108.0,
                                      .truck_free_flow_kmh = 79.2,
                                      .critical_speed_kmh = 61.2,
                                      .car_length_km = 0.0065,
                                      .truck_length_km = 0.0165,
                                      .lane_count = 3,
                                      .critical_fraction = 0.25};

}  // namespace sctm::test
