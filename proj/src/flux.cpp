#include "sctm/flux.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace sctm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_grad(double g, double bound) { return std::clamp(g, -bound, bound); }

[[noreturn]] void density_out_of_range(const char* what, double rho) {
  throw DomainError(std::string(what) + ": density " + std::to_string(rho) +
                    " veh/km outside admissible range");
}

}  // namespace

// ---------------------------------------------------------------------------
// Daganzo MFD
// ---------------------------------------------------------------------------

void DaganzoParams::validate() const {
  if (!(free_flow_speed_kmh > 0.0) || !(wave_speed_kmh > 0.0) ||
      !(capacity_veh_h > 0.0) || !(jam_density_veh_km > 0.0)) {
    throw std::invalid_argument("daganzo: all parameters must be strictly positive");
  }
  if (wave_speed_kmh > free_flow_speed_kmh) {
    throw std::invalid_argument("daganzo: wave speed w must not exceed v_f");
  }
  if (capacity_veh_h > free_flow_speed_kmh * jam_density_veh_km) {
    throw std::invalid_argument("daganzo: capacity not attainable, q_max > v_f * rho_jam");
  }
}

static double dz_checked(double rho, const DaganzoParams& p, const char* what) {
  if (rho < -kDensityTol || rho > p.jam_density_veh_km + kDensityTol) {
    density_out_of_range(what, rho);
  }
  return std::clamp(rho, 0.0, p.jam_density_veh_km);
}

double daganzo_sending(double rho, const DaganzoParams& p) {
  rho = dz_checked(rho, p, "daganzo_sending");
  return std::min(p.free_flow_speed_kmh * rho, p.capacity_veh_h);
}

double daganzo_receiving(double rho, const DaganzoParams& p) {
  rho = dz_checked(rho, p, "daganzo_receiving");
  return std::min(p.wave_speed_kmh * (p.jam_density_veh_km - rho), p.capacity_veh_h);
}

double daganzo_flux(double rho_up, double rho_down, const DaganzoParams& p) {
  return std::min(daganzo_sending(rho_up, p), daganzo_receiving(rho_down, p));
}

DaganzoFlux::DaganzoFlux(const DaganzoParams& p)
    : FluxModel(1, std::max(p.free_flow_speed_kmh, p.wave_speed_kmh)), params_(p) {
  params_.validate();
}

double DaganzoFlux::checked(double rho) const { return dz_checked(rho, params_, "daganzo"); }

double DaganzoFlux::max_wave_speed_kmh() const {
  return std::max(params_.free_flow_speed_kmh, params_.wave_speed_kmh);
}

double DaganzoFlux::max_class_flow_veh_h(int) const { return params_.capacity_veh_h; }

double DaganzoFlux::class_jam_density(int) const { return params_.jam_density_veh_km; }

bool DaganzoFlux::cell_admissible(std::span<const double> rho, double tol) const {
  return rho[0] >= -tol && rho[0] <= params_.jam_density_veh_km + tol;
}

void DaganzoFlux::eval(std::span<const double> up, std::span<const double> dn,
                       std::span<double> out) const {
  out[0] = daganzo_flux(up[0], dn[0], params_);
}

void DaganzoFlux::gradient(std::span<const double> up, std::span<const double> dn,
                           std::span<double> out) const {
  const double u = checked(up[0]);
  const double d = checked(dn[0]);
  const double vf = params_.free_flow_speed_kmh;
  const double w = params_.wave_speed_kmh;
  // min of three affine branches; at ties the right-derivative of the min is
  // the smallest slope among the active branches.
  const double f[3] = {vf * u, params_.capacity_veh_h,
                       w * (params_.jam_density_veh_km - d)};
  const double gu[3] = {vf, 0.0, 0.0};
  const double gd[3] = {0.0, 0.0, -w};
  const double m = std::min({f[0], f[1], f[2]});
  double du = kInf, dd = kInf;
  for (int i = 0; i < 3; ++i) {
    if (f[i] <= m) {
      du = std::min(du, gu[i]);
      dd = std::min(dd, gd[i]);
    }
  }
  out[0] = clamp_grad(du, lipschitz_bound());
  out[1] = clamp_grad(dd, lipschitz_bound());
}

void DaganzoFlux::inflow_cap(std::span<const double> dn_first, std::span<double> out) const {
  out[0] = daganzo_receiving(dn_first[0], params_);
}

void DaganzoFlux::inflow_cap_gradient(std::span<const double> dn_first,
                                      std::span<double> out) const {
  const double d = checked(dn_first[0]);
  const double r_lin = params_.wave_speed_kmh * (params_.jam_density_veh_km - d);
  out[0] = (r_lin <= params_.capacity_veh_h) ? -params_.wave_speed_kmh : 0.0;
}

void DaganzoFlux::outflow_cap(std::span<const double> up_last, std::span<double> out) const {
  out[0] = daganzo_sending(up_last[0], params_);
}

void DaganzoFlux::outflow_cap_gradient(std::span<const double> up_last,
                                       std::span<double> out) const {
  const double u = checked(up_last[0]);
  const double s_lin = params_.free_flow_speed_kmh * u;
  out[0] = (s_lin < params_.capacity_veh_h) ? params_.free_flow_speed_kmh : 0.0;
}

double DaganzoFlux::kink_distance(std::span<const double> up,
                                  std::span<const double> dn) const {
  const double u = checked(up[0]);
  const double d = checked(dn[0]);
  const double vf = params_.free_flow_speed_kmh;
  const double w = params_.wave_speed_kmh;
  const double qm = params_.capacity_veh_h;
  const double jam = params_.jam_density_veh_km;
  double kd = std::min(std::abs(u - qm / vf), std::abs(d - (jam - qm / w)));
  const double s_lin = vf * u;
  const double r_lin = w * (jam - d);
  if (s_lin >= qm && r_lin >= qm) {
    return kd;  // both branches capped: min is locally constant, no S=R kink
  }
  const double s = std::min(s_lin, qm);
  const double r = std::min(r_lin, qm);
  return std::min(kd, std::abs(s - r) / std::hypot(vf, w));
}

double DaganzoFlux::inflow_kink_distance(std::span<const double> dn_first,
                                         std::span<const double> lambda) const {
  const double d = checked(dn_first[0]);
  const double w = params_.wave_speed_kmh;
  const double qm = params_.capacity_veh_h;
  const double jam = params_.jam_density_veh_km;
  const double lam = lambda[0];
  if (lam <= 0.0) return kInf;  // rate identically zero
  double kd = kInf;
  if (lam < qm) {
    kd = std::min(kd, std::abs(d - (jam - lam / w)));  // R(rho) crosses lambda
  } else {
    kd = std::min(kd, std::abs(d - (jam - qm / w)));  // kink of R itself
  }
  return kd;
}

double DaganzoFlux::outflow_kink_distance(std::span<const double> up_last,
                                          std::span<const double> nu) const {
  const double u = checked(up_last[0]);
  const double vf = params_.free_flow_speed_kmh;
  const double qm = params_.capacity_veh_h;
  const double n = nu[0];
  if (n <= 0.0) return kInf;
  if (n < qm) return std::abs(u - n / vf);
  return std::abs(u - qm / vf);
}

FluxModelPtr make_daganzo(const DaganzoParams& p) {
  return std::make_shared<DaganzoFlux>(p);
}

// ---------------------------------------------------------------------------
// Chanut-Buisson MFD
// ---------------------------------------------------------------------------

void CbParams::validate() const {
  if (!(car_free_flow_kmh > 0.0) || !(truck_free_flow_kmh > 0.0) ||
      !(critical_speed_kmh > 0.0) || !(car_length_km > 0.0) ||
      !(truck_length_km > 0.0) || lane_count < 1) {
    throw std::invalid_argument("chanut_buisson: parameters must be strictly positive");
  }
  if (!(critical_speed_kmh < truck_free_flow_kmh) ||
      !(truck_free_flow_kmh <= car_free_flow_kmh)) {
    throw std::invalid_argument("chanut_buisson: require v_c < v_f2 <= v_f1");
  }
  if (!(car_length_km <= truck_length_km)) {
    throw std::invalid_argument("chanut_buisson: require L1 <= L2");
  }
  if (critical_fraction < 0.2 || critical_fraction > 0.5) {
    throw std::invalid_argument("chanut_buisson: beta outside [0.2, 0.5]");
  }
}

namespace {

// Speeds and flows are piecewise functions of the occupancy o = rho1 L1 + rho2 L2:
// the free-flow condition rho1+rho2 <= beta * rho_jam(rho1, rho2) reduces to
// o <= beta N, and the PCE density rho1 + e rho2 equals o / L1.

double cb_crit_occ(const CbParams& p) { return p.critical_fraction * p.lane_count; }

double cb_ff_speed(const CbParams& p, double o, double vf) {
  return vf - (vf - p.critical_speed_kmh) * o / cb_crit_occ(p);
}

// d speed / d occupancy on the free-flow branch
double cb_ff_speed_d(const CbParams& p, double vf) {
  return -(vf - p.critical_speed_kmh) / cb_crit_occ(p);
}

double cb_qpce(const CbParams& p, double o) {
  return p.capacity_pce_veh_h() * (p.lane_count - o) /
         ((1.0 - p.critical_fraction) * p.lane_count);
}

double cb_qpce_d(const CbParams& p) {
  return -p.capacity_pce_veh_h() / ((1.0 - p.critical_fraction) * p.lane_count);
}

double cb_cong_speed(const CbParams& p, double o) {
  return cb_qpce(p, o) * p.car_length_km / o;
}

double cb_cong_speed_d(const CbParams& p, double o) {
  return -p.capacity_pce_veh_h() * p.car_length_km /
         ((1.0 - p.critical_fraction) * o * o);
}

struct CbChecked {
  double r1, r2;
};

CbChecked cb_checked(std::span<const double> rho, const CbParams& p, const char* what) {
  double r1 = rho[0];
  double r2 = rho[1];
  if (r1 < -kDensityTol) density_out_of_range(what, r1);
  if (r2 < -kDensityTol) density_out_of_range(what, r2);
  r1 = std::max(r1, 0.0);
  r2 = std::max(r2, 0.0);
  const double occ = p.occupancy(r1, r2);
  const double occ_tol = kDensityTol * (p.car_length_km + p.truck_length_km);
  if (occ > p.lane_count + occ_tol) {
    throw DomainError(std::string(what) + ": occupancy " + std::to_string(occ) +
                      " exceeds lane count " + std::to_string(p.lane_count));
  }
  if (occ > p.lane_count) {
    const double scale = p.lane_count / occ;
    r1 *= scale;
    r2 *= scale;
  }
  return {r1, r2};
}

// Sent/received quantities of one cell in the sending-receiving scheme.
struct CbSendRecv {
  double occ = 0.0;
  bool congested = false;
  double delta1 = 0.0;     // sent class flows, veh/h
  double delta2 = 0.0;
  double delta_pce = 0.0;  // sent PCE flow
  double omega = 0.0;      // received PCE flow
  double pce_density = 0.0;
};

CbSendRecv cb_send_recv(const CbParams& p, double r1, double r2) {
  CbSendRecv s;
  s.occ = p.occupancy(r1, r2);
  s.congested = s.occ > cb_crit_occ(p);
  s.pce_density = r1 + p.pce() * r2;
  if (!s.congested) {
    const double v1 = cb_ff_speed(p, s.occ, p.car_free_flow_kmh);
    const double v2 = cb_ff_speed(p, s.occ, p.truck_free_flow_kmh);
    s.delta1 = r1 * v1;
    s.delta2 = r2 * v2;
    s.delta_pce = s.delta1 + p.pce() * s.delta2;
    s.omega = p.capacity_pce_veh_h();
  } else {
    const double c = p.capacity_pce_veh_h();
    s.delta1 = c * r1 / s.pce_density;
    s.delta2 = c * r2 / s.pce_density;
    s.delta_pce = c;
    s.omega = cb_qpce(p, s.occ);
  }
  return s;
}

}  // namespace

double cb_jam_density(double rho1, double rho2, const CbParams& p) {
  const auto [r1, r2] = cb_checked(std::array{rho1, rho2}, p, "cb_jam_density");
  if (r1 + r2 <= 0.0) {
    throw DomainError("cb_jam_density: undefined for the empty state");
  }
  return p.lane_count * (r1 + r2) / p.occupancy(r1, r2);
}

CbRegime cb_regime(double rho1, double rho2, const CbParams& p) {
  const auto [r1, r2] = cb_checked(std::array{rho1, rho2}, p, "cb_regime");
  return p.occupancy(r1, r2) <= cb_crit_occ(p) ? CbRegime::FreeFlow : CbRegime::Congested;
}

CbFlows cb_class_flows(double rho1, double rho2, const CbParams& p) {
  const auto [r1, r2] = cb_checked(std::array{rho1, rho2}, p, "cb_class_flows");
  CbFlows f;
  const double occ = p.occupancy(r1, r2);
  if (occ <= cb_crit_occ(p)) {
    f.car_speed_kmh = cb_ff_speed(p, occ, p.car_free_flow_kmh);
    f.truck_speed_kmh = cb_ff_speed(p, occ, p.truck_free_flow_kmh);
  } else {
    const double v = cb_cong_speed(p, occ);
    f.car_speed_kmh = v;
    f.truck_speed_kmh = v;
  }
  f.car_flow_veh_h = r1 * f.car_speed_kmh;
  f.truck_flow_veh_h = r2 * f.truck_speed_kmh;
  return f;
}

double cb_shock_speed(const CbCellState& up, const CbCellState& dn, const CbParams& p) {
  const double e = p.pce();
  const double num = (up.q1 + e * up.q2) - (dn.q1 + e * dn.q2);
  const double den = (up.rho1 + e * up.rho2) - (dn.rho1 + e * dn.rho2);
  if (den == 0.0) {
    throw DomainError("cb_shock_speed: upstream and downstream PCE densities coincide");
  }
  return num / den;
}

namespace {

// Joint value/gradient evaluation keeps the branch selection identical for
// both. `grad` is nullable, row-major 2 x 4 ([j][0..1] upstream, [j][2..3]
// downstream partials).
void cb_eval_impl(const CbParams& p, double r1u, double r2u, double r1d, double r2d,
                  std::span<double> out, double* grad) {
  const double e = p.pce();
  const double ew[2] = {1.0, e};
  const double lw[2] = {p.car_length_km, p.truck_length_km};
  const CbSendRecv up = cb_send_recv(p, r1u, r2u);
  const CbSendRecv dn = cb_send_recv(p, r1d, r2d);
  const double ru[2] = {r1u, r2u};

  if (grad != nullptr) std::fill(grad, grad + 8, 0.0);

  // Sending-branch partials d Delta_j / d rho_up_k, used by two branches below.
  auto sending_gradient = [&](double g[2][2]) {
    if (!up.congested) {
      const double v[2] = {cb_ff_speed(p, up.occ, p.car_free_flow_kmh),
                           cb_ff_speed(p, up.occ, p.truck_free_flow_kmh)};
      const double vd[2] = {cb_ff_speed_d(p, p.car_free_flow_kmh),
                            cb_ff_speed_d(p, p.truck_free_flow_kmh)};
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          g[j][k] = (j == k ? v[j] : 0.0) + ru[j] * vd[j] * lw[k];
    } else {
      const double c = p.capacity_pce_veh_h();
      const double d = up.pce_density;
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          g[j][k] = c * ((j == k ? d : 0.0) - ru[j] * ew[k]) / (d * d);
    }
  };

  // Upstream free-flow into congestion: the shock discontinuity decides
  // whether the sending-receiving scheme applies.
  if (!up.congested && dn.congested) {
    const double fu = up.delta_pce;          // PCE flow of the upstream state
    const double fd = cb_qpce(p, dn.occ);    // PCE flow of the downstream state
    const double den = up.pce_density - dn.pce_density;
    const double s = (den != 0.0) ? (fu - fd) / den : 0.0;
    if (den != 0.0 && s < 0.0) {
      // Intermediate state of the Riemann solution; downstream speed carries
      // the upstream composition across the interface.
      const double v = cb_cong_speed(p, dn.occ);
      const double qu[2] = {up.delta1, up.delta2};
      const double a[2] = {qu[0] - s * ru[0], qu[1] - s * ru[1]};
      const double vs = v - s;
      out[0] = v * a[0] / vs;
      out[1] = v * a[1] / vs;
      if (grad != nullptr) {
        double gsend[2][2];
        sending_gradient(gsend);
        for (int k = 0; k < 2; ++k) {
          const double dfu = ew[0] * gsend[0][k] + ew[1] * gsend[1][k];
          const double ds = (dfu - s * ew[k]) / den;
          for (int j = 0; j < 2; ++j) {
            const double da = gsend[j][k] - ds * ru[j] - (j == k ? s : 0.0);
            grad[j * 4 + k] = v * (da * vs + a[j] * ds) / (vs * vs);
          }
        }
        const double qd = cb_qpce_d(p);
        const double vd = cb_cong_speed_d(p, dn.occ);
        for (int k = 0; k < 2; ++k) {
          const double dv = vd * lw[k];
          const double ds = (-qd * lw[k] + s * ew[k]) / den;
          for (int j = 0; j < 2; ++j) {
            const double da = -ds * ru[j];
            grad[j * 4 + 2 + k] =
                ((dv * a[j] + v * da) * vs - v * a[j] * (dv - ds)) / (vs * vs);
          }
        }
      }
      return;
    }
    // s >= 0 (or degenerate gap): fall through to sending-receiving.
  }

  if (up.delta_pce <= dn.omega) {
    out[0] = up.delta1;
    out[1] = up.delta2;
    if (grad != nullptr) {
      double gsend[2][2];
      sending_gradient(gsend);
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) grad[j * 4 + k] = gsend[j][k];
    }
    return;
  }

  // Receiving-limited: the received PCE flow is split over the classes in
  // proportion to their upstream PCE shares.
  const double d = up.pce_density;
  out[0] = ru[0] / d * dn.omega;
  out[1] = ru[1] / d * dn.omega;
  if (grad != nullptr) {
    const double domega = dn.congested ? cb_qpce_d(p) : 0.0;
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        grad[j * 4 + k] = dn.omega * ((j == k ? d : 0.0) - ru[j] * ew[k]) / (d * d);
        grad[j * 4 + 2 + k] = ru[j] / d * domega * lw[k];
      }
    }
  }
}

}  // namespace

void cb_flux(std::span<const double> up, std::span<const double> dn, const CbParams& p,
             std::span<double> out) {
  const auto u = cb_checked(up, p, "cb_flux");
  const auto d = cb_checked(dn, p, "cb_flux");
  cb_eval_impl(p, u.r1, u.r2, d.r1, d.r2, out, nullptr);
}

CbFlux::CbFlux(const CbParams& p)
    : FluxModel(2, 2.0 * (p.car_free_flow_kmh +
                          p.pce() * (p.car_free_flow_kmh - p.critical_speed_kmh) +
                          p.critical_speed_kmh * (1.0 + p.pce()) /
                              (1.0 - p.critical_fraction))),
      params_(p) {
  params_.validate();
}

void CbFlux::checked(std::span<const double> rho, double clamped[2]) const {
  const auto c = cb_checked(rho, params_, "chanut_buisson");
  clamped[0] = c.r1;
  clamped[1] = c.r2;
}

double CbFlux::max_wave_speed_kmh() const { return params_.car_free_flow_kmh; }

double CbFlux::max_class_flow_veh_h(int cls) const {
  const double c = params_.capacity_pce_veh_h();
  return cls == 0 ? c : c / params_.pce();
}

double CbFlux::class_jam_density(int cls) const {
  return params_.lane_count /
         (cls == 0 ? params_.car_length_km : params_.truck_length_km);
}

bool CbFlux::cell_admissible(std::span<const double> rho, double tol) const {
  if (rho[0] < -tol || rho[1] < -tol) return false;
  const double occ_tol = tol * (params_.car_length_km + params_.truck_length_km);
  return params_.occupancy(std::max(rho[0], 0.0), std::max(rho[1], 0.0)) <=
         params_.lane_count + occ_tol;
}

void CbFlux::eval(std::span<const double> up, std::span<const double> dn,
                  std::span<double> out) const {
  double u[2], d[2];
  checked(up, u);
  checked(dn, d);
  cb_eval_impl(params_, u[0], u[1], d[0], d[1], out, nullptr);
}

void CbFlux::gradient(std::span<const double> up, std::span<const double> dn,
                      std::span<double> out) const {
  double u[2], d[2], flux[2];
  checked(up, u);
  checked(dn, d);
  double g[8];
  cb_eval_impl(params_, u[0], u[1], d[0], d[1], flux, g);
  for (int i = 0; i < 8; ++i) out[i] = clamp_grad(g[i], lipschitz_bound());
}

void CbFlux::inflow_cap(std::span<const double> dn_first, std::span<double> out) const {
  double d[2];
  checked(dn_first, d);
  const CbSendRecv dn = cb_send_recv(params_, d[0], d[1]);
  // The class-j supremum is attained by an all-class-j upstream state and
  // equals the received PCE flow, scaled by the class's PCE weight.
  out[0] = dn.omega;
  out[1] = dn.omega / params_.pce();
}

void CbFlux::inflow_cap_gradient(std::span<const double> dn_first,
                                 std::span<double> out) const {
  double d[2];
  checked(dn_first, d);
  const bool congested = params_.occupancy(d[0], d[1]) >= cb_crit_occ(params_);
  const double domega = congested ? cb_qpce_d(params_) : 0.0;
  const double lw[2] = {params_.car_length_km, params_.truck_length_km};
  const double ew[2] = {1.0, params_.pce()};
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) out[j * 2 + k] = domega * lw[k] / ew[j];
}

void CbFlux::outflow_cap(std::span<const double> up_last, std::span<double> out) const {
  const double empty[2] = {0.0, 0.0};
  eval(up_last, empty, out);
}

void CbFlux::outflow_cap_gradient(std::span<const double> up_last,
                                  std::span<double> out) const {
  double u[2], flux[2], g[8];
  checked(up_last, u);
  cb_eval_impl(params_, u[0], u[1], 0.0, 0.0, flux, g);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      out[j * 2 + k] = clamp_grad(g[j * 4 + k], lipschitz_bound());
}

double CbFlux::kink_distance(std::span<const double> up,
                             std::span<const double> dn) const {
  double u[2], d[2];
  checked(up, u);
  checked(dn, d);
  const double lnorm = std::hypot(params_.car_length_km, params_.truck_length_km);
  const double crit = cb_crit_occ(params_);
  double kd = std::min(std::abs(params_.occupancy(u[0], u[1]) - crit),
                       std::abs(params_.occupancy(d[0], d[1]) - crit)) /
              lnorm;
  const CbSendRecv su = cb_send_recv(params_, u[0], u[1]);
  const CbSendRecv sd = cb_send_recv(params_, d[0], d[1]);
  // Branch-switch loci, normalized by a representative flow gradient scale.
  const double norm = params_.car_free_flow_kmh +
                      params_.pce() * (params_.car_free_flow_kmh - params_.critical_speed_kmh);
  kd = std::min(kd, std::abs(su.delta_pce - sd.omega) / norm);
  if (!su.congested && sd.congested) {
    const double fd = cb_qpce(params_, sd.occ);
    kd = std::min(kd, std::abs(su.delta_pce - fd) / norm);
  }
  return kd;
}

double CbFlux::inflow_kink_distance(std::span<const double> dn_first,
                                    std::span<const double> lambda) const {
  double d[2];
  checked(dn_first, d);
  const double lnorm = std::hypot(params_.car_length_km, params_.truck_length_km);
  double kd = std::abs(params_.occupancy(d[0], d[1]) - cb_crit_occ(params_)) / lnorm;
  const CbSendRecv dn = cb_send_recv(params_, d[0], d[1]);
  const double slope = std::abs(cb_qpce_d(params_)) * lnorm;
  const double ew[2] = {1.0, params_.pce()};
  for (int j = 0; j < 2; ++j) {
    if (lambda[j] <= 0.0) continue;
    kd = std::min(kd, std::abs(dn.omega / ew[j] - lambda[j]) / (slope / ew[j]));
  }
  return kd;
}

double CbFlux::outflow_kink_distance(std::span<const double> up_last,
                                     std::span<const double> nu) const {
  double u[2], cap[2];
  checked(up_last, u);
  outflow_cap(up_last, cap);
  const double lnorm = std::hypot(params_.car_length_km, params_.truck_length_km);
  double kd = std::abs(params_.occupancy(u[0], u[1]) - cb_crit_occ(params_)) / lnorm;
  const double norm = params_.car_free_flow_kmh +
                      params_.pce() * (params_.car_free_flow_kmh - params_.critical_speed_kmh);
  for (int j = 0; j < 2; ++j) {
    if (nu[j] <= 0.0) continue;
    kd = std::min(kd, std::abs(cap[j] - nu[j]) / norm);
  }
  return kd;
}

FluxModelPtr make_chanut_buisson(const CbParams& p) {
  return std::make_shared<CbFlux>(p);
}

}  // namespace sctm
