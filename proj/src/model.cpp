#include "sctm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sctm {

SegmentConfig::SegmentConfig(std::vector<double> lengths_km,
                             std::vector<FluxModelPtr> boundary_flux,
                             std::vector<double> arrival_rates_veh_h,
                             std::vector<double> departure_caps_veh_h,
                             DensityState initial_density)
    : d_(static_cast<int>(lengths_km.size())),
      lengths_(std::move(lengths_km)),
      flux_(std::move(boundary_flux)),
      lambda_(std::move(arrival_rates_veh_h)),
      nu_(std::move(departure_caps_veh_h)),
      rho0_(std::move(initial_density)) {
  if (flux_.empty() || !flux_.front()) {
    throw std::invalid_argument("segment: missing flux models");
  }
  m_ = flux_.front()->class_count();
  validate();
  inv_lengths_.resize(d_);
  for (int i = 0; i < d_; ++i) inv_lengths_[i] = 1.0 / lengths_[i];
  jam_counts_.resize(d_ * m_);
  for (int i = 1; i <= d_; ++i) {
    // A cell's per-class cap comes from the stricter of its two adjacent
    // boundary models.
    for (int j = 1; j <= m_; ++j) {
      const double jam = std::min(flux_[i - 1]->class_jam_density(j - 1),
                                  flux_[i]->class_jam_density(j - 1));
      jam_counts_[(i - 1) * m_ + (j - 1)] =
          static_cast<long long>(std::floor(jam * lengths_[i - 1] + 1e-9));
    }
  }
}

namespace {
std::vector<FluxModelPtr> replicate_model(FluxModelPtr model, std::size_t n) {
  return std::vector<FluxModelPtr>(n, std::move(model));
}
}  // namespace

SegmentConfig::SegmentConfig(std::vector<double> lengths_km, FluxModelPtr shared_flux,
                             std::vector<double> arrival_rates_veh_h,
                             std::vector<double> departure_caps_veh_h,
                             DensityState initial_density)
    : SegmentConfig(lengths_km,
                    replicate_model(std::move(shared_flux), lengths_km.size() + 1),
                    std::move(arrival_rates_veh_h), std::move(departure_caps_veh_h),
                    std::move(initial_density)) {}

void SegmentConfig::validate() const {
  if (d_ < 1) throw std::invalid_argument("segment: need at least one cell");
  if (m_ < 1) throw std::invalid_argument("segment: need at least one class");
  if (static_cast<int>(flux_.size()) != d_ + 1) {
    throw std::invalid_argument("segment: need d+1 boundary flux models");
  }
  for (const auto& f : flux_) {
    if (!f) throw std::invalid_argument("segment: null flux model");
    if (f->class_count() != m_) {
      throw std::invalid_argument("segment: boundary models disagree on class count");
    }
  }
  for (double l : lengths_) {
    if (!(l > 0.0)) throw std::invalid_argument("segment: cell lengths must be positive");
  }
  if (static_cast<int>(lambda_.size()) != m_ || static_cast<int>(nu_.size()) != m_) {
    throw std::invalid_argument("segment: lambda/nu must have one entry per class");
  }
  for (double v : lambda_) {
    if (v < 0.0) throw std::invalid_argument("segment: negative arrival rate");
  }
  for (double v : nu_) {
    if (v < 0.0) throw std::invalid_argument("segment: negative departure cap");
  }
  if (static_cast<int>(rho0_.size()) != d_ * m_) {
    throw std::invalid_argument("segment: initial density has wrong dimension");
  }
  if (!admissible(rho0_)) {
    throw std::invalid_argument("segment: initial density outside the state space");
  }
}

std::vector<long long> SegmentConfig::initial_counts() const {
  std::vector<long long> x(d_ * m_);
  for (int i = 1; i <= d_; ++i)
    for (int j = 1; j <= m_; ++j) {
      const int k = (i - 1) * m_ + (j - 1);
      x[k] = std::llround(rho0_[k] * lengths_[i - 1]);
    }
  return x;
}

bool SegmentConfig::admissible(std::span<const double> rho, double tol) const {
  if (static_cast<int>(rho.size()) != d_ * m_) return false;
  for (int i = 1; i <= d_; ++i) {
    const auto cell = rho.subspan((i - 1) * m_, m_);
    if (!flux_[i - 1]->cell_admissible(cell, tol) ||
        !flux_[i]->cell_admissible(cell, tol)) {
      return false;
    }
  }
  return true;
}

bool SegmentConfig::cell_accepts(std::span<const long long> counts, int cell,
                                 int cls) const {
  const int base = (cell - 1) * m_;
  if (counts[base + (cls - 1)] + 1 > jam_count(cell, cls)) return false;
  // Multi-class occupancy constraint, checked on the post-jump densities.
  std::vector<double> post(m_);
  for (int j = 0; j < m_; ++j) {
    post[j] = (static_cast<double>(counts[base + j]) + (j == cls - 1 ? 1.0 : 0.0)) *
              inv_lengths_[cell - 1];
  }
  return flux_[cell - 1]->cell_admissible(post, 1e-9) &&
         flux_[cell]->cell_admissible(post, 1e-9);
}

double SegmentConfig::cfl_step_h() const {
  double vmax = 0.0;
  for (const auto& f : flux_) vmax = std::max(vmax, f->max_wave_speed_kmh());
  if (!(vmax > 0.0)) throw std::invalid_argument("segment: zero wave speed");
  const double lmin = *std::min_element(lengths_.begin(), lengths_.end());
  return lmin / vmax;
}

int SegmentConfig::cell_index(int cell, int cls) const {
  if (cell < 1 || cell > d_ || cls < 1 || cls > m_) {
    throw std::out_of_range("cell_index: (" + std::to_string(cell) + ", " +
                            std::to_string(cls) + ") out of range");
  }
  return (cell - 1) * m_ + (cls - 1);
}

int SegmentConfig::boundary_index(int boundary, int cls) const {
  if (boundary < 0 || boundary > d_ || cls < 1 || cls > m_) {
    throw std::out_of_range("boundary_index: (" + std::to_string(boundary) + ", " +
                            std::to_string(cls) + ") out of range");
  }
  return boundary * m_ + (cls - 1);
}

std::pair<int, int> SegmentConfig::cell_of(int flat) const {
  if (flat < 0 || flat >= d_ * m_) throw std::out_of_range("cell_of: index out of range");
  return {flat / m_ + 1, flat % m_ + 1};
}

std::pair<int, int> SegmentConfig::boundary_of(int flat) const {
  if (flat < 0 || flat >= (d_ + 1) * m_) {
    throw std::out_of_range("boundary_of: index out of range");
  }
  return {flat / m_, flat % m_ + 1};
}

namespace {

// Rates at one boundary, written into out[b*m .. b*m+m).
void boundary_rates(const SegmentConfig& c, std::span<const double> rho, int b,
                    std::span<double> out) {
  const int m = c.class_count();
  const int d = c.cell_count();
  const FluxModel& f = c.boundary_model(b);
  std::span<double> slot = out.subspan(b * m, m);
  if (b == 0) {
    f.inflow_cap(rho.subspan(0, m), slot);
    for (int j = 0; j < m; ++j) slot[j] = std::min(c.arrival_rates()[j], slot[j]);
  } else if (b == d) {
    f.outflow_cap(rho.subspan((d - 1) * m, m), slot);
    for (int j = 0; j < m; ++j) slot[j] = std::min(c.departure_caps()[j], slot[j]);
  } else {
    f.eval(rho.subspan((b - 1) * m, m), rho.subspan(b * m, m), slot);
  }
}

}  // namespace

void assemble_rates(const SegmentConfig& config, std::span<const double> rho,
                    std::span<double> out) {
  if (!config.admissible(rho)) {
    throw DomainError("assemble_rates: state outside the admissible state space");
  }
  for (int b = 0; b <= config.cell_count(); ++b) boundary_rates(config, rho, b, out);
}

RateVector assemble_rates(const SegmentConfig& config, std::span<const double> rho) {
  RateVector q(config.rate_dim());
  assemble_rates(config, rho, q);
  return q;
}

void local_rate_update(const SegmentConfig& config, std::span<const double> rho,
                       int boundary, std::span<double> rates) {
  const int d = config.cell_count();
  for (int b = std::max(0, boundary - 1); b <= std::min(d, boundary + 1); ++b) {
    boundary_rates(config, rho, b, rates);
  }
}

void drift_from_rates(const SegmentConfig& config, std::span<const double> rates,
                      std::span<double> out) {
  const int m = config.class_count();
  for (int i = 1; i <= config.cell_count(); ++i) {
    const double inv = config.inv_length(i);
    for (int j = 0; j < m; ++j) {
      out[(i - 1) * m + j] = (rates[(i - 1) * m + j] - rates[i * m + j]) * inv;
    }
  }
}

void drift(const SegmentConfig& config, std::span<const double> rho,
           std::span<double> out) {
  RateVector q = assemble_rates(config, rho);
  drift_from_rates(config, q, out);
}

std::vector<double> drift(const SegmentConfig& config, std::span<const double> rho) {
  std::vector<double> f(config.state_dim());
  drift(config, rho, f);
  return f;
}

Eigen::SparseMatrix<double> structure_H(const SegmentConfig& config) {
  const int dm = config.state_dim();
  const int m = config.class_count();
  Eigen::SparseMatrix<double> h(dm, config.rate_dim());
  h.reserve(Eigen::VectorXi::Constant(config.rate_dim(), 2));
  for (int k = 0; k < dm; ++k) {
    h.insert(k, k) = 1.0;
    h.insert(k, k + m) = -1.0;
  }
  h.makeCompressed();
  return h;
}

Eigen::VectorXd structure_L_diag(const SegmentConfig& config) {
  Eigen::VectorXd l(config.state_dim());
  const int m = config.class_count();
  for (int i = 1; i <= config.cell_count(); ++i)
    for (int j = 0; j < m; ++j) l[(i - 1) * m + j] = config.inv_length(i);
  return l;
}

Eigen::SparseMatrix<double> rate_gradient(const SegmentConfig& config,
                                          std::span<const double> rho) {
  const int d = config.cell_count();
  const int m = config.class_count();
  Eigen::SparseMatrix<double> dq(config.rate_dim(), config.state_dim());
  dq.reserve(Eigen::VectorXi::Constant(config.rate_dim(), 2 * m));
  std::vector<double> buf(std::max(2 * m * m, m * m));
  std::vector<double> cap(m);

  // Boundary 0: rate_j = min(lambda_j, inflow cap_j(rho_1)). At a tie the
  // branch active for increasing density is the (nonincreasing) cap.
  {
    const FluxModel& f = config.boundary_model(0);
    const auto first = rho.subspan(0, m);
    f.inflow_cap(first, cap);
    f.inflow_cap_gradient(first, std::span<double>(buf.data(), m * m));
    for (int j = 0; j < m; ++j) {
      if (cap[j] <= config.arrival_rates()[j]) {
        for (int k = 0; k < m; ++k) {
          const double g = buf[j * m + k];
          if (g != 0.0) dq.insert(j, k) = g;
        }
      }
    }
  }
  // Interior boundaries: flux on the adjacent pair.
  for (int b = 1; b <= d - 1; ++b) {
    const FluxModel& f = config.boundary_model(b);
    f.gradient(rho.subspan((b - 1) * m, m), rho.subspan(b * m, m),
               std::span<double>(buf.data(), 2 * m * m));
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        const double gu = buf[j * 2 * m + k];
        const double gd = buf[j * 2 * m + m + k];
        if (gu != 0.0) dq.insert(b * m + j, (b - 1) * m + k) = gu;
        if (gd != 0.0) dq.insert(b * m + j, b * m + k) = gd;
      }
    }
  }
  // Boundary d: rate_j = min(nu_j, outflow cap_j(rho_d)). At a tie the cap is
  // nondecreasing, so the constant branch stays active for increasing density.
  {
    const FluxModel& f = config.boundary_model(d);
    const auto last = rho.subspan((d - 1) * m, m);
    f.outflow_cap(last, cap);
    f.outflow_cap_gradient(last, std::span<double>(buf.data(), m * m));
    for (int j = 0; j < m; ++j) {
      if (cap[j] < config.departure_caps()[j]) {
        for (int k = 0; k < m; ++k) {
          const double g = buf[j * m + k];
          if (g != 0.0) dq.insert(d * m + j, (d - 1) * m + k) = g;
        }
      }
    }
  }
  dq.makeCompressed();
  return dq;
}

Eigen::SparseMatrix<double> drift_gradient(const SegmentConfig& config,
                                           std::span<const double> rho) {
  const Eigen::SparseMatrix<double> dq = rate_gradient(config, rho);
  const Eigen::SparseMatrix<double> h = structure_H(config);
  Eigen::SparseMatrix<double> a = h * dq;
  const Eigen::VectorXd l = structure_L_diag(config);
  for (int k = 0; k < a.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
      it.valueRef() *= l[it.row()];
    }
  }
  a.makeCompressed();
  return a;
}

double SegmentConfig::kink_distance(std::span<const double> rho) const {
  double kd = std::numeric_limits<double>::infinity();
  kd = std::min(kd, flux_[0]->inflow_kink_distance(rho.subspan(0, m_), lambda_));
  for (int b = 1; b <= d_ - 1; ++b) {
    kd = std::min(kd, flux_[b]->kink_distance(rho.subspan((b - 1) * m_, m_),
                                              rho.subspan(b * m_, m_)));
  }
  kd = std::min(kd, flux_[d_]->outflow_kink_distance(rho.subspan((d_ - 1) * m_, m_), nu_));
  return kd;
}

}  // namespace sctm
