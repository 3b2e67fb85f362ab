#include "sctm/output.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace sctm {

std::string format_number(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);  // binary: no platform newline games
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

}  // namespace

void write_cell_table(const std::filesystem::path& file,
                      const std::vector<double>& time_h, int cells, int classes,
                      const std::vector<double>& values_snapshot_major,
                      const std::string& unit) {
  std::ofstream out = open_out(file);
  out << "time_s,cell,class,value,unit\n";
  const int dm = cells * classes;
  for (std::size_t k = 0; k < time_h.size(); ++k) {
    const std::string t = format_number(time_h[k] * 3600.0);
    for (int i = 1; i <= cells; ++i) {
      for (int j = 1; j <= classes; ++j) {
        out << t << ',' << i << ',' << j << ','
            << format_number(values_snapshot_major[k * dm + (i - 1) * classes + (j - 1)])
            << ',' << unit << '\n';
      }
    }
  }
}

void write_boundary_table(const std::filesystem::path& file,
                          const std::vector<double>& time_h, int boundaries,
                          int classes, const std::vector<double>& values_snapshot_major,
                          const std::string& unit) {
  std::ofstream out = open_out(file);
  out << "time_s,boundary,class,value,unit\n";
  const int rdim = boundaries * classes;
  for (std::size_t k = 0; k < time_h.size(); ++k) {
    const std::string t = format_number(time_h[k] * 3600.0);
    for (int b = 0; b < boundaries; ++b) {
      for (int j = 1; j <= classes; ++j) {
        out << t << ',' << b << ',' << j << ','
            << format_number(values_snapshot_major[k * rdim + b * classes + (j - 1)])
            << ',' << unit << '\n';
      }
    }
  }
}

void write_traveltime_table(const std::filesystem::path& file,
                            const std::vector<TravelTimeDistribution>& dists,
                            bool pdf) {
  std::ofstream out = open_out(file);
  out << "x_s,origin_cell,destination_cell,class,value,unit\n";
  for (const auto& dist : dists) {
    const auto& q = dist.query;
    std::vector<double> values;
    std::string unit;
    if (pdf) {
      values = travel_time_pdf(dist);
      // density per hour -> per second
      for (double& v : values) v /= 3600.0;
      unit = "per_s";
    } else {
      values = dist.cdf;
      unit = "probability";
    }
    for (std::size_t n = 0; n < dist.grid_h.size(); ++n) {
      out << format_number(dist.grid_h[n] * 3600.0) << ',' << q.origin_cell << ','
          << q.origin_cell + q.offset << ',' << q.vehicle_class << ','
          << format_number(values[n]) << ',' << unit << '\n';
    }
  }
}

void write_metadata(ResultBundle& bundle, const std::string& file) {
  std::ofstream out = open_out(bundle.out_dir / file);
  out << bundle.metadata.dump(2) << '\n';
  bundle.files.push_back(file);
}

}  // namespace sctm
