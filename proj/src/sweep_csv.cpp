#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "ampcs/experiments.hpp"

namespace ampcs {
namespace {

void write_header_comment(const SweepResult& result, std::ostream& out) {
  out << "# " << version_string() << " kind=" << result.kind;
  for (const auto& [key, value] : result.config) out << ' ' << key << '=' << value;
  out << '\n';
}

}  // namespace

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  write_header_comment(result, out);
  out << "mn,km,M,K,snr_db,label,trials,successes,success_rate,nmse_mean,nmse_median,"
         "mean_iterations,divergences,base_seed\n";
  for (const auto& r : result.rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.mn, r.km, r.M, r.K,
                       r.noiseless ? std::string("noiseless") : fmt::format("{}", r.snr_db), r.label,
                       r.trials, r.successes, r.success_rate(), r.nmse_mean, r.nmse_median,
                       r.mean_iterations, r.divergences, r.seed);
  }
}

void write_contour_csv(const SweepResult& result, const std::vector<ContourPoint>& contour,
                       std::ostream& out) {
  write_header_comment(result, out);
  out << "label,mn,km\n";
  for (const auto& p : contour) out << fmt::format("{},{},{}\n", p.label, p.mn, p.km);
}

void write_file_atomically(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  std::filesystem::path temp = target;
  temp += ".partial";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", temp.string()));
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("error writing '{}'", temp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(temp, target, ec);
  if (ec) {
    std::filesystem::remove(temp);
    throw std::runtime_error(fmt::format("cannot move output into '{}': {}", path, ec.message()));
  }
}

}  // namespace ampcs
