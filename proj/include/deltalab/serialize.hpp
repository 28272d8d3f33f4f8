#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "deltalab/bsop.hpp"
#include "deltalab/convlab.hpp"
#include "deltalab/domain.hpp"
#include "deltalab/grid.hpp"
#include "deltalab/kernel.hpp"
#include "deltalab/potential.hpp"
#include "deltalab/resolvent.hpp"

namespace deltalab {

using json = nlohmann::json;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);

/// Hex FNV-1a of the canonical (sorted-key, compact) dump of `config`.
std::string config_hash(const json& config);

json to_json(const RadialPotential& V);
RadialPotential potential_from_json(const json& j);

json to_json(const RadialGrid& grid);
/// Rebuilds the grid from its breaks and order; node/weight arrays are
/// checked against the rebuilt grid when present.
RadialGrid grid_from_json(const json& j);

json to_json(const Region& region);
Region region_from_json(const json& j);

json to_json(const ResonanceData& res, const std::vector<double>& lambdas);
json to_json(const ConvergenceReport& report);

/// Dense kernel with grid metadata. Binary layout (little endian):
/// "DLK1", uint64 n, int32 sector, 16 bytes of config hash, n nodes,
/// n weights, n*n row-major doubles of the nodal kernel K(r_i, r_j) w_j.
void write_kernel_binary(std::ostream& os, const RadialGrid& grid,
                         const Eigen::MatrixXd& folded, int sector,
                         const std::string& hash);

struct KernelFile {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::MatrixXd nodal;
  int sector = 0;
  std::string hash;
};
KernelFile read_kernel_binary(std::istream& is);
json kernel_json(const RadialGrid& grid, const Eigen::MatrixXd& folded, int sector,
                 const std::string& tag);

/// CSV header line for convergence reports.
inline constexpr const char* kReportColumns =
    "eps,norm_l0,norm_ann_l2,norm_ann_h2,scalar_gap,valid";

/// "# config_hash: <hash>" line, the header, then one row per eps.
void write_report_csv(std::ostream& os, const ConvergenceReport& report,
                      const std::string& hash);

/// gnuplot commands plotting the decaying columns against eps on log axes.
void write_report_gnuplot(std::ostream& os, const ConvergenceReport& report,
                          const std::string& csv_name, const std::string& hash);

/// Shortest round-trip text for a double ("nan", "inf" for non-finite).
std::string format_double(double x);

}  // namespace deltalab
