#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "densfda/density.hpp"
#include "densfda/fpca.hpp"
#include "densfda/frechet.hpp"
#include "densfda/regression.hpp"
#include "densfda/simulation.hpp"
#include "densfda/transforms.hpp"

namespace densfda::io {

/// Column-major numeric table: a first column (`x` or `t`) and one column per
/// subject, headed by subject ids.
struct Table {
  std::string first_column = "x";
  std::vector<std::string> ids;
  std::vector<double> x;
  std::vector<std::vector<double>> columns;
};

std::string format_double(double v);  // 17 significant digits

Table read_table(std::istream& in);
Table read_table(const std::filesystem::path& path);
void write_table(std::ostream& out, const Table& table);
void write_table(const std::filesystem::path& path, const Table& table);

/// The first column must be a uniform grid (to 1e-9 of its spacing).
Grid grid_from_points(const std::vector<double>& x);

std::vector<DensityFn> densities_from_table(const Table& table);
Table table_from_densities(const std::vector<DensityFn>& densities, std::vector<std::string> ids = {});

std::vector<DensityFn> read_densities(const std::filesystem::path& path, std::vector<std::string>* ids = nullptr);
void write_densities(const std::filesystem::path& path, const std::vector<DensityFn>& densities,
                     std::vector<std::string> ids = {});

/// `subject_id,value` rows, grouped by subject in order of first appearance.
std::vector<std::pair<std::string, std::vector<double>>> read_samples(const std::filesystem::path& path);

/// `subject_id,y` rows; empty, NA and NaN responses are dropped.
std::vector<std::pair<std::string, double>> read_responses(const std::filesystem::path& path);

/// Transformed functions with a leading `# transform=... delta=... x_lo=...
/// x_hi=... x_m=...` line so the inverse can restore the native grid.
void write_transformed(const std::filesystem::path& path, const std::vector<TransformedFn>& fns,
                       std::vector<std::string> ids = {});
std::vector<TransformedFn> read_transformed(const std::filesystem::path& path, std::vector<std::string>* ids = nullptr);

std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t file_digest(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

nlohmann::json to_json(const DensityFn& f);
DensityFn density_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EigenSystem& system, const std::vector<double>& fve_l2 = {});
nlohmann::json to_json(const FrechetReport& report);
nlohmann::json to_json(const SimulationResult& result);
nlohmann::json to_json(const std::vector<RegressionRow>& rows);

}  // namespace densfda::io
