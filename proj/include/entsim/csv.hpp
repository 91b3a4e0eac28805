#pragma once

#include <string>
#include <vector>

#include "entsim/spectral.hpp"
#include "entsim/state_analysis.hpp"

namespace entsim::csv {

// shortest round-trip-exact decimal form; identical doubles always produce
// identical bytes, which is what the determinism contract rides on
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// generic rows-of-cells table with a header line
void write_table(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

// Layout: first line "signal_nm,<axis values>", second "idler_nm,<axis
// values>", then one line per signal sample holding re,im pairs across the
// idler axis. `stride` exports every stride-th sample in both directions.
void write_jsa(const std::string& path, const JsaGrid& jsa, int stride = 1);
JsaGrid read_jsa(const std::string& path);

// 4x4 real block then 4x4 imaginary block over {HH, HV, VH, VV}
void write_density_matrix(const std::string& path, const DensityMatrix2Q& rho);
Mat4c read_density_matrix_elements(const std::string& path);

void write_records(const std::string& path, const std::vector<MeasurementRecord>& records);
std::vector<MeasurementRecord> read_records(const std::string& path);

} // namespace entsim::csv
