#ifndef KMSELECT_IO_HPP
#define KMSELECT_IO_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "kmselect/data_matrix.hpp"
#include "kmselect/inference.hpp"
#include "kmselect/interval_set.hpp"

namespace kmselect {

// Comma-separated values, row = observation. An optional single header row
// is auto-detected by a non-numeric first line.
DataMatrix read_csv(const std::string& path);

// Values serialized with 17 significant digits so a round trip is
// bit-identical.
void write_csv(const Matrix& values, const std::string& path);

std::string format_double(double v);

// JSON as a list of [lo, hi] pairs with "inf"/"-inf" sentinels.
nlohmann::json interval_set_to_json(const IntervalSet& set);
IntervalSet interval_set_from_json(const nlohmann::json& j);

nlohmann::json result_to_json(const SelectiveTestResult& result);
std::string result_to_csv_row(const SelectiveTestResult& result);

// FNV-1a content hash used in run manifests.
std::uint64_t fnv1a_file_digest(const std::string& path);

} // namespace kmselect

#endif
