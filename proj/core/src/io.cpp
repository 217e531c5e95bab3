#include "kmselect/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "kmselect/errors.hpp"

namespace kmselect {

namespace {

bool parse_double(const std::string& token, double* out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, *out);
    return ec == std::errc{} && ptr == end;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> tokens;
    std::string token;
    std::stringstream ss(line);
    while (std::getline(ss, token, ',')) tokens.push_back(token);
    if (!line.empty() && line.back() == ',') tokens.emplace_back();
    return tokens;
}

} // namespace

DataMatrix read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("read_csv: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto tokens = split_commas(line);
        std::vector<double> row;
        row.reserve(tokens.size());
        bool numeric = true;
        for (const auto& token : tokens) {
            double v = 0.0;
            if (!parse_double(token, &v)) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (first) {
                first = false;  // header row
                continue;
            }
            throw Error("read_csv: non-numeric entry in " + path);
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw Error("read_csv: ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("read_csv: no data rows in " + path);
    Matrix values(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return DataMatrix(std::move(values));
}

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void write_csv(const Matrix& values, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("write_csv: cannot open " + path);
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(values(i, j));
        }
        out << '\n';
    }
}

nlohmann::json interval_set_to_json(const IntervalSet& set) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Interval& iv : set.intervals()) {
        nlohmann::json pair = nlohmann::json::array();
        if (std::isinf(iv.lo)) pair.push_back(iv.lo < 0 ? "-inf" : "inf");
        else pair.push_back(iv.lo);
        if (std::isinf(iv.hi)) pair.push_back(iv.hi < 0 ? "-inf" : "inf");
        else pair.push_back(iv.hi);
        arr.push_back(pair);
    }
    return arr;
}

IntervalSet interval_set_from_json(const nlohmann::json& j) {
    auto endpoint = [](const nlohmann::json& v) -> double {
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            if (s == "inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf") return -std::numeric_limits<double>::infinity();
            throw Error("interval_set_from_json: bad sentinel " + s);
        }
        return v.get<double>();
    };
    std::vector<Interval> intervals;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2)
            throw Error("interval_set_from_json: expected [lo, hi] pairs");
        intervals.push_back({endpoint(pair[0]), endpoint(pair[1])});
    }
    return IntervalSet::from_intervals(std::move(intervals));
}

nlohmann::json result_to_json(const SelectiveTestResult& result) {
    return nlohmann::json{
        {"schema", 1},
        {"p_value", result.p_value},
        {"stat", result.stat},
        {"scale", result.scale},
        {"dof", result.dof},
        {"sigma_source", sigma_source_name(result.sigma_source)},
        {"pair", {result.pair.first + 1, result.pair.second + 1}},
        {"truncation", interval_set_to_json(result.truncation)},
        {"trace", {{"K", result.K}, {"T", result.T}, {"seed", result.seed},
                   {"converged", result.converged}}},
    };
}

std::string result_to_csv_row(const SelectiveTestResult& result) {
    std::ostringstream row;
    row << (result.pair.first + 1) << ',' << (result.pair.second + 1) << ','
        << format_double(result.p_value) << ',' << format_double(result.stat) << ','
        << format_double(result.scale) << ',' << sigma_source_name(result.sigma_source);
    return row.str();
}

std::uint64_t fnv1a_file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("fnv1a_file_digest: cannot open " + path);
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    char buffer[4096];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        const auto count = in.gcount();
        for (std::streamsize i = 0; i < count; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001B3ULL;
        }
        if (!in) break;
    }
    return hash;
}

} // namespace kmselect
