#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rclab/analysis.hpp"

namespace rclab {

inline constexpr const char* kToolVersion = "0.1.0";

class RecordReadError : public std::runtime_error {
public:
    RecordReadError(const std::string& path, std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// EstimateRecord plus provenance: the resolved experiment config it came from,
/// a hash of that config, the tool version and the wall-clock time.
struct MeasurementRecord {
    EstimateRecord estimate;
    nlohmann::json config = nlohmann::json::object();
    std::string config_hash;
    std::string tool_version = kToolVersion;
    double wall_clock_seconds = 0.0;
};

nlohmann::json to_json(const MeasurementRecord& r);
MeasurementRecord record_from_json(const nlohmann::json& j);

/// Compact JSON with doubles written as %.17g; non-finite doubles become the
/// strings "NaN", "Infinity", "-Infinity". Object keys keep nlohmann's sorted order.
std::string dump_json(const nlohmann::json& j);
/// One line, newline included.
std::string serialize_record(const MeasurementRecord& r);

/// Appends records to `path`, one line each; every line goes out in a single
/// write on an O_APPEND descriptor.
void write_records(const std::vector<MeasurementRecord>& records, const std::string& path);
/// Throws RecordReadError naming the line of the first malformed record.
std::vector<MeasurementRecord> read_records(const std::string& path);

/// Summary table: one row per record.
void write_csv(const std::vector<MeasurementRecord>& records, const std::string& path);

/// 64-bit FNV-1a of dump_json(config), as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

}  // namespace rclab
