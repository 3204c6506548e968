#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gvfpred {

// One telemetry row. Sensor readings use NaN as the missing-value marker
// until impute_missing replaces them with zeros.
struct RawRecord {
    std::int64_t timestamp = 0;
    std::vector<double> values;
    std::string mode;
};

struct SensorMeta {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    bool constant = false;
};

// Ordered telemetry log. Records never get reordered after load; meta holds
// one entry per sensor column (min/max/constant over whatever reference log
// it was last computed from).
struct Dataset {
    std::vector<RawRecord> records;
    std::vector<SensorMeta> meta;

    std::size_t size() const { return records.size(); }
    std::size_t width() const { return meta.size(); }
};

// train = [0, train_end), validation = [train_end, validation_end),
// deployment = [validation_end, N). Indices count records post-subsampling.
struct SplitSpec {
    std::size_t train_end = 0;
    std::size_t validation_end = 0;
};

struct Split {
    Dataset train;
    Dataset validation;
    Dataset deployment;
};

bool is_missing(double v);

// CSV contract: header row `timestamp,<sensor...>,mode`; timestamp is integer
// seconds and must strictly increase; unparseable sensor cells load as
// missing. Inconsistent row width or non-monotone timestamps are hard errors.
Dataset load_records(const std::string& path);
void save_records(const Dataset& d, const std::string& path);

// Min/max/constant recomputed over d's records (missing cells ignored).
std::vector<SensorMeta> compute_meta(const Dataset& d);

// Same, restricted to records [begin, end) — the reference-log variant.
std::vector<SensorMeta> compute_meta(const Dataset& d, std::size_t begin, std::size_t end);

// Keep the given columns, preserving order.
Dataset select_sensors(const Dataset& d, const std::vector<std::size_t>& keep);

std::pair<Dataset, std::vector<std::string>> remove_constant_sensors(const Dataset& d);

RawRecord impute_missing(const RawRecord& r);
Dataset impute_missing(Dataset d);

// Keeps records at indices 0, k, 2k, ...
Dataset subsample(const Dataset& d, std::size_t k);

Split split_dataset(const Dataset& d, const SplitSpec& s);

}  // namespace gvfpred
