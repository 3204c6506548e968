#include "gvfpred/dataset.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "gvfpred/util.hpp"

namespace gvfpred {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) return kMissing;
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size()) return kMissing;
    if (!std::isfinite(v)) return kMissing;
    return v;
}

}  // namespace

bool is_missing(double v) {
    return std::isnan(v);
}

Dataset load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty data file: " + path);
    auto header = split_csv_line(trim(line));
    if (header.size() < 2 || trim(header.front()) != "timestamp" || trim(header.back()) != "mode")
        throw DataError("bad header (want timestamp,...,mode): " + path);

    const std::size_t width = header.size() - 2;
    Dataset d;
    d.meta.resize(width);
    for (std::size_t i = 0; i < width; ++i) d.meta[i].name = trim(header[i + 1]);

    std::size_t line_no = 1;
    std::int64_t prev_ts = std::numeric_limits<std::int64_t>::min();
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        auto cells = split_csv_line(t);
        if (cells.size() != header.size())
            throw DataError(path + ":" + std::to_string(line_no) + ": row width " +
                            std::to_string(cells.size()) + " != header width " +
                            std::to_string(header.size()));

        RawRecord r;
        {
            std::string ts = trim(cells[0]);
            const char* begin = ts.c_str();
            char* end = nullptr;
            long long v = std::strtoll(begin, &end, 10);
            if (ts.empty() || end != begin + ts.size())
                throw DataError(path + ":" + std::to_string(line_no) + ": bad timestamp '" + ts + "'");
            r.timestamp = v;
        }
        if (r.timestamp <= prev_ts)
            throw DataError(path + ":" + std::to_string(line_no) + ": non-monotone timestamp " +
                            std::to_string(r.timestamp));
        prev_ts = r.timestamp;

        r.values.reserve(width);
        for (std::size_t i = 0; i < width; ++i) r.values.push_back(parse_cell(cells[i + 1]));
        r.mode = trim(cells.back());
        d.records.push_back(std::move(r));
    }

    auto m = compute_meta(d);
    for (std::size_t i = 0; i < width; ++i) {
        d.meta[i].min = m[i].min;
        d.meta[i].max = m[i].max;
        d.meta[i].constant = m[i].constant;
    }
    return d;
}

void save_records(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no platform newline translation
    if (!out) throw DataError("cannot open file for writing: " + path);
    out << "timestamp";
    for (const auto& m : d.meta) out << ',' << m.name;
    out << ",mode\n";
    for (const auto& r : d.records) {
        out << r.timestamp;
        for (double v : r.values) {
            out << ',';
            if (!is_missing(v)) out << format_double(v);
        }
        out << ',' << r.mode << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

std::vector<SensorMeta> compute_meta(const Dataset& d) {
    return compute_meta(d, 0, d.size());
}

std::vector<SensorMeta> compute_meta(const Dataset& d, std::size_t begin, std::size_t end) {
    end = std::min(end, d.size());
    std::vector<SensorMeta> meta(d.width());
    for (std::size_t i = 0; i < d.width(); ++i) {
        meta[i].name = d.meta[i].name;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        bool seen = false;
        for (std::size_t t = begin; t < end; ++t) {
            double v = d.records[t].values[i];
            if (is_missing(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            seen = true;
        }
        if (!seen) {
            lo = hi = 0.0;  // all-missing column behaves as constant
        }
        meta[i].min = lo;
        meta[i].max = hi;
        meta[i].constant = (lo == hi);
    }
    return meta;
}

Dataset select_sensors(const Dataset& d, const std::vector<std::size_t>& keep) {
    Dataset out;
    out.meta.reserve(keep.size());
    for (std::size_t i : keep) {
        if (i >= d.width()) throw DataError("select_sensors: column index out of range");
        out.meta.push_back(d.meta[i]);
    }
    out.records.reserve(d.size());
    for (const auto& r : d.records) {
        RawRecord nr;
        nr.timestamp = r.timestamp;
        nr.mode = r.mode;
        nr.values.reserve(keep.size());
        for (std::size_t i : keep) nr.values.push_back(r.values[i]);
        out.records.push_back(std::move(nr));
    }
    return out;
}

std::pair<Dataset, std::vector<std::string>> remove_constant_sensors(const Dataset& d) {
    auto meta = compute_meta(d);
    std::vector<std::size_t> keep;
    std::vector<std::string> removed;
    for (std::size_t i = 0; i < meta.size(); ++i) {
        if (meta[i].constant)
            removed.push_back(meta[i].name);
        else
            keep.push_back(i);
    }
    Dataset out = select_sensors(d, keep);
    for (std::size_t j = 0; j < keep.size(); ++j) out.meta[j] = meta[keep[j]];
    return {std::move(out), std::move(removed)};
}

RawRecord impute_missing(const RawRecord& r) {
    RawRecord out = r;
    for (double& v : out.values)
        if (is_missing(v)) v = 0.0;
    return out;
}

Dataset impute_missing(Dataset d) {
    for (auto& r : d.records)
        for (double& v : r.values)
            if (is_missing(v)) v = 0.0;
    return d;
}

Dataset subsample(const Dataset& d, std::size_t k) {
    if (k == 0) throw DataError("subsample: k must be >= 1");
    if (k == 1) return d;
    Dataset out;
    out.meta = d.meta;
    out.records.reserve((d.size() + k - 1) / k);
    for (std::size_t i = 0; i < d.size(); i += k) out.records.push_back(d.records[i]);
    return out;
}

Split split_dataset(const Dataset& d, const SplitSpec& s) {
    if (!(s.train_end > 0 && s.train_end < s.validation_end && s.validation_end <= d.size()))
        throw DataError("split_dataset: need 0 < train_end < validation_end <= N (N=" +
                        std::to_string(d.size()) + ")");
    Split out;
    out.train.meta = d.meta;
    out.validation.meta = d.meta;
    out.deployment.meta = d.meta;
    out.train.records.assign(d.records.begin(), d.records.begin() + s.train_end);
    out.validation.records.assign(d.records.begin() + s.train_end,
                                  d.records.begin() + s.validation_end);
    out.deployment.records.assign(d.records.begin() + s.validation_end, d.records.end());
    return out;
}

}  // namespace gvfpred
