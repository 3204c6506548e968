#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gvfpred {

// Error categories map onto CLI exit codes: usage = 1, data = 2, numeric = 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent seed for a named sub-stream of a root seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);

std::uint64_t hash_file(const std::string& path);

// Shortest decimal form that round-trips the exact double. Every number we
// write to a log or report goes through this so reruns are byte-comparable.
std::string format_double(double v);

std::string to_hex(std::uint64_t v);

}  // namespace gvfpred
