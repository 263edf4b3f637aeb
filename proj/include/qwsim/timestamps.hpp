#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qwsim/types.hpp"

namespace qwsim {

/// Ordered photon-arrival or detector-click times in integer picoseconds.
/// Arrival streams may contain ties (a bunched pair shares one creation
/// time); click streams are strictly ascending once dead-time filtering and
/// grid quantization have been applied.
struct TimestampStream {
    std::vector<TimePs> times;
    std::string channel;

    std::size_t size() const { return times.size(); }
    bool sorted() const;
};

void require_sorted(const TimestampStream& s, const char* who);

/// Merge two sorted streams into one sorted stream.
TimestampStream merge_streams(const TimestampStream& a, const TimestampStream& b, std::string channel);

/// Binary export: little-endian unsigned 64-bit picosecond records.
void write_binary(const TimestampStream& s, std::ostream& out);
TimestampStream read_binary(std::istream& in, std::string channel);

/// One timestamp per line.
void write_csv(const TimestampStream& s, std::ostream& out);
TimestampStream read_csv(std::istream& in, std::string channel);

}  // namespace qwsim
