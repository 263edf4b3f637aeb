#include "qwsim/timestamps.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <istream>
#include <ostream>

namespace qwsim {

bool TimestampStream::sorted() const {
    return std::is_sorted(times.begin(), times.end());
}

void require_sorted(const TimestampStream& s, const char* who) {
    if (!s.sorted()) throw std::domain_error(std::string(who) + ": stream must be sorted ascending");
}

TimestampStream merge_streams(const TimestampStream& a, const TimestampStream& b, std::string channel) {
    require_sorted(a, "merge_streams");
    require_sorted(b, "merge_streams");
    TimestampStream out;
    out.channel = std::move(channel);
    out.times.resize(a.times.size() + b.times.size());
    std::merge(a.times.begin(), a.times.end(), b.times.begin(), b.times.end(), out.times.begin());
    return out;
}

void write_binary(const TimestampStream& s, std::ostream& out) {
    for (TimePs t : s.times) {
        const auto u = static_cast<std::uint64_t>(t);
        std::array<unsigned char, 8> bytes{};
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
        out.write(reinterpret_cast<const char*>(bytes.data()), 8);
    }
}

TimestampStream read_binary(std::istream& in, std::string channel) {
    TimestampStream s;
    s.channel = std::move(channel);
    std::array<unsigned char, 8> bytes{};
    while (in.read(reinterpret_cast<char*>(bytes.data()), 8)) {
        std::uint64_t u = 0;
        for (int i = 7; i >= 0; --i) u = (u << 8) | bytes[i];
        s.times.push_back(static_cast<TimePs>(u));
    }
    return s;
}

void write_csv(const TimestampStream& s, std::ostream& out) {
    out << "time_ps\n";
    for (TimePs t : s.times) out << t << "\n";
}

TimestampStream read_csv(std::istream& in, std::string channel) {
    TimestampStream s;
    s.channel = std::move(channel);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        s.times.push_back(std::stoll(line));
    }
    return s;
}

}  // namespace qwsim
