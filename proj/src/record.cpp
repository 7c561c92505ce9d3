#include "cross/record.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string_view>

namespace cross {

std::string format_value(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_record_csv(const SimulationRecord& rec, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << "t,S,ED\n";
    for (std::size_t k = 0; k < rec.size(); ++k) {
        os << format_value(rec.t[k]) << ',' << format_value(rec.s[k]) << ','
           << format_value(rec.ed[k]) << '\n';
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

namespace {

double parse_field(std::string_view s, const std::filesystem::path& path) {
    double v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("bad numeric field '" + std::string(s) + "' in " +
                                 path.string());
    }
    return v;
}

}  // namespace

SimulationRecord read_record_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    std::string line;
    if (!std::getline(is, line) || (line != "t,S,ED" && line != "t,S,ED\r")) {
        throw std::runtime_error("missing 't,S,ED' header in " + path.string());
    }
    SimulationRecord rec;
    while (std::getline(is, line)) {
        std::string_view sv(line);
        if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
        if (sv.empty()) continue;
        auto c1 = sv.find(',');
        auto c2 = sv.find(',', c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
            throw std::runtime_error("malformed row '" + line + "' in " + path.string());
        }
        rec.push(parse_field(sv.substr(0, c1), path),
                 parse_field(sv.substr(c1 + 1, c2 - c1 - 1), path),
                 parse_field(sv.substr(c2 + 1), path));
    }
    return rec;
}

}  // namespace cross
