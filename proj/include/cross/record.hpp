#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cross {

/// Time series of one simulation run: price and excess demand per step,
/// plus run metadata and any warnings emitted by the solver.
struct SimulationRecord {
    std::vector<double> t;
    std::vector<double> s;
    std::vector<double> ed;
    std::map<std::string, std::string> info;
    std::vector<std::string> warnings;

    void push(double time, double price, double excess_demand) {
        t.push_back(time);
        s.push_back(price);
        ed.push_back(excess_demand);
    }
    std::size_t size() const { return t.size(); }
};

/// Writes "t,S,ED" rows with 17 significant digits, locale independent;
/// values survive a parse round trip bit-for-bit.
void write_record_csv(const SimulationRecord& rec, const std::filesystem::path& path);

SimulationRecord read_record_csv(const std::filesystem::path& path);

/// 17-significant-digit, locale-independent rendering of a double.
std::string format_value(double v);

}  // namespace cross
