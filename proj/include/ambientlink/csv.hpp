#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ambientlink/ecsd.hpp"
#include "ambientlink/link.hpp"

namespace ambientlink {

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);
// Shortest text that round-trips a double.
std::string fmt(double v);

// Every table starts with "# config_hash=<hex>", then one header row whose column
// names carry units in brackets.
class CsvTable {
public:
    CsvTable(std::string config_hash, std::vector<std::string> columns);
    CsvTable& row(const std::vector<std::string>& cells);
    std::string str() const;
    void save(const std::string& path) const;

private:
    std::string hash_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

CsvTable series_table(const EcsdSeries& series, const std::string& config_hash);
EcsdSeries read_series_csv(const std::string& path);
CsvTable decode_table(const DecodeResult& result, const std::string& config_hash);

void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);

}
