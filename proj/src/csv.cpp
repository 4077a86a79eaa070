#include "ambientlink/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ambientlink/error.hpp"

namespace ambientlink {

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::string config_hash, std::vector<std::string> columns)
    : hash_(std::move(config_hash)), columns_(std::move(columns))
{
}

CsvTable& CsvTable::row(const std::vector<std::string>& cells)
{
    if (cells.size() != columns_.size()) fail(ErrorKind::validation, "csv row has the wrong number of cells");
    rows_.push_back(cells);
    return *this;
}

std::string CsvTable::str() const
{
    std::ostringstream os;
    os << "# config_hash=" << hash_ << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
    return os.str();
}

void CsvTable::save(const std::string& path) const
{
    save_text(path, str());
}

CsvTable series_table(const EcsdSeries& series, const std::string& config_hash)
{
    CsvTable t(config_hash, {"k", "t_center[time]", "re_S[field^2*time]", "im_S[field^2*time]"});
    for (std::size_t k = 0; k < series.size(); ++k)
        t.row({std::to_string(k), fmt(series.centers[k]), fmt(series.values[k].real()), fmt(series.values[k].imag())});
    return t;
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    return out;
}

double parse_double(const std::string& s, const std::string& where)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(ErrorKind::validation, where + ": bad number '" + s + "'");
    return v;
}

}

EcsdSeries read_series_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) fail(ErrorKind::io, "cannot open " + path);
    EcsdSeries s;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        const auto cells = split(line);
        const std::string where = path + ":" + std::to_string(lineno);
        if (cells.size() != 4) fail(ErrorKind::validation, where + ": expected 4 columns");
        if (parse_double(cells[0], where) != static_cast<double>(s.size()))
            fail(ErrorKind::validation, where + ": slot index out of sequence");
        s.centers.push_back(parse_double(cells[1], where));
        s.values.emplace_back(parse_double(cells[2], where), parse_double(cells[3], where));
    }
    if (s.values.empty()) fail(ErrorKind::validation, path + ": no series rows");
    return s;
}

CsvTable decode_table(const DecodeResult& result, const std::string& config_hash)
{
    CsvTable t(config_hash, {"k", "re_delta[field^2*time]", "im_delta[field^2*time]", "margin[1]", "bit"});
    for (std::size_t k = 0; k < result.deltas.size(); ++k)
        t.row({std::to_string(k), fmt(result.deltas[k].real()), fmt(result.deltas[k].imag()), fmt(result.margins[k]),
               std::to_string(result.bits[k])});
    return t;
}

void save_text(const std::string& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorKind::io, "cannot open " + path + " for writing");
    os << text;
    if (!os) fail(ErrorKind::io, "write failed: " + path);
}

std::string load_text(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::io, "cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}
