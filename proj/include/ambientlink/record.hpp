#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ambientlink {

struct FieldRecord {
    double dt = 0.0;
    double t0 = 0.0;
    std::vector<std::vector<double>> samples;  // [receiver][sample]
    std::vector<double> slot_boundaries;

    std::size_t size() const { return samples.empty() ? 0 : samples.front().size(); }
    double time(std::size_t j) const { return t0 + dt * static_cast<double>(j); }
};

// Contiguous view of both receivers over a common time grid; element j sits at
// t0 + (first + j) dt.
struct RecordView {
    double dt = 0.0;
    double t0 = 0.0;
    std::span<const double> r;
    std::span<const double> rp;
    std::size_t first = 0;

    std::size_t size() const { return r.size(); }
    double time(std::size_t j) const { return t0 + dt * static_cast<double>(first + j); }
};

inline RecordView view_of(const FieldRecord& rec, std::size_t a = 0, std::size_t b = 1)
{
    return {rec.dt, rec.t0, rec.samples.at(a), rec.samples.at(b)};
}

// Little-endian binary layout documented in docs/fld_format.md.
void write_fld(const FieldRecord& rec, const std::string& path);
FieldRecord read_fld(const std::string& path);

}
