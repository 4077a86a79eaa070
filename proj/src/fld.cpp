#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ambientlink/error.hpp"
#include "ambientlink/record.hpp"

namespace ambientlink {

namespace {

constexpr char magic[8] = {'A', 'M', 'B', 'F', 'L', 'D', '0', '1'};
constexpr std::uint32_t version = 1;

static_assert(std::endian::native == std::endian::little, "fld I/O assumes a little-endian host");

template <class T>
void put(std::ofstream& os, T v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& is, const std::string& path)
{
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) fail(ErrorKind::io, path + ": truncated fld header");
    return v;
}

}

void write_fld(const FieldRecord& rec, const std::string& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorKind::io, "cannot open " + path + " for writing");
    const std::uint64_t n = rec.size();
    for (const auto& s : rec.samples)
        if (s.size() != n) fail(ErrorKind::validation, "write_fld: receivers have different lengths");
    os.write(magic, sizeof magic);
    put(os, version);
    put(os, static_cast<std::uint32_t>(rec.samples.size()));
    put(os, rec.dt);
    put(os, rec.t0);
    put(os, n);
    put(os, static_cast<std::uint64_t>(rec.slot_boundaries.size()));
    for (double b : rec.slot_boundaries) put(os, b);
    for (const auto& s : rec.samples)
        os.write(reinterpret_cast<const char*>(s.data()), static_cast<std::streamsize>(s.size() * sizeof(double)));
    if (!os) fail(ErrorKind::io, "write failed: " + path);
}

FieldRecord read_fld(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::io, "cannot open " + path);
    char m[8];
    if (!is.read(m, sizeof m) || std::memcmp(m, magic, sizeof m) != 0) fail(ErrorKind::io, path + ": not an fld file");
    if (get<std::uint32_t>(is, path) != version) fail(ErrorKind::io, path + ": unsupported fld version");
    const auto receivers = get<std::uint32_t>(is, path);
    FieldRecord rec;
    rec.dt = get<double>(is, path);
    rec.t0 = get<double>(is, path);
    const auto n = get<std::uint64_t>(is, path);
    const auto nb = get<std::uint64_t>(is, path);
    if (nb > (1u << 30) || n > (std::uint64_t{1} << 36)) fail(ErrorKind::io, path + ": implausible fld sizes");
    rec.slot_boundaries.resize(nb);
    for (auto& b : rec.slot_boundaries) b = get<double>(is, path);
    rec.samples.assign(receivers, std::vector<double>(n));
    for (auto& s : rec.samples) {
        if (!is.read(reinterpret_cast<char*>(s.data()), static_cast<std::streamsize>(n * sizeof(double))))
            fail(ErrorKind::io, path + ": truncated sample data");
    }
    return rec;
}

}
