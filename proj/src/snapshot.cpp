#include "ascal/snapshot.hpp"

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "ascal/errors.hpp"
#include "ascal/grid.hpp"

namespace ascal {

namespace {

constexpr char kMagic[4] = {'A', 'S', 'F', '1'};
constexpr std::uint64_t kMaxAxisPoints = std::uint64_t{1} << 24;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xffu);
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xffu);
}

void put_f64(std::string& out, double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof u);
    put_u64(out, u);
}

// Cursor over the raw bytes; every read checks the remaining length so a
// short file surfaces as a truncation error, not as garbage values.
struct Reader {
    const std::string& bytes;
    std::size_t pos = 0;

    const char* take(std::size_t n) {
        if (bytes.size() - pos < n) throw FormatError("snapshot: truncated file");
        const char* p = bytes.data() + pos;
        pos += n;
        return p;
    }
    std::uint32_t u32() {
        const unsigned char* p = reinterpret_cast<const unsigned char*>(take(4));
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        const unsigned char* p = reinterpret_cast<const unsigned char*>(take(8));
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        return v;
    }
    double f64() {
        const std::uint64_t u = u64();
        double x;
        std::memcpy(&x, &u, sizeof x);
        return x;
    }
};

}  // namespace

std::string snapshot_bytes(const ScalarField& f, double time) {
    const Grid& g = f.grid();
    const std::vector<double>& v = f.values();
    std::string out;
    out.reserve(4 + 4 + 16 * static_cast<std::size_t>(g.n_dims) + 8 + 8 * v.size());
    out.append(kMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(g.n_dims));
    for (int a = 0; a < g.n_dims; ++a) put_u64(out, g.points[a]);
    for (int a = 0; a < g.n_dims; ++a) put_f64(out, g.side[a]);
    put_f64(out, time);
    for (double x : v) put_f64(out, x);
    return out;
}

void write_snapshot(const ScalarField& f, double time, const std::string& path) {
    const std::string bytes = snapshot_bytes(f, time);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open \"" + path + "\" for writing: " + std::strerror(errno));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error("write to \"" + path + "\" failed: " + std::strerror(errno));
}

Snapshot parse_snapshot(const std::string& bytes) {
    Reader r{bytes};
    if (std::memcmp(r.take(4), kMagic, 4) != 0)
        throw FormatError("snapshot: bad magic (not an ASF1 file)");
    const std::uint32_t dims = r.u32();
    if (dims < 2 || dims > static_cast<std::uint32_t>(kMaxDims))
        throw FormatError("snapshot: dimension count " + std::to_string(dims) +
                          " outside the supported range [2, " + std::to_string(kMaxDims) + "]");

    std::vector<std::size_t> points;
    std::uint64_t total = 1;
    for (std::uint32_t a = 0; a < dims; ++a) {
        const std::uint64_t n = r.u64();
        if (n == 0 || n > kMaxAxisPoints)
            throw FormatError("snapshot: unreasonable axis size " + std::to_string(n));
        points.push_back(static_cast<std::size_t>(n));
        total *= n;
    }
    std::vector<double> side;
    for (std::uint32_t a = 0; a < dims; ++a) side.push_back(r.f64());
    const double time = r.f64();

    Grid g;
    try {
        g = make_grid(static_cast<int>(dims), points, side);
    } catch (const ValidationError& e) {
        throw FormatError("snapshot: invalid grid metadata: " + std::string(e.what()));
    }

    std::vector<double> values(static_cast<std::size_t>(total));
    for (auto& x : values) x = r.f64();
    if (r.pos != bytes.size()) throw FormatError("snapshot: trailing bytes after the value grid");
    return Snapshot{ScalarField::from_values(g, std::move(values)), time};
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open \"" + path + "\" for reading: " + std::strerror(errno));
    std::ostringstream body;
    body << in.rdbuf();
    return parse_snapshot(body.str());
}

}  // namespace ascal
