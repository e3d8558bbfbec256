#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "pcl/errors.hpp"
#include "pcl/ntheory.hpp"

namespace pcl::ntheory {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'C', 'L', '1'};

template <typename T>
void put_le(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw IoError("sieve cache: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T v;
    std::memcpy(&v, bytes.data(), sizeof(T));
    return v;
}

}  // namespace

void save_tables(const ArithmeticTables& t, const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("sieve cache: cannot open " + path.string() + " for writing");
    os.write(kMagic.data(), kMagic.size());
    put_le<std::uint64_t>(os, t.limit);
    for (double v : t.mangoldt) put_le<double>(os, v);
    for (std::int8_t v : t.moebius) put_le<std::int8_t>(os, v);
    for (std::uint32_t v : t.totient) put_le<std::uint32_t>(os, v);
    for (std::uint32_t v : t.spf) put_le<std::uint32_t>(os, v);
    if (!os) throw IoError("sieve cache: write failed");
}

ArithmeticTables load_tables(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("sieve cache: cannot open " + path.string());
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kMagic)
        throw IoError("sieve cache: bad magic");
    ArithmeticTables t;
    t.limit = get_le<std::uint64_t>(is);
    if (t.limit < 2 || t.limit > kDefaultTableBudget) throw IoError("sieve cache: implausible limit");
    const std::size_t size = t.limit + 1;
    t.mangoldt.resize(size);
    t.moebius.resize(size);
    t.totient.resize(size);
    t.spf.resize(size);
    for (auto& v : t.mangoldt) v = get_le<double>(is);
    for (auto& v : t.moebius) v = get_le<std::int8_t>(is);
    for (auto& v : t.totient) v = get_le<std::uint32_t>(is);
    for (auto& v : t.spf) v = get_le<std::uint32_t>(is);
    if (is.peek() != std::char_traits<char>::eof()) throw IoError("sieve cache: trailing bytes");

    for (std::uint64_t n = 2; n <= t.limit; ++n)
        if (t.spf[n] == n) t.primes.push_back(static_cast<std::uint32_t>(n));
    t.psi_prefix.assign(size, 0.0);
    double acc = 0.0;
    for (std::uint64_t n = 1; n <= t.limit; ++n) {
        acc += t.mangoldt[n];
        t.psi_prefix[n] = acc;
    }
    return t;
}

std::uint64_t psi_checksum(const ArithmeticTables& t) {
    std::uint64_t h = 1469598103934665603ull;
    for (double v : t.psi_prefix) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

}  // namespace pcl::ntheory
