#include "bns/io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bns/wavelet.hpp"

namespace bns {

static_assert(std::endian::native == std::endian::little,
              "payloads are little-endian; add byte swapping for this platform");

namespace {

void write_doubles(std::ostream& os, const double* v, size_t count) {
    os.write(reinterpret_cast<const char*>(v), static_cast<std::streamsize>(count * sizeof(double)));
}

void read_doubles(std::istream& is, double* v, size_t count) {
    is.read(reinterpret_cast<char*>(v), static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) fail_invalid("truncated payload");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail_invalid("cannot write file: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail_invalid("cannot open file: " + path);
    return is;
}

}  // namespace

void write_bnf1(const std::string& path, const GridField& f) {
    auto os = open_out(path);
    os << "BNF1 " << f.n << " " << f.N << " " << f.c << " grid\n";
    write_doubles(os, f.data.data(), f.data.size());
    if (!os) fail_invalid("write failed: " + path);
}

void write_bnf1(const std::string& path, const SpectralField& F) {
    auto os = open_out(path);
    os << "BNF1 " << F.n << " " << F.N << " " << F.c << " spectral\n";
    write_doubles(os, reinterpret_cast<const double*>(F.data.data()), F.data.size() * 2);
    if (!os) fail_invalid("write failed: " + path);
}

LoadedField read_bnf1(const std::string& path) {
    auto is = open_in(path);
    std::string header;
    std::getline(is, header);
    std::istringstream hs(header);
    std::string magic, kind;
    int n = 0, c = 0;
    long N = 0;
    hs >> magic >> n >> N >> c >> kind;
    if (magic != "BNF1" || !hs) fail_invalid("not a BNF1 file: " + path);

    LoadedField out;
    if (kind == "grid") {
        out.grid = GridField(n, N, c);
        read_doubles(is, out.grid.data.data(), out.grid.data.size());
        require(out.grid.finite(), "BNF1 grid payload has non-finite samples: " + path);
    } else if (kind == "spectral") {
        out.spectral = true;
        out.spec = SpectralField(n, N, c);
        read_doubles(is, reinterpret_cast<double*>(out.spec.data.data()), out.spec.data.size() * 2);
    } else {
        fail_invalid("BNF1 kind must be grid or spectral: " + path);
    }
    return out;
}

GridField read_bnf1_grid(const std::string& path) {
    LoadedField lf = read_bnf1(path);
    if (lf.spectral) return inverse_transform(lf.spec);
    return lf.grid;
}

SpectralField read_bnf1_spectral(const std::string& path) {
    LoadedField lf = read_bnf1(path);
    if (lf.spectral) return lf.spec;
    return forward_transform(lf.grid);
}

void write_bnc1(const std::string& path, const WaveletCoeffs& c) {
    auto os = open_out(path);
    os << "BNC1 " << c.n << " " << c.J << " " << c.j_max << "\n";
    os << "block 0 0\n";
    write_doubles(os, &c.scaling0, 1);
    for (int j = 0; j <= c.j_max; ++j) {
        long M = ipow(1L << j, c.n);
        for (int eps = 1; eps < (1 << c.n); ++eps) {
            os << "block " << eps << " " << j << "\n";
            write_doubles(os, c.detail[j].data() + static_cast<size_t>(eps - 1) * M, M);
        }
    }
    if (!os) fail_invalid("write failed: " + path);
}

WaveletCoeffs read_bnc1(const std::string& path) {
    auto is = open_in(path);
    std::string header;
    std::getline(is, header);
    std::istringstream hs(header);
    std::string magic;
    int n = 0, J = 0, j_max = 0;
    hs >> magic >> n >> J >> j_max;
    if (magic != "BNC1" || !hs) fail_invalid("not a BNC1 file: " + path);

    WaveletCoeffs c(n, J, j_max);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        int eps = -1, j = -1;
        ls >> tag >> eps >> j;
        if (tag != "block" || !ls) fail_invalid("bad BNC1 block tag: " + path);
        if (eps == 0) {
            require(j == 0, "BNC1 base block must have j = 0");
            read_doubles(is, &c.scaling0, 1);
            continue;
        }
        require(j >= 0 && j <= j_max && eps >= 1 && eps < (1 << n), "BNC1 block out of range");
        long M = ipow(1L << j, n);
        read_doubles(is, c.detail[j].data() + static_cast<size_t>(eps - 1) * M, M);
    }
    return c;
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    auto is = open_in(path);
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    std::vector<ManifestEntry> entries;
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        double t;
        std::string rel;
        if (!(ls >> t >> rel)) continue;
        entries.push_back({t, (base / rel).string()});
    }
    require(!entries.empty(), "empty trajectory manifest: " + path);
    return entries;
}

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
    auto os = open_out(path);
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    for (const auto& e : entries) {
        std::string rel = std::filesystem::proximate(e.path, base).string();
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", e.t);
        os << buf << " " << rel << "\n";
    }
    if (!os) fail_invalid("write failed: " + path);
}

}  // namespace bns
