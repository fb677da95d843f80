#pragma once

#include "bns/grid_field.hpp"

namespace bns {

struct WaveletCoeffs;

/// BNF1 field file: one text header line "BNF1 n N c kind" with
/// kind in {grid, spectral}, then little-endian f64 payload, row-major,
/// components outermost. Spectral payloads interleave (re, im) in FFT
/// index order.
void write_bnf1(const std::string& path, const GridField& f);
void write_bnf1(const std::string& path, const SpectralField& F);

/// Either kind; exactly one output is filled, the flag says which.
struct LoadedField {
    bool spectral = false;
    GridField grid;
    SpectralField spec;
};
LoadedField read_bnf1(const std::string& path);

GridField read_bnf1_grid(const std::string& path);
SpectralField read_bnf1_spectral(const std::string& path);

/// BNC1 coefficient dump: header "BNC1 n J j_max", then one block per
/// (eps, j): a text line "block eps j" (eps as bitmask; eps 0, j 0 is the
/// base-scale part) followed by 2^{nj} little-endian f64 values.
void write_bnc1(const std::string& path, const WaveletCoeffs& c);
WaveletCoeffs read_bnc1(const std::string& path);

/// Trajectory manifest: text file, '#' comments, one "time path" pair per
/// line; paths are relative to the manifest's directory.
struct ManifestEntry {
    double t;
    std::string path;
};
std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries);

}  // namespace bns
