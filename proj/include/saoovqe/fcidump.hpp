#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "saoovqe/tensor.hpp"

namespace saoovqe {

/// One- and two-electron integrals in a spatial-orbital basis (Hartree).
/// `g` holds (pq|rs) in chemists' notation.
struct SpatialIntegrals {
    int n_orb = 0;
    int n_elec = 0;
    int ms2 = 0;
    double e_core = 0.0;
    Matrix h;
    SymmetricEri g;
    /// Parsed and written back, never interpreted.
    std::vector<int> orbsym;
    int isym = 1;

    static SpatialIntegrals zeros(int n_orb, int n_elec, int ms2 = 0);

    /// Throws DimensionError / ConfigError when an invariant does not hold.
    void validate() const;
};

bool operator==(const SpatialIntegrals &a, const SpatialIntegrals &b);

enum class OrbitalConvention { FixedOrbital, TrackedOrbital };

std::string to_string(OrbitalConvention c);
OrbitalConvention parse_convention(const std::string &tag);

/// Nuclear derivative of every integral for one Cartesian coordinate
/// (Hartree/bohr). Same layout as SpatialIntegrals: `d.e_core` is the core
/// energy derivative, `d.h` and `d.g` the one- and two-electron derivatives.
struct DerivativeIntegralSet {
    std::string coordinate_label;
    SpatialIntegrals d;
    OrbitalConvention convention = OrbitalConvention::FixedOrbital;

    double de_core() const { return d.e_core; }
    const Matrix &dh() const { return d.h; }
    const SymmetricEri &dg() const { return d.g; }
};

/// A diagnostic produced while reading an FCIDUMP; `line` is 1-based.
struct FcidumpIssue {
    std::size_t line = 0;
    std::string message;
};

/// Parses FCIDUMP text. Indices in the file are 1-based; `i=j=k=l=0` is the
/// core energy, `k=l=0` a one-electron integral, anything else (ij|kl).
/// Throws ParseError carrying the offending line number.
SpatialIntegrals parse_fcidump(std::istream &in);
SpatialIntegrals parse_fcidump_string(const std::string &text);
SpatialIntegrals read_fcidump(const std::filesystem::path &path);

/// Lint pass used by `saoovqe validate`: collects every problem instead of
/// stopping at the first one. Returns the integrals when parsing succeeded.
std::optional<SpatialIntegrals> lint_fcidump(std::istream &in,
                                             std::vector<FcidumpIssue> &errors,
                                             std::vector<FcidumpIssue> &warnings);

/// Canonical FCIDUMP text: header, two-electron canonical representatives,
/// one-electron lower triangle, core energy. Zero integrals are omitted
/// (the core line is always written). Values carry 17 significant digits.
std::string write_fcidump(const SpatialIntegrals &ints);
void write_fcidump(const SpatialIntegrals &ints, const std::filesystem::path &path);

/// Formats one value the way write_fcidump does.
std::string format_value(double v);

/// One entry of a `<label> <relative-path> <convention>` manifest.
struct ManifestEntry {
    std::string label;
    std::filesystem::path path;
    OrbitalConvention convention = OrbitalConvention::FixedOrbital;
    std::size_t line = 0;
};

/// Reads a derivative manifest. Blank lines and `#` comments are skipped;
/// paths are resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest_entries(const std::filesystem::path &path);

/// Loads every set named by a derivative manifest and checks its orbital
/// count against `reference`.
std::vector<DerivativeIntegralSet>
parse_derivative_manifest(const std::filesystem::path &path,
                          const SpatialIntegrals &reference);

} // namespace saoovqe
