#include <doctest.h>

#include <fstream>
#include <sstream>

#include "saoovqe/error.hpp"
#include "saoovqe/fcidump.hpp"
#include "test_util.hpp"

using namespace saoovqe;

namespace {

const char *kOneOrbital = "&FCI NORB=1,NELEC=2,MS2=0,\n&END\n"
                          "0.5 0 0 0 0\n-1.25 1 1 0 0\n0.675 1 1 1 1\n";

std::size_t data_lines(const std::string &text) {
    std::istringstream in(text);
    std::size_t n = 0;
    bool body = false;
    for (std::string line; std::getline(in, line);) {
        if (body && !line.empty()) {
            ++n;
        }
        if (line.find("&END") != std::string::npos) {
            body = true;
        }
    }
    return n;
}

void write_text(const std::filesystem::path &p, const std::string &text) {
    std::ofstream(p) << text;
}

} // namespace

TEST_CASE("one-orbital file parses into core, h and g") {
    const auto ints = parse_fcidump_string(kOneOrbital);
    CHECK(ints.n_orb == 1);
    CHECK(ints.n_elec == 2);
    CHECK(ints.ms2 == 0);
    CHECK(ints.e_core == 0.5);
    CHECK(ints.h(0, 0) == -1.25);
    CHECK(ints.g(0, 0, 0, 0) == 0.675);
}

TEST_CASE("slash-terminated header and lower-case keys") {
    const auto ints = parse_fcidump_string(" &fci norb=1, nelec=2,\n /\n0.675 1 1 1 1\n");
    CHECK(ints.n_orb == 1);
    CHECK(ints.g(0, 0, 0, 0) == 0.675);
    CHECK(ints.e_core == 0.0);
}

TEST_CASE("permutational symmetry is filled in") {
    const auto ints = parse_fcidump_string("&FCI NORB=2,NELEC=2,\n&END\n0.3 2 1 1 1\n0.1 2 1 0 0\n");
    for (auto [p, q, r, s] : {std::tuple{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}) {
        CHECK(ints.g(p, q, r, s) == 0.3);
    }
    CHECK(ints.h(0, 1) == 0.1);
    CHECK(ints.h(1, 0) == 0.1);
}

TEST_CASE("writer emits header plus one line per nonzero integral") {
    const auto ints = parse_fcidump_string(kOneOrbital);
    CHECK(data_lines(write_fcidump(ints)) == 3);

    const auto zero = SpatialIntegrals::zeros(3, 2);
    const std::string text = write_fcidump(zero);
    CHECK(data_lines(text) == 1);
    std::istringstream last(text.substr(text.rfind('\n', text.size() - 2) + 1));
    double v = 1.0;
    int i = -1, j = -1, k = -1, l = -1;
    last >> v >> i >> j >> k >> l;
    CHECK(v == 0.0);
    CHECK((i | j | k | l) == 0);
    CHECK(parse_fcidump_string(text) == zero);
}

TEST_CASE("round trip is exact on the committed fixtures") {
    for (const char *rel : {"h2/h2.fcidump", "formaldimine/a130_p90/center.fcidump",
                            "h4/center.fcidump"}) {
        const auto ints = read_fcidump(testutil::fixture(rel));
        const auto again = parse_fcidump_string(write_fcidump(ints));
        CHECK_MESSAGE(again == ints, rel);
        CHECK(write_fcidump(again) == write_fcidump(ints));
    }
}

TEST_CASE("formaldimine fixture dimensions") {
    const auto ints = read_fcidump(testutil::fixture("formaldimine/a130_p90/center.fcidump"));
    CHECK(ints.n_orb == 13);
    CHECK(ints.n_elec == 16);
    CHECK(ints.ms2 == 0);
    ints.validate();
}

TEST_CASE("format_value keeps 17 significant digits") {
    for (double v : {0.1, -1.0 / 3.0, 6.02214076e23, -2.5e-300}) {
        CHECK(std::stod(format_value(v)) == v);
    }
}

TEST_CASE("parse errors carry the line number") {
    auto line_of = [](const std::string &text) {
        try {
            parse_fcidump_string(text);
        } catch (const ParseError &e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("&FCI NORB=2,NELEC=2,\n&END\n0.1 1 1 0 0\nabc 1 1 0 0\n") == 4);
    CHECK(line_of("&FCI NORB=2,NELEC=2,\n&END\n0.1 3 1 0 0\n") == 3);
    CHECK(line_of("&FCI NORB=2,NELEC=2,\n&END\n0.1 1 1\n") == 3);
    CHECK(line_of("&FCI NORB=1,NELEC=2,\n&END\n0.6 1 1 1 1\n0.7 1 1 1 1\n") == 4);
    CHECK(line_of("&FCI NELEC=2,\n&END\n") == 1);
    CHECK(line_of("&FCI NORB=2,NELEC=2,\n0.1 1 1 0 0\n") == 1);
}

TEST_CASE("consistent duplicates are accepted") {
    const auto ints =
        parse_fcidump_string("&FCI NORB=1,NELEC=2,\n&END\n0.6 1 1 1 1\n0.6 1 1 1 1\n");
    CHECK(ints.g(0, 0, 0, 0) == 0.6);
}

TEST_CASE("lint collects every error and warning") {
    std::istringstream in("&FCI NORB=2,NELEC=2,ORBSYM=1,\n&END\n0.1 1 1 0 0\n"
                          "0.2 1 1 0 0\nx 1 1 0 0\n0.5 1 0 0 0\n");
    std::vector<FcidumpIssue> errors, warnings;
    const auto ints = lint_fcidump(in, errors, warnings);
    CHECK_FALSE(ints.has_value());
    REQUIRE(errors.size() == 2);
    CHECK(errors[0].line == 4);
    CHECK(errors[1].line == 5);
    REQUIRE(warnings.size() == 2);
    CHECK(warnings[0].line == 1);
    CHECK(warnings[1].line == 6);
}

TEST_CASE("derivative manifests") {
    const auto dir = testutil::scratch("fcidump_manifest");
    const auto reference = read_fcidump(testutil::fixture("formaldimine/a130_p90/center.fcidump"));

    write_text(dir / "empty.txt", "# nothing here\n\n");
    CHECK(parse_derivative_manifest(dir / "empty.txt", reference).empty());

    const auto sets = parse_derivative_manifest(
        testutil::fixture("formaldimine/a130_p90/derivs/manifest.txt"), reference);
    // CH2NH has five atoms.
    CHECK(sets.size() == 15);
    CHECK(sets.front().coordinate_label == "0x");
    CHECK(sets.front().convention == OrbitalConvention::FixedOrbital);

    write_fcidump(SpatialIntegrals::zeros(12, 16), dir / "small.fcidump");
    write_text(dir / "bad.txt", "0x small.fcidump fixed-orbital\n");
    CHECK_THROWS_AS(parse_derivative_manifest(dir / "bad.txt", reference), DimensionError);

    write_text(dir / "tag.txt", "0x small.fcidump sideways\n");
    CHECK_THROWS_AS(read_manifest_entries(dir / "tag.txt"), ParseError);
}

TEST_CASE("convention tags") {
    CHECK(parse_convention("fixed-orbital") == OrbitalConvention::FixedOrbital);
    CHECK(parse_convention("tracked-orbital") == OrbitalConvention::TrackedOrbital);
    CHECK(to_string(OrbitalConvention::TrackedOrbital) == "tracked-orbital");
    CHECK_THROWS_AS(parse_convention("other"), ParseError);
}

TEST_CASE("validate rejects non-finite and asymmetric input") {
    auto ints = SpatialIntegrals::zeros(2, 2);
    ints.validate();
    ints.h(0, 1) = 1.0;
    CHECK_THROWS_AS(ints.validate(), NumericalError);
    ints.h(1, 0) = 1.0;
    ints.e_core = std::nan("");
    CHECK_THROWS_AS(ints.validate(), NumericalError);
}
