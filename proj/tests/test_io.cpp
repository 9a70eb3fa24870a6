#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace cohlab;
using Catch::Matchers::WithinAbs;

TEST_CASE("matrix JSON round trip", "[io]") {
    SECTION("bit-exact round trip") {
        Rng rng(71);
        for (int trial = 0; trial < 20; ++trial) {
            const ComplexMatrix m = rng.ginibre(1 + rng.uniform_int(0, 4),
                                                1 + rng.uniform_int(0, 4));
            const ComplexMatrix back = matrix_from_json(matrix_to_json(m));
            REQUIRE(back.rows() == m.rows());
            REQUIRE(back.cols() == m.cols());
            REQUIRE(back.max_abs_diff(m) == 0.0);
        }
    }
    SECTION("malformed documents are IoError") {
        REQUIRE_THROWS_AS(matrix_from_json(json::array({1, 2})), IoError);
        REQUIRE_THROWS_AS(matrix_from_json(json{{"rows", 2}, {"cols", 2}}), IoError);
        json wrong_count = matrix_to_json(ComplexMatrix::identity(2));
        wrong_count["entries"].erase(0);
        REQUIRE_THROWS_AS(matrix_from_json(wrong_count), IoError);
        json bad_entry = matrix_to_json(ComplexMatrix::identity(2));
        bad_entry["entries"][0] = 3.14;
        REQUIRE_THROWS_AS(matrix_from_json(bad_entry), IoError);
    }
}

TEST_CASE("state JSON round trips", "[io]") {
    SECTION("density") {
        const DensityMatrix rho = random_density(3, 2, 72);
        const json j = state_to_json(rho);
        REQUIRE(j.at("kind") == "density");
        const LoadedState back = state_from_json(j);
        REQUIRE(back.kind == "density");
        REQUIRE_FALSE(back.pure.has_value());
        REQUIRE(back.rho.matrix().max_abs_diff(rho.matrix()) == 0.0);
    }
    SECTION("pure keeps the amplitude view") {
        const PureState psi = random_pure(4, 73);
        const LoadedState back = state_from_json(state_to_json(psi));
        REQUIRE(back.kind == "pure");
        REQUIRE(back.pure.has_value());
        for (int i = 0; i < 4; ++i)
            REQUIRE(std::abs(back.pure->amplitudes()[static_cast<size_t>(i)] -
                             psi.amplitudes()[static_cast<size_t>(i)]) == 0.0);
        REQUIRE(back.rho.matrix().max_abs_diff(pure_to_density(psi).matrix()) < 1e-15);
    }
    SECTION("diagonal becomes a diagonal density matrix") {
        const DiagonalState d(std::vector<double>{0.5, 0.3, 0.2});
        const LoadedState back = state_from_json(state_to_json(d));
        REQUIRE(back.kind == "diagonal");
        for (int i = 0; i < 3; ++i) {
            REQUIRE_THAT(back.rho(i, i).real(), WithinAbs(d[i], 1e-15));
            for (int j = 0; j < 3; ++j)
                if (i != j) REQUIRE(std::abs(back.rho(i, j)) == 0.0);
        }
    }
    SECTION("validation still applies on load") {
        json j = state_to_json(random_density(2, 2, 74));
        j["entries"][0] = json::array({5.0, 0.0});  // breaks trace and PSD
        REQUIRE_THROWS_AS(state_from_json(j), InvalidInput);
        json p = state_to_json(random_pure(2, 75));
        p["entries"][0] = json::array({5.0, 0.0});  // breaks normalization
        REQUIRE_THROWS_AS(state_from_json(p), NotNormalized);
        json bad_kind = state_to_json(random_density(2, 2, 76));
        bad_kind["kind"] = "mystery";
        REQUIRE_THROWS_AS(state_from_json(bad_kind), IoError);
        REQUIRE_THROWS_AS(state_from_json(json{{"rows", 1}}), IoError);
    }
}

TEST_CASE("channel JSON round trip", "[io]") {
    const IncoherentChannel ch = random_incoherent_channel(3, 3, 4, 77);
    const json j = channel_to_json(ch);
    const IncoherentChannel back = channel_from_json(j);
    REQUIRE(back.d_in == ch.d_in);
    REQUIRE(back.kraus.size() == ch.kraus.size());
    for (size_t n = 0; n < ch.kraus.size(); ++n)
        REQUIRE(back.kraus[n].m.max_abs_diff(ch.kraus[n].m) == 0.0);

    SECTION("loading re-validates") {
        json broken = j;
        broken["kraus"].erase(0);  // now incomplete
        REQUIRE_THROWS_AS(channel_from_json(broken), NotComplete);
        REQUIRE_THROWS_AS(channel_from_json(json{{"d_in", 2}}), IoError);
    }
}

TEST_CASE("file IO", "[io]") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "cohlab_io_test";
    fs::create_directories(dir);
    const std::string path = (dir / "state.json").string();

    SECTION("write then read a state file") {
        const DensityMatrix rho = random_density(3, 3, 78);
        write_text_file(path, state_to_json(rho).dump(2));
        const LoadedState back = state_from_json(read_json_file(path));
        REQUIRE(back.rho.matrix().max_abs_diff(rho.matrix()) == 0.0);
        std::remove(path.c_str());
    }
    SECTION("missing and unparsable files") {
        REQUIRE_THROWS_AS(read_json_file((dir / "no_such_file.json").string()), IoError);
        const std::string junk = (dir / "junk.json").string();
        write_text_file(junk, "{not json");
        REQUIRE_THROWS_AS(read_json_file(junk), IoError);
        std::remove(junk.c_str());
        REQUIRE_THROWS_AS(write_text_file((dir / "nodir" / "x.txt").string(), "x"), IoError);
    }
}

TEST_CASE("report formatting", "[io]") {
    SECTION("shortest-form doubles at 12 significant digits") {
        REQUIRE(format_double(0.5) == "0.5");
        REQUIRE(format_double(1.0 / 3.0) == "0.333333333333");
        REQUIRE(format_double(-2.0) == "-2");
        REQUIRE(format_double(1e-12) == "1e-12");
    }
    SECTION("csv rows join cells with commas and end with newline") {
        REQUIRE(csv_row({"a", "b", "c"}) == "a,b,c\n");
        REQUIRE(csv_row({}) == "\n");
        REQUIRE(csv_row({"only"}) == "only\n");
    }
}
