#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "dwell/app.hpp"
#include "dwell/config.hpp"
#include "dwell/csv.hpp"
#include "dwell/figures.hpp"

using namespace dwell;
using namespace dwell::cli;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("dwell_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Result {
    int code;
    std::string out, err;
};

Result dwell_bin(const std::string& args) {
    const char* bin = std::getenv("DWELL_BIN");
    REQUIRE(bin != nullptr);
    const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
    const std::string cmd = std::string("\"") + bin + "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return {WEXITSTATUS(status), read_file(out), read_file(err)};
}

// Data rows (comments and header dropped) split on commas.
std::vector<std::vector<std::string>> rows(const std::string& csv) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        out.push_back(cells);
    }
    return out;
}

double cell(const std::vector<std::string>& r, std::size_t i) { return std::stod(r.at(i)); }

const std::string gaussian_cfg = R"(# test scenario
[pulse]
kind = gaussian
sigma = 1
detuning = 0

[medium]
od0 = 2

[engine]
method = spectral
)";

}  // namespace

TEST_CASE("config parser") {
    const auto t = parse_config("[pulse]\nkind = gaussian # trailing comment\n\n[medium]\n od0=3 \n");
    CHECK(t.at("pulse").at("kind") == "gaussian");
    CHECK(t.at("medium").at("od0") == "3");
    CHECK_THROWS_AS(parse_config("[pulse]\ncolour = red\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[plse]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[pulse]\nkind = a\nkind = b\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[pulse]\nkind gaussian\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("kind = gaussian\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[pulse\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[pulse]\nkind =\n"), ConfigError);
}

TEST_CASE("scenario schema") {
    const Scenario s = scenario_from_table(parse_config(gaussian_cfg));
    CHECK(s.pulse.get_if<GaussianPulse>()->sigma == 1.0);
    CHECK_THAT(s.medium.od0(), WithinRel(2.0, 1e-14));
    CHECK(s.engine == Engine::spectral);
    CHECK(s.output == "-");

    auto bad = [](const std::string& extra) { return scenario_from_table(parse_config(gaussian_cfg + extra)); };
    CHECK_THROWS_AS(bad("[tolerance]\nquadrature = -1\n"), ConfigError);
    CHECK_THROWS_AS(bad("[tolerance]\ntail = abc\n"), ConfigError);
    CHECK_THROWS_AS(bad("[grid]\nmedium_cells = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(bad("[sweep]\naxis = od0\n"), ConfigError);
    CHECK_THROWS_AS(bad("[output]\ntrace = t.csv\n"), ConfigError);
    CHECK_THROWS_AS(scenario_from_table(parse_config("[pulse]\nkind = gaussian\n[medium]\nod0 = 1\n")), ConfigError);
    CHECK_THROWS_AS(scenario_from_table(parse_config("[pulse]\nkind = gaussian\nsigma = -1\n[medium]\nod0 = 1\n")),
                    InvalidParameter);
    CHECK_THROWS_AS(scenario_from_table(parse_config("[pulse]\nkind = narrowband\n")), ConfigError);

    const auto tight = bad("[engine]\n");
    CHECK(tight.engine == Engine::spectral);
}

TEST_CASE("tabulated inputs resolve relative to the config file") {
    write_file("spectrum.csv", "omega,re,im\n-2,0,0\n-1,1,0\n0,2,0\n1,1,0\n2,0,0\n");
    write_file("profile.csv", "# z, g\n0,1\n0.5,1\n1,1\n");
    const fs::path cfg = write_file("tab.cfg", "[pulse]\nkind = tabulated\nfile = spectrum.csv\n"
                                               "[medium]\nprofile = tabulated\nfile = profile.csv\n");
    const Scenario s = load_scenario(cfg.string());
    CHECK(s.pulse.get_if<TabulatedPulse>() != nullptr);
    CHECK_THAT(s.medium.od0(), WithinRel(4.0, 1e-12));
    write_file("broken.csv", "0,1\nx,y\n");
    CHECK_THROWS_AS(read_columns((scratch() / "broken.csv").string(), 2), ConfigError);
    CHECK_THROWS_AS(read_columns((scratch() / "missing.csv").string(), 2), ConfigError);
}

TEST_CASE("sweep schema and spacing") {
    const auto sw = sweep_from_table(parse_config(gaussian_cfg + "[sweep]\naxis = od0\nfrom = 1\nto = 100\ncount = 3\n"
                                                                "spacing = log\n"));
    const auto v = sweep_values(sw);
    REQUIRE(v.size() == 3);
    CHECK_THAT(v[1], WithinRel(10.0, 1e-14));
    CHECK(v[2] == 100.0);
    CHECK_THAT(sweep_point(sw, 7.0).medium.od0(), WithinRel(7.0, 1e-14));
    auto bad = [](const std::string& s) { return sweep_from_table(parse_config(gaussian_cfg + "[sweep]\n" + s)); };
    CHECK_THROWS_AS(bad("axis = od0\nfrom = 2\nto = 1\ncount = 3\n"), ConfigError);
    CHECK_THROWS_AS(bad("axis = od0\nfrom = 1\nto = 2\ncount = 1\n"), ConfigError);
    CHECK_THROWS_AS(bad("axis = colour\nfrom = 1\nto = 2\ncount = 3\n"), ConfigError);
    CHECK_THROWS_AS(bad("axis = od0\nfrom = 0\nto = 2\ncount = 3\nspacing = log\n"), ConfigError);
}

TEST_CASE("csv number format") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-1.0 / 0.0) == "-inf");
    CHECK(format_number(1.5e-300) == "1.5e-300");
}

TEST_CASE("exit code mapping") {
    CHECK(exit_code_for(ConfigError("x")) == 2);
    CHECK(exit_code_for(NumericError("x")) == 3);
    CHECK(exit_code_for(NonConvergence("x")) == 3);
    CHECK(exit_code_for(InvalidParameter("x")) == 4);
    CHECK(exit_code_for(UnsupportedVariant("x")) == 4);
}

TEST_CASE("run writes a report") {
    const auto cfg = write_file("run.cfg", gaussian_cfg);
    const auto r = dwell_bin("run " + cfg.string());
    REQUIRE(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring("method,P_T,P_S,tau_0,tau_T,tau_S,t_g,t_W,t_S,od_eff"));
    const auto rs = rows(r.out);
    REQUIRE(rs.size() == 1);
    CHECK(rs[0][0] == "analytic");
    CHECK_THAT(cell(rs[0], 3), WithinAbs(cell(rs[0], 2), 1e-9));
    CHECK(rs[0][6].empty());

    // Byte-identical output for identical input.
    CHECK(dwell_bin("run " + cfg.string()).out == r.out);
}

TEST_CASE("run with both engines") {
    const auto cfg = write_file("both.cfg",
        "[pulse]\nkind = gaussian\nsigma = 1\n[medium]\nod0 = 2\n[engine]\nmethod = both\n"
        "[output]\ntrace = trace.csv\nhistory = history.csv\nhistory_stride = 50\n");
    const auto r = dwell_bin("run " + cfg.string());
    REQUIRE(r.code == 0);
    const auto rs = rows(r.out);
    REQUIRE(rs.size() == 2);
    CHECK(rs[0][0] == "analytic");
    CHECK(rs[1][0] == "timedomain");
    CHECK_THAT(cell(rs[1], 4), WithinRel(cell(rs[0], 4), 0.02));
    CHECK(rows(read_file(scratch() / "trace.csv")).size() > 100);
    CHECK(rows(read_file(scratch() / "history.csv")).size() > 100);
}

TEST_CASE("run error paths") {
    const auto malformed = write_file("bad.cfg", "[pulse]\nkind = gaussian\nsigma = one\n[medium]\nod0 = 1\n");
    auto r = dwell_bin("run " + malformed.string());
    CHECK(r.code == 2);
    CHECK_THAT(r.err, ContainsSubstring("sigma"));
    CHECK(dwell_bin("run " + (scratch() / "nope.cfg").string()).code == 2);

    const auto nb_td = write_file("nbtd.cfg", "[pulse]\nkind = narrowband\n[medium]\nod0 = 1\n[engine]\nmethod = timedomain\n");
    CHECK(dwell_bin("run " + nb_td.string()).code == 4);

    const auto neg = write_file("neg.cfg", "[pulse]\nkind = gaussian\nsigma = 1\n[medium]\nod0 = -1\n");
    CHECK(dwell_bin("run " + neg.string()).code == 4);

    const auto s2 = write_file("steps2.cfg", "[pulse]\nkind = gaussian\nsigma = 1\n[medium]\nod0 = 1\n"
                                             "[engine]\nmethod = timedomain\n[grid]\nmax_steps = 5\n");
    CHECK(dwell_bin("run " + s2.string()).code == 3);
    CHECK(dwell_bin("").code == 2);
}

TEST_CASE("sweep output is ordered") {
    const auto cfg = write_file("sweep.cfg", gaussian_cfg + "[sweep]\naxis = od_eff\nfrom = 0.5\nto = 4\ncount = 8\n");
    const auto r = dwell_bin("sweep " + cfg.string());
    REQUIRE(r.code == 0);
    const auto rs = rows(r.out);
    REQUIRE(rs.size() == 8);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        CHECK(rs[i][0] == std::to_string(i));
        CHECK_THAT(cell(rs[i], 12), WithinAbs(cell(rs[i], 1), 1e-8));
    }
    CHECK(dwell_bin("sweep " + cfg.string()).out == r.out);

    const auto sig = write_file("sig.cfg", "[pulse]\nkind = narrowband\n[medium]\nod0 = 1\n"
                                           "[sweep]\naxis = sigma\nfrom = 1\nto = 2\ncount = 2\n");
    CHECK(dwell_bin("sweep " + sig.string()).code == 4);
}

TEST_CASE("figure datasets") {
    CHECK(dwell_bin("figure fig9 " + (scratch() / "f.csv").string()).code == 4);

    const auto f2 = make_figure("fig2");
    CHECK_THAT(f2.provenance.front(), ContainsSubstring("optical depth"));
    bool found = false;
    for (const auto& r : f2.rows)
        if (std::isinf(r[0]) && r[1] == 5.0) {
            CHECK_THAT(r[3], WithinRel(-5.0, 1e-14));
            found = true;
        }
    CHECK(found);

    const auto out = scratch() / "fig3b.csv";
    REQUIRE(dwell_bin("figure fig3b " + out.string()).code == 0);
    const std::string text = read_file(out);
    CHECK(text.rfind("# ", 0) == 0);
    found = false;
    for (const auto& r : rows(text))
        if (cell(r, 0) == 1e-6 && cell(r, 1) == 0.0) {
            CHECK_THAT(cell(r, 3), WithinRel(2.0, 1e-6));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("validate detects an under-resolved frequency grid") {
    const auto r = dwell_bin("validate --frequency-intervals 256");
    CHECK(r.code == 1);
    CHECK_THAT(r.out, ContainsSubstring("inv.spectral_quadrature_converged.max_rel"));
    CHECK_THAT(r.err, ContainsSubstring("FAILED: inv.spectral_quadrature_converged"));
}
