#include "fbmfp/oracles/feller.hpp"

#include <doctest.h>
#include <json.hpp>

#include "support.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(FBMFP_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

/// key=value lines (comments stripped of "# ").
std::map<std::string, std::string> key_values(const std::string& out) {
    std::map<std::string, std::string> kv;
    for (auto line : split(out, '\n')) {
        if (line.rfind("# ", 0) == 0) line = line.substr(2);
        const auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

/// Data rows of a CSV with '#' comments, header dropped.
std::vector<std::vector<std::string>> rows(const std::string& out) {
    std::vector<std::vector<std::string>> r;
    bool header = true;
    for (const auto& line : split(out, '\n')) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        r.push_back(split(line, ','));
    }
    return r;
}

}  // namespace

TEST_CASE("omega at t = 0 prints pi(s)") {
    const auto r = run("omega --t 0 --s-re 2 --xi 0.5");
    REQUIRE(r.status == 0);
    CHECK(std::stod(key_values(r.out)["omega_re"]) == rel(std::exp(-1.0), 1e-15));
}

TEST_CASE("omega near s = 0 is the total mass") {
    const auto r = run("omega --t 1 --s-re 1e-8 --a 1 --b 0.5 --c 0.3 --v 0.7");
    REQUIRE(r.status == 0);
    CHECK(std::stod(key_values(r.out)["omega_re"]) == rel(1.0, 1e-6));
}

TEST_CASE("omega reports a small residual for typical parameters") {
    const auto r = run("omega --t 1 --s-re 2 --s-im 1 --a 1 --b 0.5 --c 0.3 --v 0.7 --format json");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["pde_residual"].get<double>() <= 1e-5);
}

TEST_CASE("density at v = 1/2 matches the closed form") {
    const auto r = run("density --t 1 --xi 1 --x-min 0.3 --x-max 4 --n 24 --a 1 --b 0.5 --c 0.5 --v 0.5");
    REQUIRE(r.status == 0);
    const fbmfp::FpkParams p{1.0, 0.5, 0.5, 0.5};
    const auto data = rows(r.out);
    REQUIRE(data.size() == 24);
    for (const auto& row : data) {
        const double x = std::stod(row[0]);
        const double exact = fbmfp::oracles::feller_v_half_density(1.0, x, 1.0, p);
        if (exact < 1e-2) continue;
        CHECK(std::stod(row[1]) == rel(exact, 1e-3));
    }
}

TEST_CASE("single-point density run prints one row") {
    const auto r = run("density --t 1 --xi 1 --x-min 1 --x-max 1 --n 1 --a 1 --b 0.5 --c 0.5 --v 0.5");
    REQUIRE(r.status == 0);
    CHECK(rows(r.out).size() == 1);
}

TEST_CASE("reflecting density run reports its normalization") {
    const auto r = run("density --t 1 --xi 1 --a 1 --b 0.5 --c 0.3 --v 0.7");
    REQUIRE(r.status == 0);
    CHECK(std::abs(std::stod(key_values(r.out)["normalization"]) - 1.0) <= 5e-3);
}

TEST_CASE("flux table with c = 0 reproduces minus g'") {
    const auto r = run("flux --t-max 1 --n 100 --a 1 --b 0.5 --c 0 --v 0.7");
    REQUIRE(r.status == 0);
    const auto data = rows(r.out);
    REQUIRE(data.size() == 101);
    for (const auto& row : data) {
        CHECK(std::abs(std::stod(row[1]) - std::stod(row[3])) <= 1e-4);
        CHECK(std::stod(row[4]) <= 1e-6);
    }
    CHECK(std::isfinite(std::stod(data.front()[1])));
    CHECK(std::stod(data.front()[4]) == 0.0);
}

TEST_CASE("flux residuals stay below 1e-6") {
    const auto r = run("flux --t-max 1 --n 64 --a 1 --b 0.5 --c 0.2 --v 0.7");
    REQUIRE(r.status == 0);
    for (const auto& row : rows(r.out)) CHECK(std::stod(row[4]) <= 1e-6);
}

TEST_CASE("cir subcommand maps and rejects") {
    const auto ok = run("cir --hurst 0.7 --sigma 0.1 --rate 0.05 --dividend-h -0.01 --s-t 1 --delta-t 1");
    REQUIRE(ok.status == 0);
    CHECK(std::abs(std::stod(key_values(ok.out)["normalization"]) - 1.0) <= 5e-3);
    CHECK(run("cir --hurst 0.7 --sigma 0.5 --rate 0.05 --s-t 1 --delta-t 1").status == 2);
}

TEST_CASE("invalid input exits with status 2") {
    CHECK(run("omega --t 1 --s-re 1 --a -1").status == 2);
    CHECK(run("density --t 1 --mode sideways").status == 2);
    CHECK(run("omega --s-re 1").status == 2);
}

TEST_CASE("validate prints a JSON report") {
    const auto r = run("validate --suite laplace --fast");
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("criteria"));
}
