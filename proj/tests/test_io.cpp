#include <doctest.h>

#include <sstream>
#include <stack>

#include "netdyn/io.hpp"

using namespace netdyn;

namespace {

// Minimal XML well-formedness: balanced, properly nested element tags.
bool balanced_xml(const std::string& doc) {
    std::stack<std::string> open;
    std::size_t pos = 0;
    while ((pos = doc.find('<', pos)) != std::string::npos) {
        const std::size_t end = doc.find('>', pos);
        if (end == std::string::npos) return false;
        const std::string tag = doc.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?' || tag[0] == '!') continue;
        if (tag.back() == '/') continue;
        const std::string name = tag.substr(tag[0] == '/' ? 1 : 0, tag.find_first_of(" \t\n") - (tag[0] == '/' ? 1 : 0));
        if (tag[0] == '/') {
            if (open.empty() || open.top() != name) return false;
            open.pop();
        } else {
            open.push(name);
        }
    }
    return open.empty();
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

Trajectory sample_trajectory() {
    Trajectory t;
    t.times = {0.0, 0.5, 1.0};
    t.values = {{0.2, 0.8}, {0.30000000000000004, 0.7}, {1.0 / 3.0, 2.0 / 3.0}};
    return t;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678901234567, 0.0, -2.5}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("trajectory and ensemble CSV") {
    CHECK(share_columns(2, 2) == std::vector<std::string>{"c_1_1", "c_1_2", "c_2_1", "c_2_2"});

    std::stringstream out;
    write_trajectory_csv(out, sample_trajectory(), 2, 1);
    const std::string text = out.str();
    CHECK(text.rfind("t,c_1_1,c_2_1\n0,0.20000000000000001,0.80000000000000004\n", 0) == 0);
    const CsvTable table = read_csv(out);
    CHECK(table.header == std::vector<std::string>{"t", "c_1_1", "c_2_1"});
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[2][1] == 1.0 / 3.0);
    CHECK(table.rows[1][1] == 0.30000000000000004);

    EnsembleStats stats;
    stats.times = {0.0, 1.0};
    stats.mean = {{0.5, 0.5}, {0.4, 0.6}};
    stats.stddev = {{0.0, 0.0}, {0.1, 0.1}};
    std::stringstream ens;
    write_ensemble_csv(ens, stats, 2, 1);
    CHECK(ens.str().rfind("t,c_1_1,c_2_1,std_1_1,std_2_1\n", 0) == 0);

    Trajectory bad = sample_trajectory();
    bad.values.pop_back();
    std::stringstream sink;
    CHECK_THROWS_AS(write_trajectory_csv(sink, bad, 2, 1), std::invalid_argument);
}

TEST_CASE("malformed CSV is rejected") {
    std::stringstream empty("");
    CHECK_THROWS_AS(read_csv(empty), CsvError);
    std::stringstream ragged("t,c_1_1\n0,1,2\n");
    CHECK_THROWS_AS(read_csv(ragged), CsvError);
    std::stringstream junk("t,c_1_1\n0,abc\n");
    CHECK_THROWS_AS(read_csv(junk), CsvError);
    std::stringstream ok("t,c_1_1\r\n0,1\r\n");
    CHECK(read_csv(ok).rows.size() == 1);
}

TEST_CASE("SVG rendering") {
    std::stringstream traj;
    write_trajectory_csv(traj, sample_trajectory(), 2, 1);
    EnsembleStats stats;
    stats.times = {0.0, 0.5, 1.0};
    stats.mean = {{0.2, 0.8}, {0.3, 0.7}, {0.35, 0.65}};
    stats.stddev = {{0.0, 0.0}, {0.05, 0.05}, {0.04, 0.04}};
    std::stringstream ens;
    write_ensemble_csv(ens, stats, 2, 1);
    const std::vector<PlotSeries> series{{"ensemble", read_csv(ens)}, {"mfe", read_csv(traj)}};

    const std::string svg = render_svg(series, "fig2a");
    CHECK(balanced_xml(svg));
    CHECK(svg.find("version=\"1.1\"") != std::string::npos);
    CHECK(count(svg, "<polygon") == 2);
    CHECK(count(svg, "<polyline") == 4);
    CHECK(count(svg, "stroke-dasharray") == 4);  // two dashed curves plus their legend swatches
    CHECK(render_svg(series, "fig2a") == svg);

    std::stringstream no_shares("t,x\n0,1\n1,2\n");
    CHECK_THROWS_AS(render_svg({{"bad", read_csv(no_shares)}}), CsvError);
    std::stringstream other_times("t,c_1_1\n0,1\n2,2\n3,2\n");
    CHECK_THROWS_AS(render_svg({series[0], {"shifted", read_csv(other_times)}}), CsvError);
}
