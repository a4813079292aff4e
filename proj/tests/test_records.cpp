#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>

#include "arw/errors.hpp"
#include "arw/records.hpp"

using namespace arw;

TEST_CASE("record line round trip") {
    ExperimentRecord r;
    r.n = 65;
    r.N = 16;
    r.E = 2566.0971442832331;
    r.seed = 123456789012345ull;
    r.trials = 500;
    r.grid_M = 512;
    r.sample_mean_L = 17.904134052358472;
    r.sample_var_L = 0.055337632670724852;
    r.se_mean = 0.0105202312399229;
    r.se_var = 0.004761181697501;
    r.theory_mean = 17.909833696475353;
    r.theory_var_leading = 0.02033879395536518;
    r.mu4 = 0.19715976331360946;
    r.c_n = 0.0020290468208396064;
    r.r5_error_scale = 12.5;
    r.aborted_trials = 0;
    r.wall_time_s = 2.5;

    std::string line = record_line(r);
    ExperimentRecord q = parse_record_line(line);
    CHECK(q.n == r.n);
    CHECK(q.N == r.N);
    CHECK(q.E == r.E);
    CHECK(q.seed == r.seed);
    CHECK(q.trials == r.trials);
    CHECK(q.grid_M == r.grid_M);
    CHECK(q.sample_mean_L == r.sample_mean_L);
    CHECK(q.sample_var_L == r.sample_var_L);
    CHECK(q.se_mean == r.se_mean);
    CHECK(q.se_var == r.se_var);
    CHECK(q.theory_mean == r.theory_mean);
    CHECK(q.theory_var_leading == r.theory_var_leading);
    CHECK(q.mu4 == r.mu4);
    CHECK(q.c_n == r.c_n);
    CHECK(q.r5_error_scale == r.r5_error_scale);
    CHECK(q.aborted_trials == r.aborted_trials);
    // emit(parse(emit(x))) is byte-stable
    CHECK(record_line(q) == line);
    // wall time never enters the line
    CHECK(line.find("wall") == std::string::npos);
}

TEST_CASE("record line with unavailable error scale") {
    ExperimentRecord r;
    r.n = 1;
    r.r5_error_scale = std::numeric_limits<double>::quiet_NaN();
    std::string l = record_line(r);
    CHECK(l.find("\"r5_error_scale\":null") != std::string::npos);
    CHECK(std::isnan(parse_record_line(l).r5_error_scale));
}

TEST_CASE("manifest round trip") {
    RunManifest m;
    m.command = "experiment";
    m.params = {{"n", "25"}, {"trials", "500"}, {"seed", "7"}};
    m.timestamp = "2024-05-01T10:00:00Z";
    m.inputs = {};
    m.outputs = {"out.jsonl"};
    std::string line = manifest_line(m);
    CHECK(is_manifest_line(line));
    CHECK(parse_manifest_line(line) == m);
    CHECK_THROWS_AS(parse_manifest_line("{}"), Error);
}

TEST_CASE("record file reader skips comments") {
    const char* path = "test_records_tmp.jsonl";
    {
        std::ofstream f(path);
        RunManifest m;
        m.command = "experiment";
        f << manifest_line(m) << "\n";
        ExperimentRecord r;
        r.n = 25;
        r.N = 12;
        f << record_line(r) << "\n";
        r.n = 65;
        r.N = 16;
        f << record_line(r) << "\n";
    }
    auto recs = read_record_file(path);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].n == 25);
    CHECK(recs[1].n == 65);
    std::remove(path);
}
