#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "mvlab/json_io.hpp"
#include "mvlab/scenarios.hpp"

using namespace mvlab;
namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "mvlab_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MVLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

void write_inputs() {
    static bool done = false;
    if (done) return;
    done = true;
    write_file_atomic(path_of("seg.json"), measure_to_json(scenarios::segment_measure(1.0, 20000)));
    write_file_atomic(path_of("circle.json"), measure_to_json(scenarios::unit_circle_measure(2048)));
    write_file_atomic(path_of("saddle.json"), riesz_to_json(scenarios::saddle_harmonic()));
    write_file_atomic(path_of("two_atom.json"), riesz_to_json(scenarios::two_atom_plane()));
    const RieszFunction const3(Dimension(2), {}, HarmonicSpec::constant(3.0), 4.0);
    write_file_atomic(path_of("const3.json"), riesz_to_json(const3));
    const RieszFunction const_minus2_3d(Dimension(3), {}, HarmonicSpec::constant(-2.0), 50.0);
    write_file_atomic(path_of("vminus2.json"), riesz_to_json(const_minus2_3d));
    const auto line = counterexample_line_measure(0.1, 20000);
    const auto annulus = line.restricted([](const Point& p) { return std::abs(p[0]) >= 1.0 / 400.0; });
    write_file_atomic(path_of("annulus.json"), measure_to_json(annulus));
    const RieszFunction on_support(Dimension(2), {{{0.3, 0.0}, 2.0}}, HarmonicSpec::zero(), 4.0);
    write_file_atomic(path_of("on_support.json"), riesz_to_json(on_support));
}

}  // namespace

TEST_CASE("cli mean-value: convergence, determinism, exit codes") {
    write_inputs();
    const std::string base = "mean-value --dim 2 --function " + path_of("saddle.json") + " --measure " +
                             path_of("seg.json") + " --x0 0,0 --eps-start 0.4 --eps-factor 0.5 "
                             "--eps-steps 8";
    CHECK(run_cli(base + " --tol 1e-3 --out " + path_of("mv.csv")) == 0);
    const std::string csv = read_file(path_of("mv.csv"));
    CHECK(csv.starts_with("eps,mean,target,error,atoms_in_ball\n"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);  // header + 8 rows

    // Byte-identical on a second run.
    CHECK(run_cli(base + " --tol 1e-3 --out " + path_of("mv2.csv")) == 0);
    CHECK(read_file(path_of("mv2.csv")) == csv);

    // JSON flavor.
    CHECK(run_cli(base + " --tol 1e-3 --out " + path_of("mv.json")) == 0);
    CHECK(read_file(path_of("mv.json")).find("\"converged\": true") != std::string::npos);

    // Unreachable tolerance: valid inputs, negative verdict.
    CHECK(run_cli(base + " --tol 1e-12 --out " + path_of("mv3.csv")) == 1);

    // An empty ball violates the lower mass-bound hypothesis: exit 1.
    CHECK(run_cli("mean-value --function " + path_of("saddle.json") + " --measure " + path_of("seg.json") +
                  " --x0 3,3 --eps-start 0.4 --eps-steps 4 --out " + path_of("mv4.csv")) == 1);

    // A minus-infinity target with thresholds: one heavy atom at the center.
    const RieszFunction heavy(Dimension(2), {{{0.0, 0.0}, 100.0}}, HarmonicSpec::zero(), 4.0);
    write_file_atomic(path_of("heavy.json"), riesz_to_json(heavy));
    CHECK(run_cli("mean-value --function " + path_of("heavy.json") + " --measure " + path_of("seg.json") +
                  " --x0 0,0 --eps-start 0.2 --eps-factor 0.5 --eps-steps 7 --target=-inf "
                  "--thresholds=-10,-100 --out " + path_of("mvinf.json")) == 0);
    CHECK(read_file(path_of("mvinf.json")).find("\"target\": \"-inf\"") != std::string::npos);

    // Usage errors: missing file, malformed inline JSON, bad schedule.
    CHECK(run_cli("mean-value --function /nonexistent.json --measure " + path_of("seg.json") +
                  " --x0 0,0 --eps-start 0.4 --out " + path_of("x.csv")) == 2);
    CHECK(run_cli("mean-value --function '{\"dim\": }' --measure " + path_of("seg.json") +
                  " --x0 0,0 --eps-start 0.4 --out " + path_of("x.csv")) == 2);
    CHECK(run_cli("mean-value --function " + path_of("saddle.json") + " --measure " + path_of("seg.json") +
                  " --x0 0,0 --eps-start 0.4 --eps-factor 1.5 --out " + path_of("x.csv")) == 2);
    CHECK(run_cli("definitely-not-a-command") == 2);
}

TEST_CASE("cli admissible") {
    write_inputs();
    CHECK(run_cli("admissible --gauge '{\"form\":\"power\",\"k\":1}' --dim 2 --c 5 --eps-start 0.1 "
                  "--out " + path_of("adm1.json")) == 0);
    // k = n-2 diverges.
    CHECK(run_cli("admissible --gauge '{\"form\":\"power\",\"k\":0}' --dim 2 --c 5 --eps-start 0.1 "
                  "--out " + path_of("adm2.json")) == 1);
    CHECK(read_file(path_of("adm2.json")).find("\"divergent\": true") != std::string::npos);
    // c <= 4 is a parameter error.
    CHECK(run_cli("admissible --gauge '{\"form\":\"power\",\"k\":1}' --dim 2 --c 4 --eps-start 0.1 "
                  "--out " + path_of("adm3.json")) == 2);
}

TEST_CASE("cli compare: hypersurface pass and co-dimension-2 failure") {
    write_inputs();
    // u = v: trivial pass on the circle.
    CHECK(run_cli("compare --function-u " + path_of("two_atom.json") + " --function-v " +
                  path_of("two_atom.json") + " --measure " + path_of("circle.json") +
                  " --check-points '1,0;0,1;-1,0' --eps-start 0.5 --eps-factor 0.6 --eps-steps 5 "
                  "--out " + path_of("cmp1.json")) == 0);

    // The co-dimension-2 scenario: audit passes, the conclusion fails.
    CHECK(run_cli("compare --function-u " + path_of("vminus2.json") +
                  " --function-v '{\"kind\":\"counterexample\",\"N\":400}' --measure " +
                  path_of("annulus.json") +
                  " --check-points 0,0,0 --eps-start 0.09 --eps-factor 0.7 --eps-steps 4 --out " +
                  path_of("cmp2.json")) == 1);
    const std::string rep = read_file(path_of("cmp2.json"));
    CHECK(rep.find("\"audit_ok\": true") != std::string::npos);
    CHECK(rep.find("\"conclusion_ok\": false") != std::string::npos);
}

TEST_CASE("cli ad-check") {
    write_inputs();
    CHECK(run_cli("ad-check --measure " + path_of("circle.json") +
                  " --k 1 --samples 32 --radii 0.5,0.35,0.25,0.18,0.12 --out " + path_of("ad1.json")) == 0);
    CHECK(run_cli("ad-check --measure " + path_of("seg.json") +
                  " --k 2 --samples 32 --radii 0.4,0.28,0.2,0.14,0.1 --out " + path_of("ad2.json")) == 1);
}

TEST_CASE("cli layer-cake") {
    write_inputs();
    CHECK(run_cli("layer-cake --function " + path_of("const3.json") + " --measure " + path_of("seg.json") +
                  " --out " + path_of("lc.json")) == 0);
    {
        const auto rep = nlohmann::json::parse(read_file(path_of("lc.json")));
        CHECK(rep.at("gap").get<double>() <= 1e-12 * std::max(1.0, rep.at("lhs").get<double>()));
    }
    // A function that goes negative on the support is a hypothesis violation.
    CHECK(run_cli("layer-cake --function " + path_of("saddle.json") + " --measure " +
                  path_of("circle.json") + " --out " + path_of("lc2.json")) == 1);
}

TEST_CASE("cli proof-bounds") {
    write_inputs();
    CHECK(run_cli("proof-bounds --measure " + path_of("seg.json") +
                  " --x0 0,0 --p 2 --gamma 1.5 --A 1 --B 2.01 --M 9 --eps1 0.05 "
                  "--gauge '{\"form\":\"power\",\"k\":1}' "
                  "--w-points '0.05,0.01;0.012,0.006;-0.03,0.02' --eps-samples 0.03,0.015,0.008 "
                  "--out " + path_of("pb.json")) == 0);
    CHECK(read_file(path_of("pb.json")).find("\"pass\": true") != std::string::npos);
}

TEST_CASE("cli density") {
    write_inputs();
    CHECK(run_cli("density --function " + path_of("on_support.json") + " --measure " + path_of("seg.json") +
                  " --s 1 --x0 0,0 --radii 0.2,0.14,0.1,0.07,0.05 --out " + path_of("dn.json")) == 0);
    const std::string rep = read_file(path_of("dn.json"));
    CHECK(rep.find("\"finite\": true") != std::string::npos);
}

TEST_CASE("cli counterexample") {
    write_inputs();
    CHECK(run_cli("counterexample --N 200 --eps 0.1 --resolution 5000 --out " + path_of("ce.json")) == 0);
    const std::string rep = read_file(path_of("ce.json"));
    CHECK(rep.find("\"pass\": true") != std::string::npos);
    CHECK(run_cli("counterexample --N 200 --eps 0.1 --resolution 5000 --format csv --out " +
                  path_of("ce.csv")) == 0);
    CHECK(read_file(path_of("ce.csv")).starts_with("N,eps,resolution,line_mean,value_at_0,gap\n"));
    // eps below 1/N cannot demonstrate the gap: parameter error.
    CHECK(run_cli("counterexample --N 200 --eps 0.004 --resolution 5000 --out " + path_of("ce2.json")) == 2);
}
