#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "neumann_mc/experiments.hpp"

using namespace nmc;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_dir(const std::string& leaf) {
    auto d = std::filesystem::temp_directory_path() / leaf;
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("config parsing") {
    std::istringstream in(
        "# comment\n"
        "experiment = mixed_euler\n"
        "seed = 7\n"
        "n = 500\n"
        "alpha_list = 0.5\n"
        "delta_list = 0.01\n"
        "xi_list = 0.01\n");
    const ExperimentConfig cfg = parse_config(in);
    CHECK(cfg.id == ExperimentId::mixed_euler);
    CHECK(cfg.seed == 7);
    CHECK(cfg.n == 500);
    REQUIRE(cfg.alphas.size() == 1);
    CHECK(cfg.alphas[0] == 0.5);
    REQUIRE(cfg.delta_xi.size() == 1);
    CHECK(cfg.delta_xi[0].first == 0.01);

    std::istringstream bad_key("experiment = mixed_euler\nbogus = 1\n");
    CHECK_THROWS_AS(parse_config(bad_key), ConfigError);

    std::istringstream bad_exp("experiment = nonsense\n");
    CHECK_THROWS_AS(parse_config(bad_exp), ConfigError);

    std::istringstream missing("n = 10\n");
    CHECK_THROWS_AS(parse_config(missing), ConfigError);

    // fd1 is rejected for the finite-horizon pure Neumann experiment
    std::istringstream fd1_bad(
        "experiment = neumann_wos\nscheme_list = fd1\n");
    CHECK_THROWS_AS(parse_config(fd1_bad), ConfigError);

    // ... but fine for the mixed one
    std::istringstream fd1_ok("experiment = mixed_wos\nscheme_list = fd1\n");
    CHECK(parse_config(fd1_ok).schemes[0] == Scheme::fd1);
}

TEST_CASE("table presets cover 1..8") {
    for (int t = 1; t <= 8; ++t) {
        const ExperimentConfig cfg = table_config(t);
        CHECK(cfg.stem() == "table" + std::to_string(t));
        validate_config(cfg);
    }
    CHECK_THROWS_AS(table_config(0), ConfigError);
    CHECK_THROWS_AS(table_config(9), ConfigError);
}

TEST_CASE("mixed euler experiment writes a reproducible csv") {
    const auto dir = temp_dir("nmc_exp_mixed");
    ExperimentConfig cfg;
    cfg.id = ExperimentId::mixed_euler;
    cfg.n = 400;
    cfg.seed = 11;
    cfg.alphas = {1.0 / 3.0};
    cfg.delta_xi = {{0.01, 0.01}};
    cfg.t_cap_mixed = 100.0;

    const auto res1 = run_experiment(cfg, dir.string(), 2);
    REQUIRE(res1.files.size() == 2); // csv + sidecar
    const std::string csv1 = slurp(res1.files[0]);
    CHECK(csv1.find("alpha,delta,xi,point,x,y,exact,estimate,abs_error,std_error") == 0);
    CHECK(csv1.find("M1") != std::string::npos);

    // byte-identical rerun, and worker-count independent
    const auto res2 = run_experiment(cfg, dir.string(), 1);
    CHECK(slurp(res2.files[0]) == csv1);

    const std::string sidecar = slurp(res1.files[1]);
    CHECK(sidecar.find("\"seed\": 11") != std::string::npos);
}

TEST_CASE("preliminary experiment emits the two series") {
    const auto dir = temp_dir("nmc_exp_prelim");
    ExperimentConfig cfg;
    cfg.id = ExperimentId::neumann_preliminary;
    cfg.n = 300;
    cfg.seed = 3;
    cfg.prelim_delta = 0.01;
    cfg.t_grid = {0.5, 1.0, 2.0};
    cfg.var_t_grid = {1.0, 2.0};

    const auto res = run_experiment(cfg, dir.string(), 2);
    REQUIRE(res.files.size() == 3);
    const std::string mean_csv = slurp(res.files[0]);
    CHECK(mean_csv.find("t,mean,std_error") == 0);
    // one row per grid point plus header
    CHECK(std::count(mean_csv.begin(), mean_csv.end(), '\n') == 4);
    const std::string var_csv = slurp(res.files[1]);
    CHECK(var_csv.find("t,variance,mean,std_error") == 0);
    CHECK(std::count(var_csv.begin(), var_csv.end(), '\n') == 3);
}

TEST_CASE("spectral experiment writes table and nodal values") {
    const auto dir = temp_dir("nmc_exp_spectral");
    ExperimentConfig cfg;
    cfg.id = ExperimentId::spectral_exact;
    cfg.seed = 5;
    cfg.alphas = {1.0 / 3.0};
    cfg.basis_n = {2};
    cfg.spectral_rows = {{0.01, 200, 0}};

    const auto res = run_experiment(cfg, dir.string(), 2);
    REQUIRE(res.files.size() == 3);
    const std::string csv = slurp(res.files[0]);
    CHECK(csv.find("delta,m,q,err1_N2,kappa_N2") == 0);
    const std::string nodal = slurp(res.files[1]);
    CHECK(nodal.find("delta,m,q,basis_n,a,b,z_x,z_y,u") == 0);
    // 8 retained nodes for N=2
    CHECK(std::count(nodal.begin(), nodal.end(), '\n') == 9);
}

TEST_CASE("wos experiment builds and caches its table") {
    const auto dir = temp_dir("nmc_exp_wos");
    ExperimentConfig cfg;
    cfg.id = ExperimentId::mixed_wos;
    cfg.n = 200;
    cfg.seed = 9;
    cfg.alphas = {1.0 / 3.0};
    cfg.schemes = {Scheme::oneside3};
    cfg.h_list = {0.1};
    cfg.table_pairs = 5000;
    cfg.table_paths = 500;
    cfg.table_delta_pre = 1e-3;
    cfg.table_path = (dir / "table.bin").string();

    const auto res = run_experiment(cfg, dir.string(), 2);
    CHECK(std::filesystem::exists(cfg.table_path));
    const std::string csv = slurp(res.files[0]);
    CHECK(csv.find("alpha,scheme,h,point") == 0);
    CHECK(csv.find("oneside3") != std::string::npos);
}
