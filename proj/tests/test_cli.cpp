#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using Catch::Approx;

namespace {

const std::string kCli = AOI_CLI_PATH;
const fs::path kConfigDir = AOI_CONFIG_DIR;

struct RunResult {
    int exit_code;
    std::string output;
};

fs::path scratch_dir() {
    static const fs::path dir = [] {
        std::mt19937_64 rng(std::random_device{}());
        const fs::path p =
            fs::temp_directory_path() / ("aoi-cli-test-" + std::to_string(rng()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

RunResult run(const std::string& args) {
    const fs::path out_file = scratch_dir() / "stdout.txt";
    const std::string cmd =
        kCli + " " + args + " > " + out_file.string() + " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return {code, ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> read_csv_rows(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line); // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::size_t begin = 0;
        while (begin <= line.size()) {
            const auto comma = line.find(',', begin);
            const std::string cell = line.substr(
                begin, comma == std::string::npos ? comma : comma - begin);
            row.push_back(cell.empty() ? std::nan("") : std::stod(cell));
            if (comma == std::string::npos) {
                break;
            }
            begin = comma + 1;
        }
        rows.push_back(row);
    }
    return rows;
}

std::map<std::string, double> parse_key_values(const std::string& text) {
    std::map<std::string, double> kv;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        kv[line.substr(0, eq)] = std::stod(line.substr(eq + 1));
    }
    return kv;
}

} // namespace

TEST_CASE("simulate writes the expected mesh") {
    const fs::path out = scratch_dir() / "sim1.csv";
    const auto res = run("simulate " + (kConfigDir / "test1.cfg").string() +
                         " --h 0.1 --tmax 1 --scheme nsfd --out " + out.string());
    REQUIRE(res.exit_code == 0);

    const auto rows = read_csv_rows(out);
    REQUIRE(rows.size() == 11);
    REQUIRE(rows[0][0] == 0.0);
    REQUIRE(rows[0][1] == 9.0);
    REQUIRE(rows[0][2] == 1.0);
    REQUIRE(rows[1][0] == Approx(0.1));
    REQUIRE(rows[1][1] == Approx(8.737864077669903).epsilon(1e-14));
    REQUIRE(rows[1][2] == Approx(1.0430875391157827).epsilon(1e-13));

    SECTION("repeated runs are byte-identical") {
        const fs::path out2 = scratch_dir() / "sim1_again.csv";
        const auto res2 = run("simulate " + (kConfigDir / "test1.cfg").string() +
                              " --h 0.1 --tmax 1 --scheme nsfd --out " + out2.string());
        REQUIRE(res2.exit_code == 0);
        REQUIRE(slurp(out) == slurp(out2));
    }
}

TEST_CASE("simulate on a disease-free config keeps phi at zero") {
    const fs::path cfg = scratch_dir() / "free.cfg";
    std::ofstream(cfg) << "kernel.family = exponential\nkernel.lambda = 1\n"
                          "model.N = 100\nmodel.S0 = 100\nmodel.beta = 0.5\n";
    const fs::path out = scratch_dir() / "free.csv";
    const auto res =
        run("simulate " + cfg.string() + " --h 0.5 --tmax 20 --out " + out.string());
    REQUIRE(res.exit_code == 0);
    for (const auto& row : read_csv_rows(out)) {
        REQUIRE(row[1] == 100.0);
        REQUIRE(row[2] == 0.0);
    }
}

TEST_CASE("config errors exit with code 1") {
    SECTION("missing config file") {
        const auto res = run("simulate /nonexistent.cfg --h 0.1 --tmax 1 --out " +
                             (scratch_dir() / "x.csv").string());
        REQUIRE(res.exit_code == 1);
    }
    SECTION("unknown key") {
        const fs::path cfg = scratch_dir() / "bad_key.cfg";
        std::ofstream(cfg) << "kernel.family = powerlaw\nkernel.p = 2\n"
                              "model.N = 10\nmodel.S0 = 9\nmodel.beta = 0.3\n"
                              "model.gamma = 1\n";
        const auto res = run("indicators " + cfg.string() + " --h 1");
        REQUIRE(res.exit_code == 1);
    }
    SECTION("invalid model") {
        const fs::path cfg = scratch_dir() / "bad_model.cfg";
        std::ofstream(cfg) << "kernel.family = powerlaw\nkernel.p = 2\n"
                              "model.N = 10\nmodel.S0 = 11\nmodel.beta = 0.3\n";
        const auto res = run("indicators " + cfg.string() + " --h 1");
        REQUIRE(res.exit_code == 1);
    }
    SECTION("family parameter mismatch") {
        const fs::path cfg = scratch_dir() / "bad_family.cfg";
        std::ofstream(cfg) << "kernel.family = gaussian\nkernel.mu = 1\n"
                              "kernel.sigma = 1\nkernel.p = 2\n"
                              "model.N = 10\nmodel.S0 = 9\nmodel.beta = 0.3\n";
        const auto res = run("indicators " + cfg.string() + " --h 1");
        REQUIRE(res.exit_code == 1);
    }
    SECTION("unwritable output") {
        const auto res = run("simulate " + (kConfigDir / "test1.cfg").string() +
                             " --h 0.1 --tmax 1 --out /nonexistent-dir/out.csv");
        REQUIRE(res.exit_code == 1);
    }
    SECTION("bad scheme name") {
        const auto res = run("simulate " + (kConfigDir / "test1.cfg").string() +
                             " --h 0.1 --tmax 1 --scheme euler --out " +
                             (scratch_dir() / "x.csv").string());
        REQUIRE(res.exit_code == 1);
    }
}

TEST_CASE("indicators report the discrete and continuous quantities") {
    const auto res = run("indicators " + (kConfigDir / "test1.cfg").string() + " --h 1");
    REQUIRE(res.exit_code == 0);
    const auto kv = parse_key_values(res.output);
    REQUIRE(kv.at("R0") == Approx(3.0).epsilon(1e-10));
    REQUIRE(kv.at("R0_h") == Approx(1.9348022005446792).margin(1e-5));
    REQUIRE(kv.at("tau_h") == Approx(0.3550659331517736).margin(1e-5));
    REQUIRE(kv.at("r_discrete") > 0.0);
    REQUIRE(kv.at("S_inf_relation") == Approx(0.5244280693901275).margin(1e-6));

    SECTION("gaussian config reports the consistent reproduction number") {
        const auto res2 =
            run("indicators " + (kConfigDir / "test2.cfg").string() + " --h 0.1");
        REQUIRE(res2.exit_code == 0);
        const auto kv2 = parse_key_values(res2.output);
        REQUIRE(kv2.at("R0") == Approx(2.0743873838220393).epsilon(1e-10));
        REQUIRE(kv2.at("S_inf_relation") == Approx(18388.676349184693).margin(0.01));
        REQUIRE(kv2.at("r_continuous") == Approx(2.2059728679411846).margin(1e-8));
    }
}

TEST_CASE("converge emits the table with order columns") {
    const fs::path out = scratch_dir() / "conv.csv";
    const auto res = run("converge " + (kConfigDir / "test1.cfg").string() +
                         " --h-list 1e-1,1e-2 --h-ref 1e-4 --tmax 1 --out " +
                         out.string());
    REQUIRE(res.exit_code == 0);
    {
        std::ifstream in(out);
        std::string header;
        std::getline(in, header);
        REQUIRE(header == "h,errS_abs,errPhi_abs,errS_rel,errPhi_rel,ordS,ordPhi");
    }
    const auto rows = read_csv_rows(out);
    REQUIRE(rows.size() == 2);
    REQUIRE(std::isnan(rows[0][5])); // first row has no order
    REQUIRE(rows[1][5] == Approx(0.90).margin(0.05));

    SECTION("single h leaves the order columns empty") {
        const fs::path out2 = scratch_dir() / "conv_single.csv";
        const auto res2 = run("converge " + (kConfigDir / "test1.cfg").string() +
                              " --h-list 1e-1 --h-ref 1e-3 --tmax 1 --out " +
                              out2.string());
        REQUIRE(res2.exit_code == 0);
        const auto rows2 = read_csv_rows(out2);
        REQUIRE(rows2.size() == 1);
        REQUIRE(std::isnan(rows2[0][5]));
        REQUIRE(std::isnan(rows2[0][6]));
    }
    SECTION("non-nested reference exits with code 1") {
        const auto res2 = run("converge " + (kConfigDir / "test1.cfg").string() +
                              " --h-list 1e-1 --h-ref 3e-3 --tmax 1 --out " +
                              (scratch_dir() / "x.csv").string());
        REQUIRE(res2.exit_code == 1);
    }
    SECTION("deterministic output bytes") {
        const fs::path out3 = scratch_dir() / "conv_again.csv";
        const auto res3 = run("converge " + (kConfigDir / "test1.cfg").string() +
                              " --h-list 1e-1,1e-2 --h-ref 1e-4 --tmax 1 --out " +
                              out3.string());
        REQUIRE(res3.exit_code == 0);
        REQUIRE(slurp(out) == slurp(out3));
    }
}

TEST_CASE("compare separates the schemes on the stiff configuration") {
    const fs::path prefix = scratch_dir() / "cmp";
    const auto res = run("compare " + (kConfigDir / "test2_beta6.cfg").string() +
                         " --h 0.5 --out-prefix " + prefix.string());
    REQUIRE(res.exit_code == 0);
    const auto kv = parse_key_values(res.output);
    REQUIRE(kv.at("nsfd_violations") == 0.0);
    REQUIRE(kv.at("trapz_violations") >= 1.0);
    REQUIRE(fs::exists(prefix.string() + "_nsfd.csv"));
    REQUIRE(fs::exists(prefix.string() + "_trapz.csv"));

    SECTION("disease-free config yields no violations for either scheme") {
        const fs::path cfg = scratch_dir() / "free2.cfg";
        std::ofstream(cfg) << "kernel.family = gaussian\nkernel.mu = 0.2\n"
                              "kernel.sigma = 0.4\nmodel.N = 1000\n"
                              "model.S0 = 1000\nmodel.beta = 1e-3\n";
        const auto res2 = run("compare " + cfg.string() + " --h 0.5 --out-prefix " +
                              (scratch_dir() / "cmp_free").string());
        REQUIRE(res2.exit_code == 0);
        const auto kv2 = parse_key_values(res2.output);
        REQUIRE(kv2.at("nsfd_violations") == 0.0);
        REQUIRE(kv2.at("trapz_violations") == 0.0);
    }
    SECTION("unwritable prefix exits with code 1") {
        const auto res2 = run("compare " + (kConfigDir / "test2_beta6.cfg").string() +
                              " --h 0.5 --out-prefix /nonexistent-dir/cmp");
        REQUIRE(res2.exit_code == 1);
    }
    SECTION("trapezoidal state blowup exits with code 2") {
        const fs::path cfg = scratch_dir() / "blowup.cfg";
        std::ofstream(cfg) << "kernel.family = gaussian\nkernel.mu = 0.2\n"
                              "kernel.sigma = 0.2\nmodel.N = 1e150\n"
                              "model.S0 = 9.99e149\nmodel.beta = 1e100\n";
        const auto res2 = run("simulate " + cfg.string() +
                              " --h 5 --tmax 100 --scheme trapz --out " +
                              (scratch_dir() / "blowup.csv").string());
        REQUIRE(res2.exit_code == 2);
    }
}

TEST_CASE("tabulated kernels load from a two-column csv") {
    const fs::path table = scratch_dir() / "kernel_table.csv";
    std::ofstream(table) << "t,value\n0,1.0\n1,0.5\n2,0\n";
    const fs::path cfg = scratch_dir() / "tab.cfg";
    std::ofstream(cfg) << "kernel.family = tabulated\nkernel.table = "
                       << table.filename().string()
                       << "\nmodel.N = 100\nmodel.S0 = 90\nmodel.beta = 0.02\n";
    const auto res = run("indicators " + cfg.string() + " --h 0.25");
    REQUIRE(res.exit_code == 0);
    const auto kv = parse_key_values(res.output);
    REQUIRE(kv.at("R0") == Approx(0.02 * 100.0 * 1.0).epsilon(1e-12));
}
