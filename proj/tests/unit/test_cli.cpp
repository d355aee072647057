#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "support.hpp"
#include "varhardy/cli.hpp"
#include "varhardy/errors.hpp"
#include "varhardy/io.hpp"

using namespace varhardy;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "varhardy_test_cli") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    [[nodiscard]] std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string shell(const std::string& cmd, int& status) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    status = pclose(pipe);
    return out;
}

}  // namespace

TEST_CASE("parse_command") {
    const auto norm = cli::parse_command({"norm", "--space", "s.json", "--exponent", "p.json", "--rv", "u.json"});
    CHECK(norm.verb == cli::Verb::Norm);
    CHECK(norm.space_path == "s.json");
    CHECK(norm.rv_path == "u.json");

    CHECK_THROWS_AS(cli::parse_command({"decompose", "--category", "4"}), UsageError);
    CHECK_THROWS_AS(cli::parse_command({"decompose", "--space", "s", "--exponent", "p", "--martingale", "f",
                                        "--category", "4"}),
                    UsageError);

    const auto verify = cli::parse_command({"verify", "--suite", "atomic,embedding", "--trials", "500", "--seed", "7"});
    CHECK(verify.verb == cli::Verb::Verify);
    CHECK(verify.suites == std::vector<std::string>{"atomic", "embedding"});
    CHECK(verify.trials == 500);
    CHECK(verify.seed == 7);

    CHECK_THROWS_AS(cli::parse_command({"frobnicate"}), UsageError);
    CHECK_THROWS_AS(cli::parse_command({"gen", "--bogus"}), UsageError);
    CHECK_THROWS_AS(cli::parse_command({"norm", "--space", "s", "--exponent", "p"}), UsageError);
    CHECK_THROWS_AS(cli::parse_command({"norm", "--space", "s", "--exponent", "p", "--mode", "Q"}), UsageError);
    CHECK(cli::parse_command({"gen", "--help"}).help.has_value());
}

TEST_CASE("norm of the zero variable prints 0") {
    TempDir tmp;
    const auto s = fixtures::dyadic2();
    io::write_file(tmp.file("s.json"), io::serialize_space(s));
    io::write_file(tmp.file("p.json"), io::serialize_exponent(Exponent({0.5, 1.0, 2.0, 3.0})));
    io::write_file(tmp.file("u.json"), io::serialize_values(RandomVariable::constant(4, 0.0)));
    const auto r = run({"norm", "--space", tmp.file("s.json"), "--exponent", tmp.file("p.json"), "--rv",
                        tmp.file("u.json")});
    CHECK(r.code == 0);
    CHECK(r.out == "0\n");

    io::write_file(tmp.file("f.json"), io::serialize_martingale(fixtures::rademacher2()));
    io::write_file(tmp.file("one.json"), io::serialize_exponent(Exponent::constant(4, 1.0)));
    const auto d = run({"norm", "--space", tmp.file("s.json"), "--exponent", tmp.file("one.json"), "--martingale",
                        tmp.file("f.json"), "--mode", "D"});
    CHECK(d.code == 0);
    CHECK(d.out == "2\n");

    const auto missing = run({"norm", "--space", tmp.file("nope.json"), "--exponent", tmp.file("p.json"), "--rv",
                              tmp.file("u.json")});
    CHECK(missing.code == 2);
}

TEST_CASE("decompose the Rademacher fixture") {
    TempDir tmp;
    const auto f = fixtures::rademacher2();
    io::write_file(tmp.file("s.json"), io::serialize_space(f.space()));
    io::write_file(tmp.file("p.json"), io::serialize_exponent(Exponent::constant(4, 1.0)));
    io::write_file(tmp.file("f.json"), io::serialize_martingale(f));
    const auto r = run({"decompose", "--space", tmp.file("s.json"), "--exponent", tmp.file("p.json"),
                        "--martingale", tmp.file("f.json"), "--category", "1", "-o", tmp.file("dec.json")});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("terms 2\n", 0) == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    const auto text = io::read_file(tmp.file("dec.json"));
    CHECK(text.find("\"k\":-1") != std::string::npos);
    CHECK(text.find("\"k\":0") != std::string::npos);
    CHECK(text.find("\"k\":1") == std::string::npos);
}

TEST_CASE("verify with an unknown suite exits 2") {
    const auto r = run({"verify", "--suite", "bogus", "--trials", "5", "--bounds", "/nonexistent.json"});
    CHECK(r.code == 2);
    CHECK(r.err.find("UnknownSuiteError") != std::string::npos);
}

TEST_CASE("VARHARDY_TOL is validated") {
    TempDir tmp;
    io::write_file(tmp.file("s.json"), io::serialize_space(fixtures::dyadic1()));
    io::write_file(tmp.file("p.json"), io::serialize_exponent(Exponent::constant(2, 2.0)));
    io::write_file(tmp.file("u.json"), io::serialize_values(RandomVariable({3.0, 4.0})));
    const std::vector<std::string> args{"norm", "--space", tmp.file("s.json"), "--exponent", tmp.file("p.json"),
                                        "--rv", tmp.file("u.json")};
    setenv("VARHARDY_TOL", "abc", 1);
    CHECK(run(args).code == 2);
    setenv("VARHARDY_TOL", "1e-10", 1);
    const auto ok = run(args);
    CHECK(ok.code == 0);
    CHECK(std::stod(ok.out) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-10));
    unsetenv("VARHARDY_TOL");
}

TEST_CASE("binary: gen round trip and reproducible verify") {
    TempDir tmp;
    const std::string bin = VARHARDY_CLI_PATH;
    int status = 0;
    const auto space_text = shell(bin + " gen --depth 6 --bias 0.3 --seed 4 --randomize-orientation", status);
    CHECK(status == 0);
    CHECK(io::serialize_space(io::parse_space(space_text)) == space_text);

    shell(bin + " gen --depth 4 --seed 2 -o " + tmp.file("s.json") + " --exponent-out " + tmp.file("p.json") +
              " --p-min 0.5 --p-max 3 --martingale-out " + tmp.file("f.json") + " --generator gaussian",
          status);
    REQUIRE(status == 0);
    const auto sp = io::parse_space(io::read_file(tmp.file("s.json")));
    const auto p = io::parse_exponent(io::read_file(tmp.file("p.json")));
    CHECK(p.p_minus() >= 0.5);
    CHECK(p.p_plus() <= 3.0);
    CHECK_NOTHROW(io::parse_martingale(sp, io::read_file(tmp.file("f.json"))));

    io::write_file(tmp.file("bounds.json"), "{\"bounds\":{}}\n");
    const std::string verify = bin + " verify --suite classical,transforms --trials 10 --seed 3 --bounds " +
                               tmp.file("bounds.json");
    shell(verify + " -o " + tmp.file("a.json") + " --csv " + tmp.file("a.csv"), status);
    CHECK(status == 0);
    shell(verify + " --jobs 2 -o " + tmp.file("b.json"), status);
    CHECK(status == 0);
    CHECK(io::read_file(tmp.file("a.json")) == io::read_file(tmp.file("b.json")));
    CHECK(io::read_file(tmp.file("a.csv")).find("classical,bgd_l2,10,") != std::string::npos);

    shell(bin + " verify --suite nope 2>/dev/null", status);
    CHECK(WEXITSTATUS(status) == 2);
}
