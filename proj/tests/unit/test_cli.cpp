#include <csignal>
#include <fstream>
#include <random>
#include <sstream>

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "service_client.hpp"
#include "test_util.hpp"

using namespace autoviz;
using namespace autoviz::test_support;
namespace fs = std::filesystem;

namespace {

struct Run {
    int exit_code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Runs the CLI with stdout and stderr captured in files.
Run run_cli(const std::vector<std::string>& args, const fs::path& scratch) {
    const auto out = scratch / "stdout.txt", err = scratch / "stderr.txt";
    const pid_t pid = fork();
    if (pid == 0) {
        const int o = open(out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        const int e = open(err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        dup2(o, 1);
        dup2(e, 2);
        std::vector<char*> argv{const_cast<char*>(AUTOVIZ_CLI_PATH)};
        for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        execv(AUTOVIZ_CLI_PATH, argv.data());
        _exit(127);
    }
    int status = 0;
    waitpid(pid, &status, 0);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = temp_store("cli");
        fs::create_directories(dir);
        std::mt19937_64 rng(77);
        csv = random_csv(rng, 150, 3, 2, 0.08);
        std::ofstream(dir / "data.csv", std::ios::binary) << csv;
    }
    void TearDown() override { fs::remove_all(dir); }
    fs::path dir;
    std::string csv;
};

int free_port() {
    const int fd = socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    socklen_t len = sizeof addr;
    bind(fd, reinterpret_cast<sockaddr*>(&addr), len);
    getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    close(fd);
    return ntohs(addr.sin_port);
}

} // namespace

TEST_F(CliTest, AnalyzeWritesOutputsDeterministically) {
    const auto r1 = run_cli({"analyze", (dir / "data.csv").string(), "--out", (dir / "a").string()}, dir);
    ASSERT_EQ(r1.exit_code, 0) << r1.err;
    EXPECT_NE(r1.out.find("completeness"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "a" / "report.json"));
    EXPECT_TRUE(fs::exists(dir / "a" / "cleaned.csv"));
    EXPECT_TRUE(fs::exists(dir / "a" / "charts" / "chart_01.json"));
    EXPECT_TRUE(fs::exists(dir / "a" / "timings.json"));

    const auto r2 = run_cli({"analyze", (dir / "data.csv").string(), "-o", (dir / "b").string(), "-q"}, dir);
    ASSERT_EQ(r2.exit_code, 0);
    EXPECT_TRUE(r2.out.empty());
    EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
}

TEST_F(CliTest, FlagsReachThePipeline) {
    const auto r = run_cli({"analyze", (dir / "data.csv").string(), "-o", (dir / "f").string(), "--top-charts", "2",
                            "--no-scaling", "--target", "num_0", "--w-interpretability", "0.2", "--w-relationship", "0.6",
                            "--w-fit", "0.2", "--json"},
                           dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto summary = Json::parse(r.out);
    EXPECT_LE(summary["charts"].size(), 2u);
    const auto report = Json::parse(slurp(dir / "f" / "report.json"));
    EXPECT_EQ(report["feature_importance"]["target"], "num_0");
    EXPECT_TRUE(report["cleaning"]["scalings"].empty());

    const auto bad = run_cli({"analyze", (dir / "data.csv").string(), "-o", (dir / "g").string(), "--w-fit", "0.9"}, dir);
    EXPECT_EQ(bad.exit_code, 2);
}

TEST_F(CliTest, ExitCodes) {
    auto r = run_cli({"analyze", (dir / "missing.csv").string(), "-o", (dir / "x").string()}, dir);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_FALSE(r.err.empty());
    r = run_cli({"analyze"}, dir);
    EXPECT_EQ(r.exit_code, 2);
    r = run_cli({"frobnicate"}, dir);
    EXPECT_EQ(r.exit_code, 2);
    r = run_cli({"analyze", (dir / "data.csv").string(), "-o", (dir / "x").string(), "-t", "nope"}, dir);
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("unknown_target"), std::string::npos);
    r = run_cli({"--version"}, dir);
    EXPECT_EQ(r.exit_code, 0);
}

TEST_F(CliTest, Profile) {
    auto r = run_cli({"profile", (dir / "data.csv").string()}, dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("num_0"), std::string::npos);
    EXPECT_NE(r.out.find("numeric"), std::string::npos);
    EXPECT_NE(r.out.find("categorical"), std::string::npos);
    EXPECT_NE(r.out.find("0.9"), std::string::npos); // completeness below 1 shows up

    std::ofstream(dir / "empty.csv") << "";
    r = run_cli({"profile", (dir / "empty.csv").string()}, dir);
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("empty_table"), std::string::npos);
}

TEST_F(CliTest, CliAndServiceReportsMatch) {
    const auto r = run_cli({"analyze", (dir / "data.csv").string(), "-o", (dir / "c").string(), "-q"}, dir);
    ASSERT_EQ(r.exit_code, 0);
    auto cfg = test_config(dir / "store");
    service::Service svc(cfg);
    svc.start();
    httplib::Client cli("127.0.0.1", svc.port());
    auto res = upload_csv(cli, csv);
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200);
    EXPECT_EQ(res->body, slurp(dir / "c" / "report.json"));
}

TEST_F(CliTest, ServeAnswersAndStopsOnSignal) {
    const int port = free_port();
    std::ofstream(dir / "svc.json") << Json{{"store_dir", (dir / "store").string()}, {"bind", "127.0.0.1"}}.dump();
    const pid_t pid = fork();
    if (pid == 0) {
        const int devnull = open("/dev/null", O_WRONLY);
        dup2(devnull, 2);
        execl(AUTOVIZ_CLI_PATH, AUTOVIZ_CLI_PATH, "serve", "--config", (dir / "svc.json").c_str(), "--port",
              std::to_string(port).c_str(), nullptr);
        _exit(127);
    }
    httplib::Client cli("127.0.0.1", port);
    cli.set_connection_timeout(std::chrono::seconds(1));
    httplib::Result h;
    for (int i = 0; i < 200 && !h; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(25));
        h = cli.Get("/api/health");
    }
    ASSERT_TRUE(h);
    EXPECT_EQ(h->status, 200);

    // a second server on the same port fails with exit 1
    const auto busy = run_cli({"serve", "--config", (dir / "svc.json").string(), "--port", std::to_string(port)}, dir);
    EXPECT_EQ(busy.exit_code, 1);
    EXPECT_FALSE(busy.err.empty());

    kill(pid, SIGINT);
    int status = 0;
    waitpid(pid, &status, 0);
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 0);
}
