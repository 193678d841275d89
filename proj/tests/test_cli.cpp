// End-to-end checks of the installed binary: subcommands, exit codes, and
// the determinism of written traces. IVR_BIN and IVR_DATA come from ctest.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int g_failures = 0;

std::string bin() {
  const char* b = std::getenv("IVR_BIN");
  return b ? b : "./build/ivr";
}

std::string data_dir() {
  const char* d = std::getenv("IVR_DATA");
  return d ? d : "data";
}

int run(const std::string& args, std::string* output = nullptr) {
  std::string cmd = bin() + " " + args + " > /tmp/ivr_cli_out.txt 2>&1";
  int rc = std::system(cmd.c_str());
  if (output) {
    std::ifstream in("/tmp/ivr_cli_out.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    *output = ss.str();
  }
  return WEXITSTATUS(rc);
}

void expect(bool cond, const std::string& what) {
  if (!cond) {
    ++g_failures;
    std::cerr << "FAIL: " << what << "\n";
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  std::string out;

  expect(run("levels --variant plain --capitals 1 --count 2", &out) == 0, "levels exit 0");
  expect(out.find("\"l\"") != std::string::npos && out.find("24") != std::string::npos,
         "levels prints l including 24");

  expect(run("levels --variant warped --capitals 1 --count 2", &out) == 2,
         "unknown variant exits 2");

  expect(run("validate --martingale " + data_dir() + "/adversary_doubling.json --depth 10",
             &out) == 0,
         "valid martingale exits 0");
  expect(run("validate --martingale " + data_dir() + "/adversary_bad.json --depth 8", &out) == 1,
         "overstaked table exits 1");
  expect(out.find("value -1") != std::string::npos, "validate names the negative value");

  expect(run("force --adversary " + data_dir() + "/adversary_doubling.json --depth 5", &out) ==
             0,
         "force exits 0");
  expect(out.find("\"path\"") != std::string::npos, "force prints a path");

  expect(run("hat --adversary " + data_dir() + "/adversary_table_small.json --sigma 1 "
             "--stages 8",
             &out) == 0,
         "hat exits 0");
  expect(out.find("\"change_count\"") != std::string::npos, "hat prints the change count");

  expect(run("force --adversary " + data_dir() + "/adversary_table_small.json --depth 5",
             &out) == 1,
         "forcing into an undefined cone exits 1");
  expect(out.find("partial adversary") != std::string::npos, "force names the partial point");

  // determinism of written traces, including under a byte buffer
  std::string roster = data_dir() + "/roster_fi_regression.json";
  expect(run("run-fi --roster " + roster + " --stages 1000 --out /tmp/ivr_cli_t1.jsonl") == 0,
         "run-fi exits 0");
  expect(run("run-fi --roster " + roster + " --stages 1000 --out /tmp/ivr_cli_t2.jsonl") == 0,
         "run-fi (second run) exits 0");
  expect(slurp("/tmp/ivr_cli_t1.jsonl") == slurp("/tmp/ivr_cli_t2.jsonl"),
         "identical trace files across runs");
  {
    std::string cmd = "IVR_TRACE_BUFFER=65536 " + bin() + " run-fi --roster " + roster +
                      " --stages 1000 --out /tmp/ivr_cli_t3.jsonl > /dev/null 2>&1";
    expect(WEXITSTATUS(std::system(cmd.c_str())) == 0, "buffered run exits 0");
    expect(slurp("/tmp/ivr_cli_t3.jsonl") == slurp("/tmp/ivr_cli_t1.jsonl"),
           "buffered trace matches the line-flushed one");
  }

  expect(run("replay --trace /tmp/ivr_cli_t1.jsonl", &out) == 0, "replay exits 0");
  expect(out.find("identical, audits pass") != std::string::npos, "replay reports identity");

  // a corrupted event is caught with the offending line
  {
    std::ifstream in("/tmp/ivr_cli_t1.jsonl");
    std::ofstream bad("/tmp/ivr_cli_bad.jsonl");
    std::string line;
    size_t n = 0;
    while (std::getline(in, line)) {
      if (++n == 3) {
        auto pos = line.find("\"stage\":");
        line.replace(pos, 8, "\"stage\":9");
      }
      bad << line << "\n";
    }
  }
  expect(run("replay --trace /tmp/ivr_cli_bad.jsonl", &out) == 1, "corrupt replay exits 1");
  expect(out.find("divergence at line") != std::string::npos, "replay names the line");

  expect(run("run-lv --roster " + data_dir() + "/roster_lv_two.json --stages 500 "
             "--out /tmp/ivr_cli_lv.jsonl") == 0,
         "run-lv exits 0");
  expect(run("replay --trace /tmp/ivr_cli_lv.jsonl") == 0, "lv replay exits 0");

  expect(run("run-anc --roster " + data_dir() + "/roster_anc_identity.json --stages 200 "
             "--out /tmp/ivr_cli_anc.jsonl") == 0,
         "run-anc exits 0");
  expect(run("replay --trace /tmp/ivr_cli_anc.jsonl") == 0, "anc replay exits 0");

  expect(run("run-fi --roster /nonexistent.json --stages 10") == 2, "missing roster exits 2");
  {
    std::ofstream garbage("/tmp/ivr_cli_garbage.json");
    garbage << "{not json";
  }
  expect(run("run-fi --roster /tmp/ivr_cli_garbage.json --stages 10", &out) == 2,
         "malformed json exits 2");
  expect(run("frobnicate") == 2, "unknown subcommand exits 2");
  expect(run("run-fi") == 2, "missing required flag exits 2");

  if (g_failures) {
    std::cerr << g_failures << " cli checks failed\n";
    return 1;
  }
  std::cout << "all cli checks passed\n";
  return 0;
}
