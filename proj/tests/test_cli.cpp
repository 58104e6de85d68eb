#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(HOIF_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::string temp_path(const char* name) { return std::string("/tmp/hoif_cli_test_") + name; }

}  // namespace

TEST_CASE("solve prints one CSV row per node") {
  const Run r = run("solve --problem ex34 --J 4");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("i,j,x,y,u_h\n", 0) == 0);
  CHECK(count_lines(r.out) == 1 + 289);
}

TEST_CASE("solve writes to --out") {
  const std::string path = temp_path("solve.csv");
  const Run r = run("solve --problem ex31 --J 3 --out " + path);
  CHECK(r.status == 0);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(count_lines(ss.str()) == 1 + 81);
  std::remove(path.c_str());
}

TEST_CASE("convergence table has one row per level") {
  const Run r = run("convergence --problem ex31 --J-range 3..4 --mode exact");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("J,h,error,order,seconds\n", 0) == 0);
  CHECK(count_lines(r.out) == 3);
  CHECK(r.out.find("\n3,") != std::string::npos);
}

TEST_CASE("usage and configuration errors exit with 1") {
  CHECK(run("").status == 1);
  CHECK(run("solve").status == 1);
  CHECK(run("solve --problem nosuch").status == 1);
  CHECK(run("convergence --problem ex31 --J-range 5..3").status == 1);
  CHECK(run("convergence --problem ex34 --J-range 3..4 --mode exact").status == 1);
  CHECK(run("convergence --problem ex31 --J-range 3..4 --mode sideways").status == 1);
  // The star of example 3.4 comes too close to the boundary at J = 3.
  CHECK(run("solve --problem ex34 --J 3").status == 1);
}

TEST_CASE("M-matrix audit exit codes") {
  CHECK(run("check-mmatrix --problem ex34 --J 5").status == 0);
  CHECK(run("solve --problem ex34 --J 4 --check-mmatrix").status == 0);

  const std::string path = temp_path("negative_alpha.json");
  {
    std::ofstream f(path);
    f << R"({"name": "negative-alpha", "domain": [0, 1, 0, 1],
  "plus": {"a": "1", "u": "x"},
  "boundary": {"left": {"type": "robin", "alpha": "-1"}, "right": {}, "bottom": {}, "top": {}}})";
  }
  CHECK(run("check-mmatrix --problem " + path + " --J 4").status == 2);
  std::remove(path.c_str());
}
