#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace {

struct Run {
  std::string out;
  int code = -1;
};

Run run(const std::string& args) {
  std::string cmd = std::string(RANDLAB_BIN) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_file(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("randlab_cli_" + std::to_string(::getpid()) + "_" + name);
  std::ofstream(path) << text;
  return path.string();
}

const char* kWorkspace = R"(# coin flips and a few elements
space S = { a: 1/2, b: 1/3, c: 1/6 }
rand r1 = m2 over S
element f = [0, 1, 1]
element g = [0, 0, 1]
element zero = [0, 0, 0]
event E = [0, 2]
space coin = uniform 2
rand r = m2 over coin
element fc = [0, 1]
space D = dyadic 3
rand m2x8 = m2 over D
space U = uniform 4
rand c4 = c3 over U
element u0 = [0, 1, 2, 0]
element u1 = [1, 2, 0, 0]
measure nu = c3 types 1 params 1 rtype { q0: 1/4, q1: 1/4, q2: 1/2 }
map px = [0, 0, 1] into {z0, z1}
space T = { s: 1/3, t: 1/3, v: 1/3 }
map py = [0, 1, 1] into {z0, z1}
)";

std::string ws_flag() {
  static std::string path = temp_file("ws.txt", kWorkspace);
  return "--workspace " + path;
}

bool has_line(const std::string& out, const std::string& line) {
  return ("\n" + out).find("\n" + line + "\n") != std::string::npos;
}

}  // namespace

TEST_CASE("eval prints exact values") {
  auto r = run(ws_flag() + " eval --rand r1 --cformula \"mu[[ x = y ]]\" --bind x=f,y=g");
  CHECK(r.code == 0);
  // f and g agree at a and c.
  CHECK(r.out == "2/3\n");
  r = run(ws_flag() + " eval --rand r1 --cformula \"mu[[ forall x (x = x) ]]\"");
  CHECK(r.out == "1/1\n");
  r = run(ws_flag() + " eval --rand r1 --cformula \"mu[ E ]\" --bind E=E");
  CHECK(r.out == "2/3\n");
  r = run(ws_flag() + " eval --rand r1 --cformula \"mu[[ x = y ]]\" --bind x=f,y=g --decimal 3");
  CHECK(r.out == "2/3 (0.667)\n");
  CHECK(r.code == 0);
}

TEST_CASE("exit codes") {
  CHECK(run(ws_flag() + " eval --rand r1 --cformula \"mu[[ x = y ]]\" --bind x=f,y=gg").code == 2);
  CHECK(run(ws_flag() + " eval --rand nope --cformula \"mu[[ x = y ]]\"").code == 2);
  CHECK(run("check axioms --rand m2x8").code == 2);
  CHECK(run(ws_flag() + " eval --rand r1 --cformula \"mu[[ x = ]]\" --bind x=f").code == 3);
  CHECK(run("frobnicate").code == 3);
  auto bad = temp_file("bad.txt", "space S = { a: 1/2, b 1/2 }\n");
  CHECK(run("--workspace " + bad + " types --structure m2 --n 1").code == 3);
  auto r = run(ws_flag() + " --budget 10 eval --rand r1 --cformula \"sup x (sup y (mu[[ x = y ]]))\"");
  CHECK(r.code == 4);
}

TEST_CASE("check axioms and independence") {
  auto r = run(ws_flag() + " check axioms --rand m2x8");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(has_line(r.out, "atomless-defect 1/16"));
  r = run(ws_flag() + " check independence --rand r --c fc --b fc --A \"\"");
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL independence witness x=y") == 0);
}

TEST_CASE("check types, categoricity and stability") {
  auto r = run(ws_flag() + " check types --rand c4 --tuple u0,u1");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  r = run("check categoricity --structure c3 --n 2");
  CHECK(r.code == 0);
  r = run("check stability --structure m2");
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS rho-routes") != std::string::npos);
}

TEST_CASE("rho commands") {
  auto r = run("rho --structure m2 --phi \"x=y\" --p q0 --b 0");
  CHECK(r.code == 0);
  CHECK(r.out == "1/2\n");
  r = run("rho --structure m2 --phi \"x=y\" --p 1 --b 0");
  CHECK(r.out == "1/2\n");
  // With b deterministic, rho_hat is the probability of phi(f, b).
  auto hat = run(ws_flag() + " rho --rho-hat --rand r1 --phi \"x=y\" --c f --b zero --A \"\"");
  auto direct = run(ws_flag() + " eval --rand r1 --cformula \"P[ x = y ]\" --bind x=f,y=zero");
  CHECK(hat.code == 0);
  CHECK(hat.out == direct.out);
  CHECK(hat.out == "1/2\n");
  r = run(ws_flag() + " rho --extend --certify --rand c4 --phi \"x=y\" --c u0 --ybar u1 --A u1");
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "FEASIBLE"));
  CHECK(r.out.find("\nmeasure ") != std::string::npos);
}

TEST_CASE("fiber, extend, dmetric, convex, approx-simple, types") {
  auto r = run(ws_flag() + " fiber --mu S --nu T --pi-x px --pi-y py --rect-a a,c --rect-b t");
  CHECK(r.code == 1);  // image measures 5/6 and 1/3 differ
  auto ws2 = temp_file("ws2.txt", std::string(kWorkspace) + "space T2 = { s: 5/6, t: 1/12, v: 1/12 }\n");
  r = run("--workspace " + ws2 + " fiber --mu S --nu T2 --pi-x px --pi-y py --rect-a a,c --rect-b t");
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "PASS marginals"));
  CHECK(has_line(r.out, "(a, s) 1/2"));

  auto prob = temp_file("prob.txt", "<= 1/2 : 1,0,0\n<= 1/2 : 0,1,1\n");
  r = run("extend --problem " + prob + " --debug-lambda-tilde 1,1,0");
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "lambda_tilde 1/2"));
  CHECK(has_line(r.out, "FEASIBLE"));
  auto infeasible = temp_file("prob2.txt", "<= 1/3 : 1,0\n<= 1/3 : 0,1\n");
  r = run("extend --problem " + infeasible);
  CHECK(has_line(r.out, "INFEASIBLE"));
  CHECK(has_line(r.out, "PASS certificate"));

  auto ws3 = temp_file("ws3.txt", std::string(kWorkspace) +
                                      "measure a2 = c3 types 2 params 0 rtype { q0: 1/4, q1: 1/4, q2: 1/2 }\n"
                                      "measure b2 = c3 types 2 params 0 rtype { q0: 1/2, q1: 1/2, q2: 0/1 }\n");
  // Total variation: the mass moved off q2.
  r = run("--workspace " + ws3 + " dmetric --measure a2 --measure b2");
  CHECK(r.out == "1/2\n");

  r = run(ws_flag() + " convex --part 1/2:r --part 1/2:m2x8 --check");
  CHECK(r.code == 0);
  CHECK(r.out.find("space { ") == 0);

  r = run(ws_flag() + " approx-simple --rand c4 --f u0 --algebra discrete --eps 1/4");
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "dK 0/1"));

  r = run("types --structure c3 --n 2");
  CHECK(r.out == "q0 (0,0) 3 x=y\nq1 (0,1) 3 E(x,y)\nq2 (0,2) 3 !(x=y) & !E(x,y)\n");
}

TEST_CASE("realize and workspace round trip") {
  auto saved = std::filesystem::temp_directory_path() / ("randlab_cli_" + std::to_string(::getpid()) + "_saved.txt");
  auto again = std::filesystem::temp_directory_path() / ("randlab_cli_" + std::to_string(::getpid()) + "_again.txt");
  auto r = run(ws_flag() + " --save " + saved.string() + " realize --rand c4 --measure nu --as real");
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "PASS round-trip"));
  r = run("--workspace " + saved.string() + " --save " + again.string() + " types --structure c3 --n 1");
  CHECK(r.code == 0);
  std::ifstream a(saved), b(again);
  std::string ta((std::istreambuf_iterator<char>(a)), {}), tb((std::istreambuf_iterator<char>(b)), {});
  CHECK(!ta.empty());
  CHECK(ta == tb);
  CHECK(ta.find("rand real = ") != std::string::npos);
  // The saved element realizes the measure again.
  r = run("--workspace " + saved.string() + " check types --rand real --tuple real_f0");
  CHECK(r.code == 0);
}

TEST_CASE("output is deterministic") {
  for (const auto& args : {ws_flag() + " check axioms --rand m2x8", std::string("check stability --structure c3"),
                           ws_flag() + " rho --extend --rand c4 --phi \"x=y\" --c u0 --ybar u1 --A u1"})
    CHECK(run(args).out == run(args).out);
}
