#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using std::string;

namespace {

struct RunResult {
  int exit_code = -1;
  string out;
};

// run a shell command, capturing stdout; stderr is left alone
RunResult run(const string& args) {
  const string cmd = string(SPHEREQ_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  while (size_t got = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

RunResult run_env(const string& env, const string& args) {
  const string cmd = env + " " + string(SPHEREQ_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  while (size_t got = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

string fixture(const string& name) { return string(SPHEREQ_FIXTURE_DIR) + "/" + name; }

string temp_path(const string& name) {
  return (std::filesystem::temp_directory_path() / ("sphereq_cli_" + name)).string();
}

string slurp(const string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool contains(const string& haystack, const string& needle) {
  return haystack.find(needle) != string::npos;
}

}  // namespace

TEST_CASE("solve reports and exit codes") {
  SECTION("unsolvable instance exits 1") {
    const auto r = run("solve " + fixture("spherical_s1_fail.txt"));
    REQUIRE(r.exit_code == 1);
    REQUIRE(contains(r.out, "status: unsolvable"));
    REQUIRE(contains(r.out, "note: unit-product condition fails"));
  }

  SECTION("solvable instance exits 0 and prints the witness") {
    const auto r = run("solve " + fixture("spherical_basic.txt"));
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "status: solvable"));
    REQUIRE(contains(r.out, "method: generic"));
    REQUIRE(contains(r.out, "\nz "));
  }

  SECTION("constrained instance under brute mode") {
    const auto r = run("solve " + fixture("cise_p3.txt") + " --mode brute");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "method: brute"));
  }

  SECTION("budget exhaustion exits 2") {
    const auto r = run("solve " + fixture("cise_p3.txt") + " --mode brute --budget 1");
    REQUIRE(r.exit_code == 2);
    REQUIRE(contains(r.out, "status: unknown"));
  }

  SECTION("missing file exits 3") {
    REQUIRE(run("solve /nonexistent/instance.txt").exit_code == 3);
  }
}

TEST_CASE("solve then verify round trip") {
  const string wpath = temp_path("witness.txt");
  const auto solved = run("solve " + fixture("cise_p3.txt") + " --witness-out " + wpath);
  REQUIRE(solved.exit_code == 0);

  const auto verified = run("verify " + fixture("cise_p3.txt") + " --witness " + wpath);
  REQUIRE(verified.exit_code == 0);
  REQUIRE(contains(verified.out, "status: valid"));

  // the same witness does not satisfy a different instance
  const auto cross = run("verify " + fixture("spherical_s1_fail.txt") + " --witness " + wpath);
  REQUIRE(cross.exit_code != 0);
}

TEST_CASE("reports are byte-identical for a fixed seed") {
  const string cmd = "solve " + fixture("spherical_basic.txt") + " --seed 42";
  const auto a = run(cmd);
  const auto b = run(cmd);
  REQUIRE(a.out == b.out);

  // the environment default and the flag agree
  const auto via_flag = run("hash sample --p 5 --n 1 --m 2 --seed 9");
  const auto via_env = run_env("SPHEREQ_SEED=9", "hash sample --p 5 --n 1 --m 2");
  REQUIRE(via_flag.out == via_env.out);
  // and the flag wins over the environment
  const auto both = run_env("SPHEREQ_SEED=1", "hash sample --p 5 --n 1 --m 2 --seed 9");
  REQUIRE(both.out == via_flag.out);
}

TEST_CASE("csv format") {
  const auto r = run("solve " + fixture("spherical_s1_fail.txt") + " --format csv");
  REQUIRE(r.exit_code == 1);
  REQUIRE(contains(r.out, "command,solve"));
  REQUIRE(contains(r.out, "status,unsolvable"));
}

TEST_CASE("reduce writes raw instances to stdout, reports with -o") {
  SECTION("isis-to-cise matches the pinned image") {
    const auto r = run("reduce isis-to-cise " + fixture("isis_p3.txt"));
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out ==
            "sphereq v1 cise\n"
            "p 3\n"
            "n 1\n"
            "m 2\n"
            "c 1 1\n"
            "c 2 1\n"
            "rhs 0 1\n"
            "constraint preset12\n"
            "constraint preset12\n");
  }

  SECTION("-o emits a report and the file parses") {
    const string opath = temp_path("reduced_cise.txt");
    const auto r = run("reduce isis-to-cise " + fixture("isis_p3.txt") + " -o " + opath);
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "command: reduce isis-to-cise"));
    REQUIRE(contains(r.out, "output: " + opath));
    const auto solve = run("solve " + opath + " --mode brute");
    REQUIRE(solve.exit_code == 0);
  }

  SECTION("ssp-to-sph carries the equivalence flag") {
    const string opath = temp_path("reduced_sph.txt");
    const auto r = run("reduce ssp-to-sph " + fixture("ssp_p3.txt") + " -o " + opath);
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "equivalence_exact: true"));
    REQUIRE(run("solve " + opath).exit_code == 0);  // 1 + 2 = 0 is attainable
  }

  SECTION("guess-index is 1-based and prints the choice") {
    const string opath = temp_path("guessed.txt");
    const auto r = run("reduce guess-index " + fixture("sis_p3.txt") + " --index 1 -o " + opath);
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "guessed_index: 1"));
    const string body = slurp(opath);
    REQUIRE(contains(body, "sphereq v1 isis"));
    REQUIRE(contains(body, "\n2\n"));        // surviving column
    REQUIRE(contains(body, "target 2"));     // -v_1 mod 3
    REQUIRE(run("reduce guess-index " + fixture("sis_p3.txt") + " --index 5").exit_code == 3);
  }

  SECTION("cise-to-agwp feeds agwp-solve") {
    const string opath = temp_path("agwp.txt");
    REQUIRE(run("reduce cise-to-agwp " + fixture("cise_p3.txt") + " -o " + opath).exit_code == 0);
    const auto solved = run("agwp-solve " + opath);
    REQUIRE(solved.exit_code == 0);
    REQUIRE(contains(solved.out, "status: solvable"));
    REQUIRE(contains(solved.out, "path_edges: "));
  }
}

TEST_CASE("agwp-solve on the fixture graph") {
  const auto r = run("agwp-solve " + fixture("agwp_small.txt"));
  REQUIRE(r.exit_code == 0);
  REQUIRE(contains(r.out, "path_edges: "));
}

TEST_CASE("hash commands") {
  SECTION("eval prints the digest") {
    const auto r = run("hash eval --spec " + fixture("hash_p5.txt") + " --bits 01");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "digest: 4 1"));
    const auto jc = run("hash jc --spec " + fixture("hash_p5.txt") + " --bits 01");
    REQUIRE(contains(jc.out, "digest: 4 1"));  // transducer route agrees
  }

  SECTION("sample writes a parseable spec deterministically") {
    const string opath = temp_path("hash_spec.txt");
    const auto direct = run("hash sample --p 5 --n 1 --m 2 --seed 42");
    const auto filed = run("hash sample --p 5 --n 1 --m 2 --seed 42 -o " + opath);
    REQUIRE(filed.exit_code == 0);
    REQUIRE(direct.out == slurp(opath));
    const auto eval = run("hash eval --spec " + opath + " --bits 11");
    REQUIRE(eval.exit_code == 0);
  }

  SECTION("preimage pipeline mirrors solvability") {
    const string opath = temp_path("preimage.txt");
    // digests of the fixture family lie in {0, 1, 4}
    REQUIRE(run("hash preimage-to-cise --spec " + fixture("hash_p5.txt") +
                " --target '2 1' -o " + opath)
                .exit_code == 0);
    REQUIRE(run("solve " + opath + " --mode brute").exit_code == 1);
    REQUIRE(run("hash preimage-to-cise --spec " + fixture("hash_p5.txt") +
                " --target '4 1' -o " + opath)
                .exit_code == 0);
    REQUIRE(run("solve " + opath + " --mode brute").exit_code == 0);
  }

  SECTION("collision pipeline emits a verified witness") {
    // c = (1), (4): bits 00 and 11 both hash to (0, 1)
    const string raw = run("hash collide-to-cise --spec " + fixture("hash_p5.txt") +
                           " --x 00 --y 11")
                           .out;
    REQUIRE(contains(raw, "sphereq v1 cise"));  // bare instance without -o

    const string opath = temp_path("collision.txt");
    const auto r = run("hash collide-to-cise --spec " + fixture("hash_p5.txt") +
                       " --x 00 --y 11 -o " + opath);
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "witness: 2 values"));
    REQUIRE(contains(r.out, "\nz "));
    REQUIRE(slurp(opath) == raw);
    REQUIRE(run("solve " + opath + " --mode brute").exit_code == 0);
    // non-collisions are operand errors
    REQUIRE(run("hash collide-to-cise --spec " + fixture("hash_p5.txt") + " --x 00 --y 01")
                .exit_code == 3);
  }
}

TEST_CASE("stats commands") {
  SECTION("params validity gates the exit code") {
    const auto good = run("stats params --p 769 --n 2 --m 21");
    REQUIRE(good.exit_code == 0);
    REQUIRE(contains(good.out, "valid: true"));
    const auto bad = run("stats params --p 3 --n 1 --m 1");
    REQUIRE(bad.exit_code == 1);
    REQUIRE(contains(bad.out, "lower bound fails"));
  }

  SECTION("uniformity prints exact rationals") {
    const auto r = run("stats uniformity --p 3 --n 1 --m 1");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "average_tv: 4/9"));
    REQUIRE(contains(r.out, "unconditional_uniform: true"));
  }

  SECTION("universality prints the exact collision probability") {
    const auto r = run("stats universality --p 3 --n 1 --m 2 --x 01 --y 10");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "value: 1/3"));
  }

  SECTION("generic sampling stays within its bands") {
    const auto r = run("stats generic --s 4 --trials 400 --seed 7");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "m_large_within_band: true"));
    REQUIRE(contains(r.out, "beta_nontrivial_within_band: true"));
  }

  SECTION("device draws are reproducible") {
    const auto a = run("stats device --p 3 --n 1 --m 3 --count 5 --seed 12");
    const auto b = run("stats device --p 3 --n 1 --m 3 --count 5 --seed 12");
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);
  }

  SECTION("random-cise reports a solvable fraction") {
    const auto r = run("stats random-cise --p 3 --n 1 --m 2 --preset 12 --count 50 --seed 3");
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "solvable_fraction: "));
  }
}
