#include <doctest.h>

#include <cmath>
#include <string>

#include "pulledfront/error.hpp"
#include "pulledfront/front.hpp"
#include "pulledfront/io.hpp"

using namespace pf;

namespace {
ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::ConfigInvalid;
}
}  // namespace

TEST_SUITE("io") {

TEST_CASE("17-digit round trip") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.20755375}) {
    const std::string s = format_real(v);
    CHECK(parse_real(s) == v);
  }
  CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("sha256 of a known string") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config formats agree") {
  const auto a = parse_config("a = 0.6\nr = 0.1\nsim_T = 50 # short\n");
  const auto b = parse_config(R"({"a": 0.6, "r": 0.1, "sim_T": 50})");
  CHECK(a.params.a == 0.6);
  CHECK(b.params.r == 0.1);
  CHECK(a.sim_T == 50.0);
  CHECK(b.sim_T == 50.0);
  CHECK(config_hash(a) == config_hash(parse_config("a = 0.6\nr = 0.1\nsim_T = 50 # short\n")));
}

TEST_CASE("config errors") {
  CHECK(kind_of([] { parse_config("nonsense = 1\n"); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([] { parse_config("a = abc\n"); }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([] { parse_config(R"({"schema_version": 7})"); }) == ErrorKind::SchemaVersionUnknown);
  CHECK(kind_of([] { parse_config("{ broken"); }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("profile round trip and tamper detection") {
  const ModelParameters p;
  const auto dc = make_constants(p);
  const auto f = solve_front(p, dc, 40.0, 1000, 1e-10, {.check_truncation = false});
  const std::string text = save_profile_string(f);
  const auto back = load_profile_string(text, &p);
  CHECK(back.hash == profile_hash(f));
  REQUIRE(back.profile.U.size() == f.U.size());
  for (size_t i = 0; i < f.U.size(); ++i) {
    CHECK(back.profile.U[i] == f.U[i]);
    CHECK(back.profile.W[i] == f.W[i]);
  }
  CHECK(save_profile_string(back.profile) == text);

  std::string bad = text;
  const auto pos = bad.find("\"U\"");
  REQUIRE(pos != std::string::npos);
  const auto digit = bad.find_first_of("123456789", pos + 8);
  bad[digit] = bad[digit] == '9' ? '8' : '9';
  CHECK(kind_of([&] { load_profile_string(bad); }) == ErrorKind::HashMismatch);
  CHECK(kind_of([] { load_profile_string("[1,2]"); }) == ErrorKind::SchemaVersionUnknown);
}

}
