#include <doctest.h>

#include <functional>

#include "conelab/config.hpp"
#include "conelab/error.hpp"

using namespace conelab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal lambda config gets documented defaults") {
    RunConfig c = parse_config_text("[run]\nsubcommand = lambda\n");
    finalize_config(c);
    CHECK(c.preset == "sphere_suspension");
    CHECK(c.link == "S3");
    CHECK(c.N == 2000);
    CHECK(c.p == 2.0);
    CHECK(c.seed == 12345u);
  }

  TEST_CASE("unknown key names the nearest valid key") {
    const std::string msg = message_of([] { parse_config_text("[run]\nsubcommand = lambda\ngridd = 3\n"); });
    CHECK(msg.find("run.gridd") != std::string::npos);
    CHECK(msg.find("did you mean") != std::string::npos);
    const std::string msg2 = message_of([] { parse_config_text("[gridd]\nN = 3\n[metric]\npreest = x\n"); });
    CHECK(msg2.find("gridd.N") != std::string::npos);
    CHECK(msg2.find("metric.preset") != std::string::npos);  // both reported at once
    CHECK(nearest_key("gridd") == "grid.N");
    CHECK(levenshtein("kitten", "sitting") == 3);
  }

  TEST_CASE("errors") {
    CHECK(code_of([] {
            RunConfig c;
            finalize_config(c);
          }) == ErrorCode::config);
    CHECK(code_of([] {
            RunConfig c = parse_config_text("[run]\nsubcommand = lambda\n[metric]\npreset = flat_cone\nfile = m.csv\n");
            finalize_config(c);
          }) == ErrorCode::config);
    CHECK(code_of([] { parse_config_text("[grid]\nN = 10\nN = 20\n"); }) == ErrorCode::config);
    CHECK(code_of([] { parse_config_text("[grid]\nN = ten\n"); }) == ErrorCode::config);
    CHECK(code_of([] {
            RunConfig c = parse_config_text("[run]\nsubcommand = lambda\n[tolerances]\nel = 0\n");
            finalize_config(c);
          }) == ErrorCode::config);
    CHECK(code_of([] { parse_config_file("/nonexistent/conelab.ini"); }) == ErrorCode::io);
  }

  TEST_CASE("effective config round trip") {
    RunConfig c = parse_config_text(
        "# comment\n[run]\nsubcommand = nu\nseed = 7\n[metric]\npreset = perturbed_suspension\namplitude = 0.3\n"
        "[grid]\nN = 512 ; inline\np = 1.75\n[entropy]\nsign = plus\ntau_lo = 1e-2\n");
    finalize_config(c);
    const std::string text = effective_config_text(c);
    RunConfig d = parse_config_text(text);
    finalize_config(d);
    CHECK(effective_config_text(d) == text);
    for (const auto& k : config_keys()) CHECK(get_config_value(c, k) == get_config_value(d, k));
    CHECK(d.amplitude == 0.3);
    CHECK(d.p == 1.75);
    CHECK(d.tau_lo == 1e-2);
  }

  TEST_CASE("every key round-trips through set and get") {
    RunConfig c;
    for (const auto& k : config_keys()) {
      const std::string v = get_config_value(c, k);
      set_config_value(c, k, v);
      CHECK(get_config_value(c, k) == v);
    }
    set_config_value(c, "grid.p", "0.1");
    CHECK(get_config_value(c, "grid.p") == "0.1");
  }
}
