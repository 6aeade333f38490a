#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include <json.hpp>

#include "skmac.h"

using nlohmann::json;

namespace {

std::string take(char* report) {
  std::string s = report;
  skm_string_free(report);
  return s;
}

}  // namespace

TEST_CASE("channel loading and dimensions") {
  skm_channel* ch = nullptr;
  REQUIRE(skm_channel_builtin("adder", &ch) == SKM_OK);
  int a = 0, b = 0, c = 0;
  REQUIRE(skm_channel_dims(ch, &a, &b, &c) == SKM_OK);
  CHECK(a == 2);
  CHECK(b == 2);
  CHECK(c == 3);
  skm_channel_free(ch);

  CHECK(skm_channel_builtin("bogus", &ch) == SKM_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(skm_last_error()) > 0);

  CHECK(skm_channel_from_json("{not json", &ch) == SKM_ERR_SCHEMA);
  CHECK(skm_channel_from_json("{\"in1\":2,\"in2\":2,\"out\":2}", &ch) == SKM_ERR_SCHEMA);
  CHECK(skm_channel_load("/nonexistent/channel.json", &ch) == SKM_ERR_IO);

  const char* xor_json = "{\"in1\":2,\"in2\":2,\"out\":2,\"w\":[[[1,0],[0,1]],[[0,1],[1,0]]]}";
  REQUIRE(skm_channel_from_json(xor_json, &ch) == SKM_OK);
  skm_channel_free(ch);
}

TEST_CASE("joint laws and information measures") {
  skm_joint* j = nullptr;
  REQUIRE(skm_joint_from_json("{\"arity\":[2,2],\"table\":[0.5,0,0,0.5]}", &j) == SKM_OK);
  double h = 0.0;
  int v0 = 0, v1 = 1;
  REQUIRE(skm_entropy(j, &v0, 1, &h) == SKM_OK);
  CHECK(h == doctest::Approx(1.0));
  double ce = 0.0;
  REQUIRE(skm_conditional_entropy(j, &v0, 1, &v1, 1, &ce) == SKM_OK);
  CHECK(ce == doctest::Approx(0.0));
  double mi = 0.0;
  REQUIRE(skm_mutual_information(j, &v0, 1, &v1, 1, nullptr, 0, &mi) == SKM_OK);
  CHECK(mi == doctest::Approx(1.0));
  double s = 0.0;
  REQUIRE(skm_security_index(j, &v0, 1, &v1, 1, &s) == SKM_OK);
  CHECK(s == doctest::Approx(1.0));
  skm_joint_free(j);
}

TEST_CASE("rstar report through the c api") {
  skm_channel* ch = nullptr;
  REQUIRE(skm_channel_builtin("adder", &ch) == SKM_OK);
  char* rep = nullptr;
  REQUIRE(skm_rstar(ch, 33, 20, 1, &rep) == SKM_OK);
  json r = json::parse(take(rep));
  CHECK(r["report_version"] == 1);
  CHECK(r["command"] == "rstar");
  CHECK(std::fabs(r["results"]["rate"].get<double>() - 0.75) <= 1e-3);
  skm_channel_free(ch);
}

TEST_CASE("bound and fbcode reports") {
  skm_joint* law = nullptr;
  // (Y1, Y2, K, F): shared uniform bit, K = Y1, F constant
  REQUIRE(skm_joint_from_json("{\"arity\":[2,2,2,1],\"table\":[0.5,0,0,0,0,0,0,0.5]}", &law) == SKM_OK);
  char* rep = nullptr;
  REQUIRE(skm_bound(law, 2, "lp", 0.01, &rep) == SKM_OK);
  json r = json::parse(take(rep));
  double core = r["results"]["bound_bits"].get<double>() - r["results"]["nu"].get<double>() -
                r["results"]["s_in"].get<double>();
  CHECK(core == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(skm_bound(law, 2, "1|2", 0.01, &rep) == SKM_OK);
  json r2 = json::parse(take(rep));
  CHECK(r2["results"].contains("corollary_bound"));
  skm_joint_free(law);

  REQUIRE(skm_fbcode_rate(100000, 2.0, &rep) == SKM_OK);
  json r3 = json::parse(take(rep));
  CHECK(std::fabs(r3["results"]["rate"].get<double>() - r3["results"]["asymptotic_rate"].get<double>()) <=
        0.003);
}

TEST_CASE("identical seeds give identical payloads, timestamps excluded") {
  skm_channel* ch = nullptr;
  REQUIRE(skm_channel_builtin("adder", &ch) == SKM_OK);
  char* r1 = nullptr;
  char* r2 = nullptr;
  REQUIRE(skm_sk_se(ch, 8, 0.75, 0.75, 200, 42, &r1) == SKM_OK);
  REQUIRE(skm_sk_se(ch, 8, 0.75, 0.75, 200, 42, &r2) == SKM_OK);
  json a = json::parse(take(r1));
  json b = json::parse(take(r2));
  a["provenance"].erase("timestamp");
  b["provenance"].erase("timestamp");
  CHECK(a == b);
  skm_channel_free(ch);
}

TEST_CASE("sk-feedback report has the pipeline fields") {
  skm_channel* ch = nullptr;
  REQUIRE(skm_channel_builtin("adder", &ch) == SKM_OK);
  char* rep = nullptr;
  REQUIRE(skm_sk_feedback(ch, 16, 8, 1.0, 0.25, 1.0, 3, 1, &rep) == SKM_OK);
  json r = json::parse(take(rep));
  CHECK(r["results"].contains("key_rate"));
  CHECK(r["results"].contains("agreement"));
  CHECK(r["results"].contains("s_in_mode"));
  CHECK(r["results"].contains("comm_rate"));
  CHECK(r["results"].contains("stage_errors"));
  skm_channel_free(ch);
}
