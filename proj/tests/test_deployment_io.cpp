#include <filesystem>

#include "arianna/deployment_io.hpp"
#include "arianna/image_io.hpp"
#include "arianna/scene.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace arianna;

TEST_CASE("deployment text roundtrip is identity") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    WorldParams p;
    p.seed = seed;
    const Deployment d = generate_world(p);
    const std::string text = serialize_deployment(d);
    const Deployment back = parse_deployment(text);
    CHECK(back == d);
    CHECK(serialize_deployment(back) == text);
  }
}

TEST_CASE("file format uses documented keys and colour names") {
  const Json j = deployment_to_json(oracle::straight_edge(5.0));
  for (const char* key : {"deployment_id", "version", "nodes", "edges", "anchors", "floor_bounds"}) CHECK(j.contains(key));
  CHECK(j["edges"][0]["colors"][0] == "RED");
  CHECK(j["edges"][0]["colors"][1] == "BLUE");
  CHECK(j["nodes"][0]["kind"] == "poi");
  CHECK(j["edges"][0]["enabled"] == true);
}

TEST_CASE("coordinates keep at most three decimals") {
  auto d = oracle::straight_edge(5.0);
  d.nodes[0].position = {1.23456789, 1.0};
  d.edges[0].polyline[0] = d.nodes[0].position;
  const std::string text = serialize_deployment(d);
  CHECK(text.find("1.235") != std::string::npos);
  CHECK(text.find("1.2345") == std::string::npos);
}

TEST_CASE("malformed documents are rejected") {
  CHECK_THROWS_AS(parse_deployment("{"), FormatError);
  CHECK_THROWS_AS(parse_deployment("[]"), FormatError);
  Json j = deployment_to_json(oracle::straight_edge(5.0));
  j["edges"][0]["colors"][0] = "PURPLE";
  CHECK_THROWS_AS(deployment_from_json(j), FormatError);
  j = deployment_to_json(oracle::straight_edge(5.0));
  j.erase("nodes");
  CHECK_THROWS_AS(deployment_from_json(j), FormatError);
  j = deployment_to_json(oracle::straight_edge(5.0));
  j["nodes"][0]["position"] = "north";
  CHECK_THROWS_AS(deployment_from_json(j), FormatError);
}

TEST_CASE("atomic write replaces file content") {
  const auto dir = std::filesystem::temp_directory_path() / "arianna_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "world.json";
  write_file_atomic(path, "first");
  write_file_atomic(path, serialize_deployment(oracle::straight_edge(3.0)));
  CHECK(load_deployment(path) == oracle::straight_edge(3.0));
  for (const auto& entry : std::filesystem::directory_iterator(dir)) CHECK(entry.path().filename() == "world.json");
  std::filesystem::remove_all(dir);
}

TEST_CASE("ppm roundtrip and png signature") {
  Frame f(7, 5);
  for (int v = 0; v < 5; ++v) {
    for (int u = 0; u < 7; ++u) f.set(u, v, {static_cast<std::uint8_t>(u * 30), static_cast<std::uint8_t>(v * 50), 9});
  }
  const std::string ppm = encode_ppm(f);
  CHECK(ppm.rfind("P6\n7 5\n255\n", 0) == 0);
  CHECK(decode_ppm(ppm) == f);
  CHECK_THROWS_AS(decode_ppm("P3\n1 1\n255\n"), FormatError);
  CHECK_THROWS_AS(decode_ppm("P6\n4 4\n255\nabc"), FormatError);
  const auto png = encode_png(f);
  REQUIRE(png.size() > 8);
  CHECK(png[0] == 0x89);
  CHECK(png[1] == 'P');
  CHECK(png[2] == 'N');
  CHECK(png[3] == 'G');
}

TEST_CASE("world params json") {
  WorldParams p;
  p.seed = 99;
  p.min_nodes = 3;
  p.max_nodes = 5;
  const WorldParams q = world_params_from_json(world_params_to_json(p));
  CHECK(q.seed == 99);
  CHECK(q.min_nodes == 3);
  CHECK(q.max_nodes == 5);
  CHECK(world_params_from_json(Json::parse(R"({"seed": 4})")).max_nodes == WorldParams{}.max_nodes);
  CHECK_THROWS_AS(world_params_from_json(Json::parse(R"({"strip_width": -1})")), FormatError);
  CHECK_THROWS_AS(world_params_from_json(Json::parse(R"({"min_nodes": "x"})")), FormatError);
}
