#include <daahm/checkpoint.hpp>
#include <daahm/config.hpp>
#include <daahm/results.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <string>

namespace daahm {
namespace {

std::filesystem::path test_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "daahm_io" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

TEST(LoadConfig, EmptyFileYieldsFullScaleDefaults) {
  const auto dir = test_dir("empty");
  write_text(dir / "empty.json", "  \n\t ");
  const ExperimentConfig cfg = load_config(dir / "empty.json");
  EXPECT_EQ(cfg.env.num_activities, 30);
  EXPECT_EQ(cfg.env.num_metrics, 10);
  EXPECT_EQ(cfg.env.num_devices, 5);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(LoadConfig, DeskPresetViaBase) {
  const auto dir = test_dir("desk_base");
  write_text(dir / "empty.json", "");
  const ExperimentConfig cfg = load_config(dir / "empty.json", desk_preset());
  EXPECT_EQ(cfg.env.num_activities, 6);
  EXPECT_EQ(cfg.env.num_metrics, 6);
  EXPECT_EQ(cfg.env.num_devices, 3);
}

TEST(LoadConfig, RoundTripEquality) {
  const auto dir = test_dir("roundtrip");
  const ExperimentConfig original = desk_preset();
  save_config(original, dir / "cfg.json");
  ExperimentConfig reloaded = load_config(dir / "cfg.json", paper_preset());
  // env.seed mirrors the experiment seed on load.
  EXPECT_TRUE(reloaded == original || (reloaded.env.seed == original.seed));
  reloaded.env.seed = original.env.seed;
  EXPECT_TRUE(reloaded == original);

  const ExperimentConfig paper = paper_preset();
  save_config(paper, dir / "paper.json");
  ExperimentConfig paper_back = load_config(dir / "paper.json");
  paper_back.env.seed = paper.env.seed;
  EXPECT_TRUE(paper_back == paper);
}

TEST(LoadConfig, BadTransitionRowNamesIndex) {
  const auto dir = test_dir("badrow");
  write_text(dir / "cfg.json", R"({
    "env": {
      "num_activities": 2, "num_metrics": 2, "num_devices": 1,
      "dynamics": {"kind": "markov", "transition": [[0.5, 0.5], [0.4, 0.5]]}
    }
  })");
  try {
    load_config(dir / "cfg.json");
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

TEST(LoadConfig, MissingFileAndParseError) {
  const auto dir = test_dir("missing");
  EXPECT_THROW(load_config(dir / "nope.json"), IoError);
  write_text(dir / "broken.json", "{ not json");
  EXPECT_THROW(load_config(dir / "broken.json"), InvalidInput);
}

TEST(LoadConfig, DimensionOverrideRegeneratesDefaults) {
  const auto dir = test_dir("dims");
  write_text(dir / "cfg.json", R"({"env": {"num_activities": 4, "num_metrics": 3}})");
  const ExperimentConfig cfg = load_config(dir / "cfg.json", desk_preset());
  EXPECT_EQ(cfg.env.num_activities, 4);
  EXPECT_EQ(cfg.env.num_metrics, 3);
  EXPECT_EQ(cfg.env.importance.rows(), 4);
  EXPECT_EQ(cfg.env.importance.cols(), 3);
  EXPECT_EQ(cfg.env.datasize_min.size(), 3);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(LoadConfig, DeviceListLengthMismatchIsRejected) {
  const auto dir = test_dir("devices");
  write_text(dir / "cfg.json", R"({
    "env": {"num_devices": 3, "devices": [{"frequency": 1e8}, {"frequency": 2e8}]}
  })");
  EXPECT_THROW(load_config(dir / "cfg.json"), InvalidInput);
}

TEST(LoadImportance, IdentityAndFixture) {
  const auto dir = test_dir("importance");
  write_text(dir / "id.csv", "a,b\n1,0\n0,1\n");
  const Matrix identity = load_importance(dir / "id.csv");
  EXPECT_TRUE(identity.isApprox(Matrix::Identity(2, 2)));

  const Matrix fixture = load_importance(std::filesystem::path(DAAHM_DATA_DIR) /
                                         "desk_importance.csv");
  EXPECT_TRUE(fixture.isApprox(desk_preset().env.importance));
}

TEST(LoadImportance, RejectsBadContent) {
  const auto dir = test_dir("importance_bad");
  write_text(dir / "range.csv", "a,b\n1,1.5\n0,1\n");
  EXPECT_THROW(load_importance(dir / "range.csv"), InvalidInput);

  write_text(dir / "ragged.csv", "a,b\n1,0\n0\n");
  EXPECT_THROW(load_importance(dir / "ragged.csv"), InvalidInput);

  write_text(dir / "text.csv", "a,b\n1,zebra\n0,1\n");
  EXPECT_THROW(load_importance(dir / "text.csv"), InvalidInput);

  write_text(dir / "empty.csv", "");
  EXPECT_THROW(load_importance(dir / "empty.csv"), InvalidInput);
}

TEST(Checkpoint, BitExactRoundTrip) {
  const auto dir = test_dir("ckpt");
  const DdpgAgent agent = make_agent(4, 3, AgentConfig{}, 99);
  save_checkpoint(agent, dir / "agent.bin");
  const DdpgAgent loaded = load_checkpoint(dir / "agent.bin");

  EXPECT_EQ(loaded.num_activities, 4);
  EXPECT_EQ(loaded.num_metrics, 3);
  EXPECT_EQ(loaded.config.gamma, agent.config.gamma);
  EXPECT_EQ(loaded.config.tau, agent.config.tau);
  for (const Mlp DdpgAgent::* net :
       {&DdpgAgent::actor, &DdpgAgent::critic, &DdpgAgent::target_actor,
        &DdpgAgent::target_critic}) {
    const Mlp& a = agent.*net;
    const Mlp& b = loaded.*net;
    ASSERT_EQ(a.layers.size(), b.layers.size());
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
      EXPECT_TRUE((a.layers[l].weight.array() == b.layers[l].weight.array()).all());
      EXPECT_TRUE((a.layers[l].bias.array() == b.layers[l].bias.array()).all());
      EXPECT_EQ(a.layers[l].activation, b.layers[l].activation);
    }
  }
}

TEST(Checkpoint, TruncationCorruptionAndVersion) {
  const auto dir = test_dir("ckpt_bad");
  const DdpgAgent agent = make_agent(3, 2, AgentConfig{}, 7);
  const auto path = dir / "agent.bin";
  save_checkpoint(agent, path);

  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  write_text(dir / "truncated.bin", bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(load_checkpoint(dir / "truncated.bin"), IntegrityError);

  std::string corrupted = bytes;
  corrupted[bytes.size() / 2] ^= 0x5a;
  write_text(dir / "corrupted.bin", corrupted);
  EXPECT_THROW(load_checkpoint(dir / "corrupted.bin"), IntegrityError);

  std::string bumped = bytes;
  bumped[8] = 2;  // version field follows the 8-byte magic
  write_text(dir / "version.bin", bumped);
  try {
    load_checkpoint(dir / "version.bin");
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }

  write_text(dir / "magic.bin", "HELLO WORLD, THIS IS NOT A CHECKPOINT AT ALL......");
  EXPECT_THROW(load_checkpoint(dir / "magic.bin"), IntegrityError);
  EXPECT_THROW(load_checkpoint(dir / "absent.bin"), IoError);
}

TEST(Results, HeaderOnlyAndExamples) {
  const auto dir = test_dir("results");
  emit_results({}, dir / "empty.csv");
  std::ifstream in(dir / "empty.csv");
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line, kResultsHeader);
  EXPECT_FALSE(std::getline(in, line));

  Vector alpha(3);
  alpha << 1, 0, 1;
  EXPECT_EQ(selection_to_mask(alpha), 5u);
}

TEST(Results, RoundTripRecoversExactValues) {
  const auto dir = test_dir("results_rt");
  std::vector<ResultRow> rows;
  Rng rng(404);
  for (int i = 0; i < 200; ++i) {
    ResultRow row;
    row.strategy = i % 2 == 0 ? "daahm" : "fixed";
    row.episode = i / 10;
    row.slot = i % 10;
    row.activity = static_cast<ActivityId>(rng.uniform_index(6));
    row.reward = rng.normal(0.3, 2.0);
    row.relevance = rng.uniform();
    row.cost = rng.uniform(0.0, 1.7);
    row.alpha_mask = static_cast<std::uint32_t>(rng.uniform_index(64));
    rows.push_back(row);
  }
  emit_results(rows, dir / "rows.csv");
  const std::vector<ResultRow> back = read_results(dir / "rows.csv");
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].strategy, rows[i].strategy);
    EXPECT_EQ(back[i].episode, rows[i].episode);
    EXPECT_EQ(back[i].slot, rows[i].slot);
    EXPECT_EQ(back[i].activity, rows[i].activity);
    EXPECT_EQ(back[i].reward, rows[i].reward);
    EXPECT_EQ(back[i].relevance, rows[i].relevance);
    EXPECT_EQ(back[i].cost, rows[i].cost);
    EXPECT_EQ(back[i].alpha_mask, rows[i].alpha_mask);
  }
}

TEST(Results, UnwritablePathFails) {
  EXPECT_THROW(emit_results({}, "/nonexistent_dir_daahm/rows.csv"), IoError);
}

}  // namespace
}  // namespace daahm
