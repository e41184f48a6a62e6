#include <gtest/gtest.h>

#include <sstream>

#include "cli_runner.hpp"
#include "hkge/checkpoint.hpp"
#include "hkge/embedding.hpp"
#include "hkge/evaluator.hpp"

using namespace hkge;
using hkge::testing::read_file;
using hkge::testing::run_cli;
using hkge::testing::write_file;

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = hkge::testing::temp_dir("cli");
    hkge::testing::write_toy_inputs(dir);
    ASSERT_EQ(run_cli(hkge::testing::toy_build_args(dir, dir / "kg")), 0);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string q(const fs::path& p) const { return "'" + p.string() + "'"; }
  std::string train_args(const std::string& extra, const fs::path& out) const {
    return "train --kg " + q(dir / "kg") + " --dim 8 --epochs 1 --batch 2 --init-gamma 0.5 --seed 1 --out " +
           q(out) + " " + extra;
  }

  fs::path dir;
};

TEST_F(Cli, BuildWritesBundleWithAllTriples) {
  const auto kg = load_bundle(dir / "kg");
  EXPECT_EQ(kg.entities.size(), 5u);
  EXPECT_EQ(kg.splits.train.size() + kg.splits.valid.size() + kg.splits.test.size(), 6u);
  EXPECT_NE(read_file(dir / "kg" / "stats.tsv").find("Total\t6"), std::string::npos);
}

TEST_F(Cli, BuildIsReproducible) {
  ASSERT_EQ(run_cli(hkge::testing::toy_build_args(dir, dir / "kg2")), 0);
  for (const auto& entry : fs::directory_iterator(dir / "kg")) {
    EXPECT_EQ(read_file(entry.path()), read_file(dir / "kg2" / entry.path().filename()))
        << entry.path().filename();
  }
}

TEST_F(Cli, BuildRejectsBadInput) {
  write_file(dir / "bad.tsv", "D1\tinteract\tP1\n");
  const std::string args = "build-kg --entities " + q(dir / "entities.tsv") + " --triples " + q(dir / "bad.tsv") +
                           " --schema " + q(dir / "schema.tsv") + " --out " + q(dir / "kg3");
  std::string out;
  EXPECT_EQ(run_cli(args, &out), 2);
  EXPECT_NE(out.find(":1"), std::string::npos) << out;
  EXPECT_EQ(run_cli(hkge::testing::toy_build_args(dir, dir / "kg4") + " --ratios 0.5,0.5,0.5"), 2);
}

TEST_F(Cli, TrainOneEpochWritesOneCheckpoint) {
  ASSERT_EQ(run_cli(train_args("", dir / "run")), 0);
  std::vector<std::string> checkpoints;
  for (const auto& entry : fs::directory_iterator(dir / "run")) {
    if (entry.is_directory()) checkpoints.push_back(entry.path().filename().string());
  }
  EXPECT_EQ(checkpoints, std::vector<std::string>{"checkpoint-1"});
  EXPECT_EQ(read_file(dir / "run" / "latest"), "checkpoint-1\n");
  EXPECT_TRUE(read_file(dir / "run" / "loss.csv").starts_with("epoch,step,loss\n"));
}

TEST_F(Cli, InitializationWithoutVectorsExitsTwo) {
  EXPECT_EQ(run_cli(train_args("--method init", dir / "run")), 2);
  EXPECT_EQ(run_cli(train_args("--method init --vectors " + q(dir / "missing.vec"), dir / "run")), 2);
}

TEST_F(Cli, InitializationFromVectorFile) {
  write_file(dir / "text.vec", "2 8\nD1 1 2 3 4 5 6 7 8\nP2 0 0 0 0 0 0 0 0.5\n");
  ASSERT_EQ(run_cli(train_args("--method init --vectors " + q(dir / "text.vec") + " --epochs 0", dir / "run")), 0);
  const auto ck = load_checkpoint(dir / "run" / "checkpoint-0");
  EXPECT_EQ(ck.table.entity(0), (Eigen::RowVectorXd(8) << 1, 2, 3, 4, 5, 6, 7, 8).finished());
}

TEST_F(Cli, ResumeContinuesStepCount) {
  ASSERT_EQ(run_cli(train_args("", dir / "run")), 0);
  const auto first = load_checkpoint(dir / "run" / "checkpoint-1");
  ASSERT_EQ(run_cli(train_args("--epochs 2 --resume " + q(dir / "run" / "checkpoint-1"), dir / "resumed")), 0);
  const auto second = load_checkpoint(dir / "resumed" / "checkpoint-2");
  EXPECT_EQ(second.manifest.epoch, 2u);
  EXPECT_EQ(second.manifest.step, 2 * first.manifest.step);

  ASSERT_EQ(run_cli(train_args("--epochs 2", dir / "straight")), 0);
  EXPECT_EQ(load_checkpoint(dir / "straight" / "checkpoint-2").table, second.table);
}

TEST_F(Cli, EvalReportEqualsLibrary) {
  ASSERT_EQ(run_cli(train_args("", dir / "run")), 0);
  std::string out;
  ASSERT_EQ(run_cli("eval --kg " + q(dir / "kg") + " --checkpoint " + q(dir / "run" / "checkpoint-1") +
                        " --split test --threads 1",
                    &out),
            0);
  EXPECT_NE(out.find("report: "), std::string::npos);
  const auto tsv = read_file(dir / "run" / "checkpoint-1" / "report-test.tsv");
  EXPECT_TRUE(tsv.starts_with("relation\tcount\tmrr\thits1\thits3\thits10\n"));

  const auto kg = load_bundle(dir / "kg");
  const auto ck = load_checkpoint(dir / "run" / "checkpoint-1");
  std::ostringstream expected;
  write_report_tsv(evaluate(ScoringModel(ck.table), kg, SplitName::Test), expected);
  EXPECT_EQ(tsv, expected.str());
}

TEST_F(Cli, ExportSelectedDrugs) {
  ASSERT_EQ(run_cli(train_args("", dir / "run")), 0);
  const auto ckdir = dir / "run" / "checkpoint-1";
  ASSERT_EQ(run_cli("export-embeddings --checkpoint " + q(ckdir) + " --ids D1,D2,D3 --out " + q(dir / "d.vec")),
            0);
  EXPECT_TRUE(read_file(dir / "d.vec").starts_with("3 8\n"));
  const auto file = read_vector_file(dir / "d.vec");
  const auto ck = load_checkpoint(ckdir);
  ASSERT_EQ(file.ids, (std::vector<std::string>{"D1", "D2", "D3"}));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(Eigen::RowVectorXd(file.values.row(i)), Eigen::RowVectorXd(ck.table.entity(i)));
}

TEST_F(Cli, ExportAllAndByType) {
  ASSERT_EQ(run_cli(train_args("--model complex", dir / "run")), 0);
  const auto ckdir = dir / "run" / "checkpoint-1";
  ASSERT_EQ(run_cli("export-embeddings --checkpoint " + q(ckdir) + " --out " + q(dir / "all.vec")), 0);
  const auto all = read_vector_file(dir / "all.vec");
  EXPECT_EQ(all.size(), 5u);
  EXPECT_EQ(all.dim(), 16);
  ASSERT_EQ(run_cli("export-embeddings --checkpoint " + q(ckdir) + " --kg " + q(dir / "kg") +
                    " --type protein --out " + q(dir / "p.vec")),
            0);
  EXPECT_EQ(read_vector_file(dir / "p.vec").ids, (std::vector<std::string>{"P1", "P2"}));
}

TEST_F(Cli, ExportUnknownEntityExitsTwo) {
  ASSERT_EQ(run_cli(train_args("", dir / "run")), 0);
  EXPECT_EQ(run_cli("export-embeddings --checkpoint " + q(dir / "run" / "checkpoint-1") + " --ids D1,D9 --out " +
                    q(dir / "x.vec")),
            2);
}

TEST_F(Cli, DivergenceExitsThree) {
  std::string out;
  EXPECT_EQ(run_cli(train_args("--lr 1e300 --epochs 20", dir / "run"), &out), 3);
  EXPECT_NE(out.find("non-finite"), std::string::npos) << out;
}

TEST_F(Cli, HelpListsFlags) {
  std::string out;
  EXPECT_EQ(run_cli("train --help", &out), 0);
  for (const char* flag : {"--kg", "--model", "--method", "--vectors", "--lr", "--epochs", "--resume"}) {
    EXPECT_NE(out.find(flag), std::string::npos) << flag;
  }
  EXPECT_EQ(run_cli("", &out), 2);
  EXPECT_EQ(run_cli("train --kg " + q(dir / "kg") + " --out " + q(dir / "r") + " --bogus 1"), 2);
  EXPECT_EQ(run_cli(train_args("--model rescal", dir / "run")), 2);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  write_file(dir / "run.ini", "[train]\nkg = " + (dir / "kg").string() + "\nout = " + (dir / "run").string() +
                                  "\ndim = 4\nepochs = 1\nbatch = 3\n");
  ASSERT_EQ(run_cli("--config " + q(dir / "run.ini") + " train --epochs 2"), 0);
  const auto ck = load_checkpoint(dir / "run" / "checkpoint-2");
  EXPECT_EQ(ck.manifest.dim, 4);

  write_file(dir / "typo.ini", "[train]\nkg = " + (dir / "kg").string() + "\nout = " + (dir / "r2").string() +
                                   "\nepoch = 1\n");
  EXPECT_EQ(run_cli("--config " + q(dir / "typo.ini") + " train"), 2);
}
