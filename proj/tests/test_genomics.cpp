#include <gtest/gtest.h>

#include <sstream>

#include "mrepath/errors.hpp"
#include "mrepath/genomics.hpp"
#include "mrepath/grad_check.hpp"
#include "mrepath/ops.hpp"
#include "mrepath/rng.hpp"

using namespace mrepath;

namespace {

GeneGroups random_groups(const std::vector<Eigen::Index>& widths, Rng& rng) {
  GeneGroups g;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    g.names.push_back("g" + std::to_string(i));
    g.values.push_back(rng.normal_matrix(1, widths[i], 1.0));
  }
  return g;
}

}  // namespace

TEST(Genomics, DefaultNames) {
  const auto& n = default_group_names();
  ASSERT_EQ(n.size(), 6u);
  EXPECT_EQ(n.front(), "tumor_suppression");
  EXPECT_EQ(n.back(), "cytokines_growth");
}

TEST(Genomics, ZeroParamsGiveZeroEmbedding) {
  Rng rng(0);
  GenomicsSpec spec{{3, 5, 2}, 4, 8, Activation::ELU};
  ParamStore ps;
  init_genomics_params(ps, "geno", spec, rng);
  ps.set_flat(Vector::Zero(ps.numel()));
  const Matrix G = embed_groups(random_groups(spec.widths, rng), ps, "geno", spec);
  EXPECT_EQ(G, Matrix::Zero(3, 8));
}

TEST(Genomics, IdentityConfigurationPadsInputs) {
  Rng rng(1);
  GenomicsSpec spec{{3, 5, 2, 4}, 6, 6, Activation::Identity};
  ParamStore ps;
  init_genomics_params(ps, "geno", spec, rng);
  for (std::size_t i = 0; i < spec.widths.size(); ++i) {
    ps.value("geno.W1." + std::to_string(i)) = Matrix::Identity(spec.widths[i], 6);
    ps.value("geno.b1." + std::to_string(i)).setZero();
  }
  ps.value("geno.W2") = Matrix::Identity(6, 6);
  ps.value("geno.b2").setZero();
  const auto g = random_groups(spec.widths, rng);
  const Matrix G = embed_groups(g, ps, "geno", spec);
  for (std::size_t i = 0; i < g.size(); ++i) {
    RowVector padded = RowVector::Zero(6);
    padded.head(spec.widths[i]) = g.values[i];
    EXPECT_EQ(G.row(static_cast<Eigen::Index>(i)), padded);
  }
}

TEST(Genomics, MatchesMatmulChain) {
  Rng rng(2);
  GenomicsSpec spec{{3, 5, 2, 4, 4, 3}, 7, 8, Activation::ELU};
  ParamStore ps;
  init_genomics_params(ps, "geno", spec, rng);
  for (const auto& n : ps.names()) ps.value(n) = rng.normal_matrix(ps.value(n).rows(), ps.value(n).cols(), 0.5);
  const auto g = random_groups(spec.widths, rng);
  const Matrix G = embed_groups(g, ps, "geno", spec);
  ASSERT_EQ(G.rows(), 6);
  ASSERT_EQ(G.cols(), 8);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::string k = std::to_string(i);
    const Matrix h = apply_activation(
        matmul(g.values[i], ps.value("geno.W1." + k)) + ps.value("geno.b1." + k), Activation::ELU);
    const Matrix row = matmul(h, ps.value("geno.W2")) + ps.value("geno.b2");
    EXPECT_LT((G.row(static_cast<Eigen::Index>(i)) - row).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Genomics, WidthMismatchIsShapeError) {
  Rng rng(3);
  GenomicsSpec spec{{3, 5}, 4, 4, Activation::ELU};
  ParamStore ps;
  init_genomics_params(ps, "geno", spec, rng);
  EXPECT_THROW(embed_groups(random_groups({3, 4}, rng), ps, "geno", spec), ShapeError);
  EXPECT_THROW(embed_groups(random_groups({3}, rng), ps, "geno", spec), ShapeError);
}

TEST(Genomics, GroupPermutationEquivariance) {
  Rng rng(4);
  GenomicsSpec spec{{3, 5, 2}, 4, 5, Activation::ELU};
  ParamStore ps;
  init_genomics_params(ps, "geno", spec, rng);
  const auto g = random_groups(spec.widths, rng);
  const std::vector<int> perm{2, 0, 1};
  GenomicsSpec pspec = spec;
  GeneGroups pg;
  ParamStore pps;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    pspec.widths[i] = spec.widths[perm[i]];
    pg.names.push_back(g.names[perm[i]]);
    pg.values.push_back(g.values[perm[i]]);
  }
  for (std::size_t i = 0; i < perm.size(); ++i) {
    pps.add("geno.W1." + std::to_string(i), ps.value("geno.W1." + std::to_string(perm[i])));
    pps.add("geno.b1." + std::to_string(i), ps.value("geno.b1." + std::to_string(perm[i])));
  }
  pps.add("geno.W2", ps.value("geno.W2"));
  pps.add("geno.b2", ps.value("geno.b2"));
  const Matrix G = embed_groups(g, ps, "geno", spec), PG = embed_groups(pg, pps, "geno", pspec);
  for (std::size_t i = 0; i < perm.size(); ++i)
    EXPECT_EQ(PG.row(static_cast<Eigen::Index>(i)), G.row(perm[i]));
}

class GenomicsGrad : public ::testing::TestWithParam<int> {};

TEST_P(GenomicsGrad, EmbedGroups) {
  Rng rng(static_cast<std::uint64_t>(GetParam()));
  GenomicsSpec spec{{3, 5, 2, 4}, 5, 4, Activation::ELU};
  ParamStore ps;
  init_genomics_params(ps, "geno", spec, rng);
  const auto g = random_groups(spec.widths, rng);
  const Matrix target = rng.normal_matrix(4, 4, 1.0);
  LossFn f = [&](ParamStore& p) {
    Tape t;
    const Var G = embed_groups(t, g, p, "geno", spec);
    const Var loss = sum(hadamard(G, t.constant(target)));
    t.backward(loss);
    return loss.scalar();
  };
  const auto report = grad_check(f, ps, 1e-5, 1e-4);
  EXPECT_TRUE(report.passed) << report.message;
}

INSTANTIATE_TEST_SUITE_P(Seeds, GenomicsGrad, ::testing::Values(0, 1, 2));

TEST(GeneFile, RoundTripIsBitExact) {
  Rng rng(5);
  GeneGroups g;
  for (std::size_t i = 0; i < 6; ++i) {
    g.names.push_back(default_group_names()[i]);
    g.values.push_back(rng.normal_matrix(1, 2 + static_cast<Eigen::Index>(i), 1.0));
  }
  std::stringstream ss;
  write_gene_groups(ss, g);
  const auto back = read_gene_groups(ss);
  EXPECT_EQ(back.names, g.names);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back.values[i], g.values[i]);
}

TEST(GeneFile, GrammarErrors) {
  std::stringstream comments("# profile\na:2 b:1\n\n1 2\n# mid\n3\n");
  const auto g = read_gene_groups(comments);
  EXPECT_EQ(g.values[1](0), 3.0);
  std::stringstream short_row("a:2 b:1\n1\n3\n");
  EXPECT_THROW(read_gene_groups(short_row), DataError);
  std::stringstream dup("a:1 a:1\n1\n2\n");
  EXPECT_THROW(read_gene_groups(dup), DataError);
  std::stringstream missing("a:1 b:1\n1\n");
  EXPECT_THROW(read_gene_groups(missing), DataError);
  std::stringstream junk("a:1\nx\n");
  EXPECT_THROW(read_gene_groups(junk), DataError);
}
