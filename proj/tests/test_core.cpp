#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "oracles.hpp"
#include "rmcds/corruption.hpp"
#include "rmcds/mask.hpp"
#include "rmcds/matrix_io.hpp"
#include "rmcds/model.hpp"
#include "rmcds/rng.hpp"

using namespace rmcds;

TEST_CASE("rng streams are reproducible and substreams independent") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform01() == b.uniform01());
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("index set algebra") {
  const auto a = IndexSet::from_pairs({{0, 0}, {1, 1}, {0, 0}});
  CHECK(a.size() == 2);  // duplicates collapse
  const auto b = IndexSet::from_pairs({{1, 1}, {2, 2}});
  CHECK(a.set_union(b).size() == 3);
  CHECK(a.set_intersection(b).size() == 1);
  CHECK(a.set_difference(b).size() == 1);
  const auto full = IndexSet::full_grid(3);
  CHECK(full.size() == 9);
  CHECK(a.complement(3).size() == 7);
  CHECK(a.complement(3).set_union(a) == full);
}

TEST_CASE("full and decimation masks") {
  CHECK(generate_full_mask(2).observed.size() == 4);

  const auto dec = generate_decimation_mask(4, 2);
  CHECK(dec.observed.size() == 8);
  for (const auto& [i, j] : dec.observed.pairs()) CHECK((i + j) % 2 == 1);

  CHECK_THROWS_AS(generate_decimation_mask(4, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_block_mask(4, 4), std::invalid_argument);
  CHECK_THROWS_AS(generate_bernoulli_mask(4, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_bernoulli_mask(4, 1.5, 1), std::invalid_argument);

  const auto block = generate_block_mask(4, 2);
  CHECK(block.observed.size() == 12);
  CHECK(!block.observed.contains(0, 0));
  CHECK(!block.observed.contains(1, 1));
  CHECK(block.observed.contains(2, 0));
}

TEST_CASE("bernoulli mask concentrates and is frozen by its seed") {
  const auto m1 = generate_bernoulli_mask(100, 0.5, 42);
  const auto m2 = generate_bernoulli_mask(100, 0.5, 42);
  CHECK(m1.observed == m2.observed);
  const double frac = m1.rate();
  CHECK(frac >= 0.45);
  CHECK(frac <= 0.55);
}

TEST_CASE("generate_low_rank contracts") {
  SUBCASE("1x1 model") {
    const auto m = generate_low_rank(1, 1, 0);
    CHECK(std::abs(m.U(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(m.V(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(incoherence(m).nu == doctest::Approx(1.0));
  }
  SUBCASE("orthonormal factors") {
    const auto m = generate_low_rank(8, 2, 7);
    CHECK((m.U.transpose() * m.U - Matrix::Identity(2, 2)).norm() <= 1e-10);
    CHECK((m.V.transpose() * m.V - Matrix::Identity(2, 2)).norm() <= 1e-10);
    CHECK(m.sigma(0) >= m.sigma(1));
    CHECK(m.sigma(1) > 0.0);
  }
  SUBCASE("bitwise determinism") {
    const auto a = generate_low_rank(8, 2, 7);
    const auto b = generate_low_rank(8, 2, 7);
    CHECK(a.U == b.U);
    CHECK(a.V == b.V);
    CHECK(a.sigma == b.sigma);
  }
  SUBCASE("numerical rank is r") {
    const auto m = generate_low_rank(12, 3, 5);
    Eigen::JacobiSVD<Matrix> svd(m.reconstruct());
    CHECK(svd.singularValues()(2) > 0.5);
    CHECK(svd.singularValues()(3) < 1e-12);
  }
  CHECK_THROWS_AS(generate_low_rank(4, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_low_rank(4, 5, 0), std::invalid_argument);
}

TEST_CASE("incoherence extremes and definition oracle") {
  SUBCASE("maximally coherent") {
    LowRankModel m;
    m.n = 6;
    m.r = 2;
    m.U = Matrix::Identity(6, 2);
    m.V = Matrix::Identity(6, 2);
    m.sigma = Vector::Constant(2, 1.0);
    CHECK(incoherence(m).nu == doctest::Approx(3.0));
  }
  SUBCASE("flat vector") {
    LowRankModel m;
    m.n = 4;
    m.r = 1;
    m.U = Matrix::Constant(4, 1, 0.5);
    m.V = Matrix::Constant(4, 1, 0.5);
    m.sigma = Vector::Constant(1, 1.0);
    const auto rep = incoherence(m);
    CHECK(rep.nu == doctest::Approx(1.0));
    CHECK(rep.uv_inf == doctest::Approx(0.25));
  }
  SUBCASE("definition recomputed with independent loop order") {
    const auto m = generate_low_rank(64, 2, 3);
    const auto rep = incoherence(m);
    double max_sq = 0.0;
    for (Index i = 0; i < m.n; ++i) {
      double su = 0.0, sv = 0.0;
      for (Index k = 0; k < m.r; ++k) {
        su += m.U(i, k) * m.U(i, k);
        sv += m.V(i, k) * m.V(i, k);
      }
      max_sq = std::max({max_sq, su, sv});
    }
    const double nu_oracle = (static_cast<double>(m.n) / m.r) * max_sq;
    CHECK(rep.nu == doctest::Approx(nu_oracle).epsilon(1e-12));
    double uv = 0.0;
    for (Index j = 0; j < m.n; ++j)
      for (Index i = 0; i < m.n; ++i)
        uv = std::max(uv, std::abs(m.U.row(i).dot(m.V.row(j))));
    CHECK(rep.uv_inf == doctest::Approx(uv).epsilon(1e-12));
  }
}

TEST_CASE("corruption model") {
  SUBCASE("rho = 0") {
    const auto c = generate_corruption(8, 0.0, 1.0, 3);
    const auto mask = generate_bernoulli_mask(8, 0.5, 9);
    CHECK(c.support.empty());
    CHECK(observed_sparse(c, mask).norm() == 0.0);
    CHECK(corrupted_observed(c, mask).empty());
    CHECK(clean_observed(c, mask) == mask.observed);
  }
  SUBCASE("signs and support structure") {
    const auto c = generate_corruption(30, 0.2, 2.0, 11);
    const auto mask = generate_bernoulli_mask(30, 0.6, 4);
    const Matrix sig = observed_sign(c, mask);
    const auto v_set = corrupted_observed(c, mask);
    Index nonzero = 0;
    for (Index i = 0; i < 30; ++i)
      for (Index j = 0; j < 30; ++j) {
        const double s = sig(i, j);
        CHECK((s == 0.0 || s == 1.0 || s == -1.0));
        if (s != 0.0) {
          ++nonzero;
          CHECK(v_set.contains(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)));
        }
      }
    CHECK(nonzero == v_set.size());
    for (double mag : c.magnitudes) {
      CHECK(mag >= 1.0);
      CHECK(mag <= 2.0);
    }
  }
  SUBCASE("support rate concentrates") {
    const auto c = generate_corruption(200, 0.1, 1.0, 7);
    const double frac = static_cast<double>(c.support.size()) / (200.0 * 200.0);
    CHECK(frac >= 0.08);
    CHECK(frac <= 0.12);
  }
  SUBCASE("V and N partition O") {
    const auto c = generate_corruption(20, 0.3, 1.0, 5);
    const auto mask = generate_bernoulli_mask(20, 0.5, 6);
    const auto v_set = corrupted_observed(c, mask);
    const auto n_set = clean_observed(c, mask);
    CHECK(v_set.set_union(n_set) == mask.observed);
    CHECK(v_set.set_intersection(n_set).empty());
  }
  CHECK_THROWS_AS(generate_corruption(4, 1.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_corruption(4, -0.1, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_corruption(4, 0.5, 0.0, 0), std::invalid_argument);
}

TEST_CASE("matrix and mask files round-trip") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "rmcds_io_test";
  fs::create_directories(dir);

  Rng rng(17);
  const Matrix m = test::random_matrix(5, 5, rng);
  const auto mpath = (dir / "m.csv").string();
  write_matrix_csv(mpath, m);
  CHECK((read_matrix_csv(mpath) - m).norm() == 0.0);  // 17 digits is lossless

  const auto mask = generate_bernoulli_mask(12, 0.4, 33);
  const auto kpath = (dir / "mask.txt").string();
  write_mask(kpath, mask);
  const auto loaded = read_mask(kpath);
  CHECK(loaded.n == 12);
  CHECK(loaded.observed == mask.observed);

  CHECK_THROWS_AS(read_matrix_csv((dir / "missing.csv").string()), IoError);
  {
    std::FILE* f = std::fopen((dir / "bad.csv").string().c_str(), "wb");
    std::fputs("1,notanumber\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_matrix_csv((dir / "bad.csv").string()), IoError);
  {
    std::FILE* f = std::fopen((dir / "dup.txt").string().c_str(), "wb");
    std::fputs("n 4\n0 0\n0 0\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_mask((dir / "dup.txt").string()), IoError);
  {
    std::FILE* f = std::fopen((dir / "oob.txt").string().c_str(), "wb");
    std::fputs("n 4\n0 9\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_mask((dir / "oob.txt").string()), IoError);
  fs::remove_all(dir);
}

TEST_CASE("mask spec parsing") {
  CHECK(parse_mask_spec("full").kind == MaskKind::Full);
  CHECK(parse_mask_spec("decimation:3").period == 3);
  CHECK(parse_mask_spec("block:4").block == 4);
  CHECK(parse_mask_spec("bernoulli").kind == MaskKind::Bernoulli);
  CHECK(parse_mask_spec("file:/tmp/x").path == "/tmp/x");
  CHECK_THROWS_AS(parse_mask_spec("nope"), std::invalid_argument);
  CHECK_THROWS_AS(parse_mask_spec("decimation"), std::invalid_argument);
}
