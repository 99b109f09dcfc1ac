#include <doctest.h>

#include <cmath>
#include <frpsa/dataset.hpp>
#include <frpsa/errors.hpp>
#include <frpsa/rng.hpp>

#include "test_support.hpp"

using namespace frpsa;

TEST_CASE("parse a plain 3x2 csv") {
  const Dataset d = parse_csv("a,b\n1,2\n3,4\n5,6\n");
  CHECK(d.n_cases() == 3);
  CHECK(d.n_columns() == 2);
  CHECK(d.columns == std::vector<std::string>{"a", "b"});
  CHECK(d.values(0, 0) == 1.0);
  CHECK(d.values(2, 1) == 6.0);
  CHECK_FALSE(d.has_missing());
}

TEST_CASE("empty cell is flagged missing") {
  const Dataset d = parse_csv("a,b\n1,\n3,4\n");
  CHECK(d.has_missing());
  CHECK(std::isnan(d.values(0, 1)));
  CHECK(d.values(1, 0) == 3.0);
}

TEST_CASE("non-numeric cell becomes missing, not fatal") {
  const Dataset d = parse_csv("a,b\n1,xyz\n3,4\n");
  CHECK(std::isnan(d.values(0, 1)));
}

TEST_CASE("ragged row error names the row") {
  CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,2,3\n", ',', "f.csv"),
                       doctest::Contains("row 1"), Error);
}

TEST_CASE("duplicate header names rejected") {
  CHECK_THROWS_WITH_AS(parse_csv("a,a\n1,2\n"), doctest::Contains("duplicate"), Error);
}

TEST_CASE("zero data rows rejected") {
  CHECK_THROWS_WITH_AS(parse_csv("a,b\n"), doctest::Contains("no data rows"), Error);
}

TEST_CASE("unreadable file is an io error") {
  try {
    load_dataset("/nonexistent/nope.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
    CHECK(e.exit_code() == 4);
  }
}

TEST_CASE("custom delimiter") {
  const Dataset d = parse_csv("a;b\n1;2\n", ';');
  CHECK(d.values(0, 1) == 2.0);
}

TEST_CASE("screening keeps exactly the complete rows, in order") {
  // 706 received, 91 with at least one missing cell -> 615 valid.
  Rng rng(99);
  std::string csv = "x,y,z\n";
  int incomplete = 0;
  for (int i = 0; i < 706; ++i) {
    const bool drop = incomplete < 91 && rng.uniform01() < 0.2;
    if (drop) {
      ++incomplete;
      csv += std::to_string(i) + ",,1\n";
    } else {
      csv += std::to_string(i) + ",2,1\n";
    }
  }
  REQUIRE(incomplete == 91);
  const auto [screened, summary] = screen_cases(parse_csv(csv));
  CHECK(summary.received == 706);
  CHECK(summary.excluded == 91);
  CHECK(summary.valid == 615);
  CHECK(screened.n_cases() == 615);
  CHECK_FALSE(screened.has_missing());
  // Survivors keep their original relative order: column x stays increasing.
  for (int r = 1; r < screened.n_cases(); ++r) {
    CHECK(screened.values(r, 0) > screened.values(r - 1, 0));
  }
}

TEST_CASE("screening a complete dataset changes nothing") {
  const Dataset d = parse_csv("a,b\n1,2\n3,4\n");
  const auto [screened, summary] = screen_cases(d);
  CHECK(summary.excluded == 0);
  CHECK(screened.values == d.values);
}

TEST_CASE("screening everything away is an error") {
  CHECK_THROWS_WITH_AS(screen_cases(parse_csv("a,b\n1,\n,2\n")),
                       doctest::Contains("excluded every case"), Error);
}

TEST_CASE("standardize the (1,2,3) column") {
  const Dataset d = parse_csv("a\n1\n2\n3\n");
  const StandardizedDataset s = standardize(d);
  CHECK(s.values(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(s.values(1, 0) == doctest::Approx(0.0).scale(1.0));
  CHECK(s.values(2, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.means(0) == doctest::Approx(2.0));
  CHECK(s.sds(0) == doctest::Approx(1.0));
}

TEST_CASE("standardize is idempotent within 1e-12") {
  const Dataset d = testsupport::correlated_pair(200, 0.4, 5);
  const StandardizedDataset once = standardize(d);
  const StandardizedDataset twice = standardize(testsupport::make_dataset(once.values, d.columns));
  CHECK((twice.values - once.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standardization is scale invariant") {
  const Dataset d = testsupport::correlated_pair(150, 0.3, 6);
  Dataset scaled = d;
  scaled.values.col(0) *= 7.5;
  const StandardizedDataset a = standardize(d);
  const StandardizedDataset b = standardize(scaled);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("stored means and sds reconstruct the raw data exactly") {
  const Dataset d = testsupport::correlated_pair(100, 0.2, 7);
  const StandardizedDataset s = standardize(d);
  Eigen::MatrixXd rebuilt(s.values.rows(), s.values.cols());
  for (int c = 0; c < s.n_columns(); ++c) {
    rebuilt.col(c) = s.values.col(c) * s.sds(c) + Eigen::VectorXd::Constant(s.values.rows(), s.means(c));
  }
  CHECK((rebuilt - d.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant column is a zero-variance error naming the column") {
  CHECK_THROWS_WITH_AS(standardize(parse_csv("a,b\n4,1\n4,2\n4,3\n")),
                       doctest::Contains("'a'"), Error);
}

TEST_CASE("standardize refuses missing cells and tiny datasets") {
  CHECK_THROWS_AS(standardize(parse_csv("a\n1\n")), Error);
  CHECK_THROWS_AS(standardize(parse_csv("a\n1\n\n2\n")), Error);  // blank line ignored, but
}

TEST_CASE("csv round trip preserves values and missing cells") {
  const Dataset d = parse_csv("a,b\n1.25,\n-3.5,4e-3\n");
  const Dataset back = parse_csv(to_csv(d));
  CHECK(back.columns == d.columns);
  CHECK(back.values(1, 0) == d.values(1, 0));
  CHECK(std::isnan(back.values(0, 1)));
}
