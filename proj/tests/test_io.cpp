#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "maxstab/errors.hpp"
#include "maxstab/io.hpp"

using namespace maxstab;

TEST_CASE("shortest double formatting round-trips") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> expo(-300.0, 300.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::pow(10.0, expo(gen)) * (i % 2 == 0 ? 1.0 : -1.0);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1e300) == "1e+300");
  CHECK_THROWS_AS(parse_double("1.5x"), ValidationError);
  CHECK_THROWS_AS(parse_double(""), ValidationError);
}

TEST_CASE("CSV fields") {
  CHECK(split_csv_line("a,\"1,2|3\",4") == std::vector<std::string>{"a", "1,2|3", "4"});
  CHECK(split_csv_line("x,,y") == std::vector<std::string>{"x", "", "y"});
  CHECK(csv_field("1,2|3") == "\"1,2|3\"");
  CHECK(csv_field("1|2") == "1|2");
  CHECK(split_csv_line(csv_field("say \"hi\", ok")) == std::vector<std::string>{"say \"hi\", ok"});
}

TEST_CASE("dataset CSV round-trip is lossless") {
  for (ModelTag model : {ModelTag::Logistic, ModelTag::OuterPowerClayton}) {
    for (int d : {1, 3, 10}) {
      const auto ds = sample_dataset(30, 25, d, model, LogisticParam(0.35), RngStream(11, static_cast<std::uint64_t>(d)));
      std::stringstream buf;
      write_dataset_csv(buf, ds);
      const auto back = read_dataset_csv(buf);
      CHECK(back.n == ds.n);
      CHECK(back.d == ds.d);
      CHECK(back.model == ds.model);
      CHECK(back.alpha_true == ds.alpha_true);
      REQUIRE(back.observations.size() == ds.observations.size());
      for (std::size_t i = 0; i < ds.observations.size(); ++i) {
        CHECK(back.observations[i].maxima == ds.observations[i].maxima);
        CHECK(back.observations[i].partition == ds.observations[i].partition);
        CHECK(back.observations[i].n == ds.observations[i].n);
      }
    }
  }
}

TEST_CASE("malformed dataset files are rejected") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_dataset_csv(in);
  };
  const std::string head = "d,n,model,alpha_true\n2,10,logistic,0.5\nobs,partition,x1,x2\n";
  CHECK_NOTHROW(parse(head + "0,\"1,2\",0.5,0.7\n"));
  CHECK_THROWS_AS(parse(""), ValidationError);
  CHECK_THROWS_AS(parse("d,n\n2,10\n"), ValidationError);
  CHECK_THROWS_AS(parse(head + "0,\"1,2\",0.5\n"), ValidationError);             // missing column
  CHECK_THROWS_AS(parse(head + "0,\"1,2,3\",0.5,0.7\n"), ValidationError);       // partition of wrong set
  CHECK_THROWS_AS(parse(head + "0,1|2,-0.5,0.7\n"), ValidationError);            // non-positive maximum
  CHECK_THROWS_AS(parse(head + "0,1|2,abc,0.7\n"), ValidationError);
  CHECK_THROWS_AS(parse("d,n,model,alpha_true\n2,10,gumbel,0.5\nobs,partition,x1,x2\n"), ValidationError);
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv"), ValidationError);
}
