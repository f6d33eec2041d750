#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "moranipd/errors.hpp"
#include "moranipd/game.hpp"

using namespace moranipd;

TEST_CASE("actions carry their cooperation bit and flip") {
  CHECK(coop_bit(Action::C) == 1);
  CHECK(coop_bit(Action::D) == 0);
  CHECK(flip(Action::C) == Action::D);
  CHECK(flip(Action::D) == Action::C);
  CHECK(to_char(Action::C) == 'C');
  CHECK(to_char(Action::D) == 'D');
  CHECK(action_from_char('C') == Action::C);
  CHECK(action_from_char('d') == Action::D);
  CHECK_THROWS_AS(action_from_char('x'), ValidationError);
}

TEST_CASE("default matrix is valid and scores rounds") {
  PayoffMatrix m;
  validate_matrix(m);
  CHECK(score_round(Action::C, Action::C, m) == std::pair{3.0, 3.0});
  CHECK(score_round(Action::C, Action::D, m) == std::pair{0.0, 5.0});
  CHECK(score_round(Action::D, Action::C, m) == std::pair{5.0, 0.0});
  CHECK(score_round(Action::D, Action::D, m) == std::pair{1.0, 1.0});
}

TEST_CASE("matrix ordering violations name the broken inequality") {
  PayoffMatrix bad_order{.r = 5.0, .s = 0.0, .t = 3.0, .p = 1.0};  // t < r
  CHECK_THROWS_WITH_AS(validate_matrix(bad_order), doctest::Contains("T > R > P > S violated"),
                       ValidationError);

  PayoffMatrix bad_sum{.r = 3.0, .s = 1.0, .t = 5.5, .p = 2.0};  // 2r = 6 <= t + s = 6.5
  CHECK_THROWS_WITH_AS(validate_matrix(bad_sum), doctest::Contains("2R > T + S violated"),
                       ValidationError);
}

TEST_CASE("non-default valid matrices pass") {
  PayoffMatrix m{.r = 4.0, .s = -1.0, .t = 6.0, .p = 0.0};
  CHECK(&validate_matrix(m) == &m);
}
