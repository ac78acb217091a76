#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "tempora/time_value.hpp"

using namespace tempora;

TEST_CASE("time values order as -inf < finite < +inf") {
  TimeValue lo = TimeValue::neg_inf();
  TimeValue hi = TimeValue::pos_inf();
  CHECK(lo < TimeValue::finite(kMinFiniteTime));
  CHECK(TimeValue::finite(kMaxFiniteTime) < hi);
  CHECK(lo < hi);
  CHECK(TimeValue::finite(-3) < TimeValue::finite(4));
  CHECK(TimeValue::finite(4) == TimeValue::finite(4));
  CHECK(lo == TimeValue::neg_inf());
  CHECK(hi == TimeValue::pos_inf());
  CHECK(lo != hi);
  CHECK(TimeValue() == TimeValue::finite(0));
}

TEST_CASE("negation is an involution and swaps the sentinels") {
  CHECK(-TimeValue::neg_inf() == TimeValue::pos_inf());
  CHECK(-TimeValue::pos_inf() == TimeValue::neg_inf());
  for (std::int64_t v : {-7, 0, 3, 4096}) {
    TimeValue t = TimeValue::finite(v);
    CHECK(-t == TimeValue::finite(-v));
    CHECK(-(-t) == t);
  }
  CHECK(-(-TimeValue::neg_inf()) == TimeValue::neg_inf());
}

TEST_CASE("value() is only defined on finite stamps") {
  CHECK(TimeValue::finite(42).value() == 42);
  CHECK_THROWS_AS((void)TimeValue::neg_inf().value(), std::logic_error);
  CHECK_THROWS_AS((void)TimeValue::pos_inf().value(), std::logic_error);
}

TEST_CASE("text form") {
  CHECK(TimeValue::finite(42).str() == "42");
  CHECK(TimeValue::finite(-7).str() == "-7");
  CHECK(TimeValue::neg_inf().str() == "-inf");
  CHECK(TimeValue::pos_inf().str() == "+inf");
}

TEST_CASE("labels compare by departure then arrival") {
  CHECK(TemporalLabel{1, 9} < TemporalLabel{2, 3});
  CHECK(TemporalLabel{2, 3} < TemporalLabel{2, 4});
  CHECK(TemporalLabel{2, 4} == TemporalLabel{2, 4});
}

TEST_CASE("plain labels coincide in departure and arrival") {
  TemporalLabel l = TemporalLabel::plain(5);
  CHECK(l.departure == 5);
  CHECK(l.arrival == 5);
  CHECK(l.is_plain());
  CHECK_FALSE(TemporalLabel{2, 6}.is_plain());
}

TEST_CASE("mirroring swaps and negates the endpoints") {
  TemporalLabel l{2, 6};
  CHECK(l.mirrored() == TemporalLabel{-6, -2});
  CHECK(l.mirrored().mirrored() == l);
  CHECK(TemporalLabel::plain(3).mirrored() == TemporalLabel::plain(-3));
  // Mirroring preserves arrival >= departure.
  CHECK(l.mirrored().arrival >= l.mirrored().departure);
}

TEST_CASE("label validation") {
  CHECK_NOTHROW(check_label(TemporalLabel{2, 6}, "t"));
  CHECK_NOTHROW(check_label(TemporalLabel::plain(0), "t"));
  CHECK_THROWS_AS(check_label(TemporalLabel{6, 2}, "t"), std::invalid_argument);
  CHECK_THROWS_AS(check_label_range(kMaxFiniteTime + 1, "t"),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_label_range(kMinFiniteTime - 1, "t"),
                  std::invalid_argument);
  CHECK_NOTHROW(check_label_range(kMaxFiniteTime, "t"));
  CHECK_NOTHROW(check_label_range(kMinFiniteTime, "t"));
}
