#include <catch2/catch_amalgamated.hpp>

#include "voxcal/qseries.hpp"

using namespace voxcal;

TEST_CASE("euler products") {
  SECTION("parts congruent to 1 or 4 mod 5: coefficient of q^9 is 5") {
    // Oracle: partitions of 9 into {1, 4, 6, 9}: 9; 6+1+1+1; 4+4+1;
    // 4+1^5; 1^9.
    const QSeries s = euler_product(parts_congruent({1, 4}, 5, Half(12)), Half(12));
    REQUIRE(s.coefficient(Half(9)) == Rational(5));
  }
  SECTION("parts congruent to 2 or 3 mod 5: coefficient of q^9 is 3") {
    // Oracle: partitions of 9 into {2, 3, 7, 8}: 7+2; 3+3+3; 3+2+2+2.
    const QSeries s = euler_product(parts_congruent({2, 3}, 5, Half(12)), Half(12));
    REQUIRE(s.coefficient(Half(9)) == Rational(3));
  }
  SECTION("half-odd parts reproduce the Fock graded dimension") {
    REQUIRE(euler_product(parts_half_odd(Half(15)), Half(15)) ==
            fock_graded_dimension(Half(15)));
  }
}

TEST_CASE("partition counting, both paths") {
  SECTION("difference-two partitions of 9") {
    // Exhaustive: 9; 8+1; 7+2; 6+3; 5+3+1.
    REQUIRE(count_partitions(9, PartitionPredicate::difference_two()) == 5);
  }
  SECTION("difference-two with smallest part at least 2") {
    // Exhaustive: 9; 7+2; 6+3.
    REQUIRE(count_partitions(9, PartitionPredicate::difference_two_min_two()) == 3);
  }
  SECTION("the empty partition counts once") {
    REQUIRE(count_partitions(0, PartitionPredicate::difference_two()) == 1);
    REQUIRE(count_partitions(0, PartitionPredicate::congruent({1, 4}, 5)) == 1);
  }
  SECTION("DP and brute force agree across predicates", "[property]") {
    for (std::int64_t n = 0; n <= 25; ++n) {
      for (int which : {1, 2}) {
        REQUIRE(count_partitions_dp(n, rr_product_predicate(which)) ==
                count_partitions_brute(n, rr_product_predicate(which)));
        REQUIRE(count_partitions_dp(n, rr_sum_predicate(which)) ==
                count_partitions_brute(n, rr_sum_predicate(which)));
      }
    }
  }
  SECTION("brute force is capped") {
    REQUIRE_THROWS_AS(count_partitions_brute(61, PartitionPredicate::difference_two()),
                      std::invalid_argument);
  }
}

TEST_CASE("Rogers-Ramanujan identities") {
  SECTION("identity 1 to order 100") {
    const RRReport rep = rr_verify(1, 100);
    REQUIRE(rep.pass);
    REQUIRE_FALSE(rep.first_mismatch.has_value());
  }
  SECTION("identity 2 to order 100") {
    REQUIRE(rr_verify(2, 100).pass);
  }
  SECTION("triple agreement to the brute-force cap") {
    for (int which : {1, 2}) {
      const QSeries product = rr_product_series(which, brute_force_cap);
      const QSeries sum = rr_sum_series(which, brute_force_cap);
      for (std::int64_t n = 0; n <= brute_force_cap; ++n) {
        const Rational brute_prod(
            Integer(count_partitions_brute(n, rr_product_predicate(which))));
        const Rational brute_sum(
            Integer(count_partitions_brute(n, rr_sum_predicate(which))));
        REQUIRE(product.coefficient(Half(n)) == brute_prod);
        REQUIRE(sum.coefficient(Half(n)) == brute_sum);
        REQUIRE(brute_prod == brute_sum);
      }
    }
  }
  SECTION("negative control: a wrong modulus class mismatches early") {
    const QSeries wrong = euler_product(parts_congruent({1, 3}, 5, Half(40)), Half(40));
    const QSeries sum = rr_sum_series(1, 40);
    const auto mismatch = QSeries::first_mismatch(wrong, sum);
    REQUIRE(mismatch.has_value());
    REQUIRE(*mismatch <= Half(6));
  }
  SECTION("bad identity index is rejected") {
    REQUIRE_THROWS_AS(rr_verify(3, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(rr_verify(1, 0), std::invalid_argument);
  }
}

TEST_CASE("difference-two monomial counting") {
  REQUIRE(difference_two_monomial_count(9, false) == 5);
  REQUIRE(difference_two_monomial_count(9, true) == 3);
  REQUIRE(difference_two_monomial_count(0, false) == 1);
  REQUIRE(difference_two_monomial_count(0, true) == 1);

  SECTION("generating series equals the matching sum side") {
    REQUIRE(difference_two_generating_series(40, false) == rr_sum_series(1, 40));
    REQUIRE(difference_two_generating_series(40, true) == rr_sum_series(2, 40));
  }
}

TEST_CASE("stored constants") {
  const MoonshineConstants c = moonshine_constants();
  REQUIRE(c.j_coefficient_q_minus_1 == 1);
  REQUIRE(c.j_coefficient_q_0 == 0);
  REQUIRE(c.j_coefficient_q_1 == 196884);
  REQUIRE(c.griess_dimension == 196883);
  REQUIRE(c.griess_enlarged_dimension == 196884);
  REQUIRE(c.j_coefficient_q_1 == c.griess_dimension + 1);
  REQUIRE(c.moonshine_central_charge == 24);
  REQUIRE(c.leech_rank == 24);
}

TEST_CASE("qseries arithmetic stays exact") {
  QSeries a(Half(6)), b(Half(6));
  a.set(Half(0), Rational(1));
  a.set(half(1), rational(1, 3));
  b.set(half(1), rational(2, 3));
  const QSeries s = a + b;
  REQUIRE(s.coefficient(half(1)) == Rational(1));
  const QSeries p = a * b;
  REQUIRE(p.coefficient(half(1)) == rational(2, 3));
  REQUIRE(p.coefficient(Half(1)) == rational(2, 9));
  REQUIRE_THROWS_AS(p.coefficient(Half(7)), std::out_of_range);
}
