#include <doctest.h>

#include <string>

#include "knowledge_base.hpp"
#include "rng.hpp"

using namespace hiplan;

namespace {

const char* kDomainText = R"((define (domain mountain_car)
  (:objects Car)
  (:predicates (Bottom_of_hills ?x) (On_right_side_hill ?x)
               (On_left_side_hill ?x) (At_top_of_right_side_hill ?x))
  (:goal (At_top_of_right_side_hill Car))
  (:operator opr1 :precondition (Bottom_of_hills ?x) :effect (On_right_side_hill ?x))
  (:operator opr2 :precondition (On_right_side_hill ?x) :effect (On_left_side_hill ?x))
  (:operator opr3 :precondition (On_left_side_hill ?x) :effect (At_top_of_right_side_hill ?x)))
)";

const char* kGroundingText =
    "; car position intervals\n"
    "Bottom_of_hills(Car)\t0\t-0.6\t-0.4\n"
    "On_right_side_hill(Car)\t0\t-0.2\t0.4\n"
    "On_left_side_hill(Car)\t0\t-1.2\t-0.8\n"
    "At_top_of_right_side_hill(Car)\t0\t0.6\t0.8\n";

}  // namespace

TEST_CASE("domain file parses to the expected knowledge base") {
    kb::KnowledgeBase k = kb::parse_domain(kDomainText);
    CHECK(k.domain_name == "mountain_car");
    CHECK(k.objects.size() == 1);
    CHECK(k.predicates.size() == 4);
    CHECK(k.operators.size() == 3);
    CHECK(k.goal.name() == "At_top_of_right_side_hill(Car)");
    CHECK(k.operators[0].id == "opr1");
    CHECK(k.operators[0].precondition.name() == "Bottom_of_hills(Car)");
    CHECK(k.operators[0].effect.name() == "On_right_side_hill(Car)");
    CHECK(k.operators[2].effect == k.goal);
    CHECK(k.ground_symbols().size() == 4);
}

TEST_CASE("shipped data files parse") {
    kb::KnowledgeBase full =
        kb::parse_domain(kb::read_file(std::string(HIPLAN_DATA_DIR) + "/mountain_car.pddl"));
    CHECK(full.operators.size() == 3);

    // experiment-2 domain: opr2 deleted by hand
    kb::KnowledgeBase degraded = kb::parse_domain(
        kb::read_file(std::string(HIPLAN_DATA_DIR) + "/mountain_car_degraded.pddl"));
    CHECK(degraded.operators.size() == 2);
    CHECK(degraded.operators[0].id == "opr1");
    CHECK(degraded.operators[1].id == "opr3");
    CHECK(degraded.predicates == full.predicates);

    kb::GroundingTable table = kb::parse_grounding(
        kb::read_file(std::string(HIPLAN_DATA_DIR) + "/mountain_car_grounding.tsv"));
    CHECK(table.entries.size() == 4);
    kb::validate_pair(full, table);
    kb::validate_pair(degraded, table);
}

TEST_CASE("domain with zero operators is valid") {
    kb::KnowledgeBase k = kb::parse_domain(
        "(define (domain d) (:objects A) (:predicates (P ?x) (Q ?x)) (:goal (Q A)))");
    CHECK(k.operators.empty());
    CHECK(k.predicates.size() == 2);
}

TEST_CASE("domain validation errors carry diagnostics") {
    CHECK_THROWS_WITH_AS(kb::parse_domain("(define (domain d)\n  (:objects A)\n"),
                         doctest::Contains("line 3"), kb::ParseError);

    // unknown predicate in an operator
    CHECK_THROWS_WITH_AS(
        kb::parse_domain("(define (domain d) (:objects A) (:predicates (P ?x) (Q ?x))\n"
                         "(:goal (Q A))\n"
                         "(:operator o1 :precondition (R ?x) :effect (Q ?x)))"),
        doctest::Contains("unknown predicate 'R'"), kb::ParseError);

    // unknown object in the goal
    CHECK_THROWS_WITH_AS(
        kb::parse_domain(
            "(define (domain d) (:objects A) (:predicates (P ?x) (Q ?x)) (:goal (Q B)))"),
        doctest::Contains("unknown object 'B'"), kb::ParseError);

    // duplicate operator id
    CHECK_THROWS_WITH_AS(
        kb::parse_domain("(define (domain d) (:objects A) (:predicates (P ?x) (Q ?x))\n"
                         "(:goal (Q A))\n"
                         "(:operator o1 :precondition (P ?x) :effect (Q ?x))\n"
                         "(:operator o1 :precondition (Q ?x) :effect (P ?x)))"),
        doctest::Contains("duplicate operator id"), kb::ParseError);

    // missing goal
    CHECK_THROWS_WITH_AS(
        kb::parse_domain("(define (domain d) (:objects A) (:predicates (P ?x)))"),
        doctest::Contains("goal"), kb::ParseError);

    // precondition equal to effect
    CHECK_THROWS_WITH_AS(
        kb::parse_domain("(define (domain d) (:objects A) (:predicates (P ?x) (Q ?x))\n"
                         "(:goal (Q A))\n"
                         "(:operator o1 :precondition (P ?x) :effect (P ?x)))"),
        doctest::Contains("identical precondition and effect"), kb::ParseError);

    CHECK_THROWS_WITH_AS(
        kb::parse_domain("(define (domain d) (:objects A A) (:predicates (P ?x)) (:goal (P A)))"),
        doctest::Contains("duplicate object"), kb::ParseError);
}

TEST_CASE("grounding table parses in file order") {
    kb::GroundingTable table = kb::parse_grounding(kGroundingText);
    REQUIRE(table.entries.size() == 4);
    CHECK(table.entries[0].symbol.name() == "Bottom_of_hills(Car)");
    CHECK(table.entries[0].dimension == 0);
    CHECK(table.entries[0].lower == -0.6);
    CHECK(table.entries[0].upper == -0.4);
    CHECK(table.entries[3].lower == 0.6);
    const kb::SymbolInterval* e = table.find(kb::Symbol{"On_left_side_hill", "Car"});
    REQUIRE(e != nullptr);
    CHECK(e->midpoint() == doctest::Approx(-1.0));
}

TEST_CASE("grounding table rejections") {
    CHECK_THROWS_WITH_AS(kb::parse_grounding("P(A)\t0\tx\t1\n"),
                         doctest::Contains("non-numeric"), kb::ParseError);
    // degenerate interval
    CHECK_THROWS_WITH_AS(kb::parse_grounding("P(A)\t0\t0.5\t0.5\n"),
                         doctest::Contains("lower bound must be strictly below"),
                         kb::ParseError);
    CHECK_THROWS_WITH_AS(kb::parse_grounding("P(A)\t0\t0\t1\nP(A)\t0\t2\t3\n"),
                         doctest::Contains("duplicate symbol"), kb::ParseError);
    CHECK_THROWS_WITH_AS(kb::parse_grounding("P(A)\t-1\t0\t1\n"),
                         doctest::Contains("dimension"), kb::ParseError);
    CHECK_THROWS_WITH_AS(kb::parse_grounding("NotASymbol\t0\t0\t1\n"),
                         doctest::Contains("Predicate(Object)"), kb::ParseError);
    CHECK_THROWS_WITH_AS(kb::parse_grounding("P(A)\t0\t0\n"), doctest::Contains("4 tab"),
                         kb::ParseError);
}

TEST_CASE("validate_pair flags mismatches") {
    kb::KnowledgeBase k = kb::parse_domain(kDomainText);
    kb::GroundingTable table = kb::parse_grounding(kGroundingText);

    kb::GroundingTable missing = table;
    missing.entries.pop_back();
    CHECK_THROWS_WITH_AS(kb::validate_pair(k, missing), doctest::Contains("no entry"),
                         kb::ParseError);

    kb::GroundingTable extra = table;
    extra.entries.push_back({kb::Symbol{"Elsewhere", "Car"}, 0, 0.0, 1.0});
    CHECK_THROWS_WITH_AS(kb::validate_pair(k, extra),
                         doctest::Contains("not a domain symbol"), kb::ParseError);
}

namespace {

// Random well-formed inputs for the round-trip property.
kb::KnowledgeBase random_kb(Rng& rng) {
    kb::KnowledgeBase k;
    k.domain_name = "d" + std::to_string(rng() % 1000);
    std::size_t n_obj = 1 + rng() % 2;
    std::size_t n_pred = 2 + rng() % 4;
    for (std::size_t i = 0; i < n_obj; ++i) k.objects.push_back("obj" + std::to_string(i));
    for (std::size_t i = 0; i < n_pred; ++i) k.predicates.push_back("pred" + std::to_string(i));
    k.goal = kb::Symbol{k.predicates[rng() % n_pred], k.objects[rng() % n_obj]};
    std::size_t n_ops = rng() % 4;
    for (std::size_t i = 0; i < n_ops; ++i) {
        std::size_t pre = rng() % n_pred;
        std::size_t eff = (pre + 1 + rng() % (n_pred - 1)) % n_pred;
        for (const std::string& obj : k.objects) {
            std::string id = "op" + std::to_string(i);
            if (k.objects.size() > 1) id += ":" + obj;
            k.operators.push_back(kb::Operator{id, kb::Symbol{k.predicates[pre], obj},
                                               kb::Symbol{k.predicates[eff], obj}});
        }
    }
    return k;
}

kb::GroundingTable random_table(const kb::KnowledgeBase& k, Rng& rng) {
    kb::GroundingTable t;
    for (const kb::Symbol& s : k.ground_symbols()) {
        double lo = uniform_in(rng, -5.0, 5.0);
        t.entries.push_back({s, static_cast<int>(rng() % 3), lo,
                             lo + uniform_in(rng, 1e-3, 2.0)});
    }
    return t;
}

}  // namespace

TEST_CASE("parse(serialize(x)) is the identity") {
    Rng rng = make_rng(42);
    for (int iter = 0; iter < 50; ++iter) {
        kb::KnowledgeBase k = random_kb(rng);
        CHECK(kb::parse_domain(kb::serialize(k)) == k);
        kb::GroundingTable t = random_table(k, rng);
        CHECK(kb::parse_grounding(kb::serialize(t)) == t);
    }
}
