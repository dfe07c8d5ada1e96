#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "scylla/error.hpp"
#include "scylla/metrics.hpp"
#include "support.hpp"

using namespace scylla;

namespace {

std::string example(const std::string& name) {
  std::ifstream in(support::data("examples/" + name + ".txt"));
  std::string line;
  std::getline(in, line);
  return line;
}

using Tokens = std::vector<std::string>;

}  // namespace

TEST_CASE("evaluation tokenizer") {
  auto gold = tokenize_for_eval(example("gold"));
  CHECK(gold.size() == 15);
  CHECK(gold.front() == "the");
  CHECK(gold.back() == "strike");
  CHECK(tokenize_for_eval("The lay-up, finally!") == Tokens{"the", "lay-up", ",", "finally"});
  CHECK(tokenize_for_eval("it's done...") == Tokens{"it's", "done"});
  CHECK(tokenize_for_eval("  ").empty());
}

TEST_CASE("TER of the worked outputs against the reference") {
  const std::string gold = example("gold");
  auto base = ter(example("baseline"), gold);
  CHECK(base.breakdown == EditBreakdown{0, 1, 3, 0, 15});
  CHECK(format_truncated(100 * base.score) == "26.66");
  auto s = ter(example("scylla_s"), gold);
  CHECK(s.breakdown.edits() == 8);
  CHECK(format_truncated(100 * s.score) == "53.33");
  auto t = ter(example("scylla_t"), gold);
  CHECK(t.breakdown.edits() == 3);
  CHECK(format_truncated(100 * t.score) == "20.00");
  CHECK(t.score < base.score);
}

TEST_CASE("TER basics") {
  CHECK(ter("The winger scored.", "the winger scored").score == 0.0);
  CHECK(ter("a b c", "a b c d").breakdown == EditBreakdown{1, 0, 0, 0, 4});
  CHECK(ter("a b c d e", "a b c").breakdown == EditBreakdown{0, 2, 0, 0, 3});
  CHECK_THROWS_AS(ter("a", ""), EvalError);
  CHECK(ter("", "a b").score == 1.0);
}

TEST_CASE("a block shift counts as one edit") {
  auto r = ter_tokens({"b", "c", "a"}, {"a", "b", "c"});
  CHECK(r.breakdown.shifts == 1);
  CHECK(r.breakdown.edits() == 1);
  TerOptions no_shift;
  no_shift.shifts = false;
  auto plain = ter_tokens({"b", "c", "a"}, {"a", "b", "c"}, no_shift);
  CHECK(plain.breakdown.edits() == 2);
  auto far = ter_tokens({"x", "y", "z", "w", "a", "b", "c"}, {"a", "b", "c", "x", "y", "z", "w"});
  CHECK(far.breakdown.shifts >= 1);
  CHECK(far.breakdown.edits() < edit_distance({"x", "y", "z", "w", "a", "b", "c"}, {"a", "b", "c", "x", "y", "z", "w"}));
}

TEST_CASE("TER never exceeds the unshifted distance and stays consistent") {
  std::mt19937 rng(5);
  const Tokens vocab{"a", "b", "c", "d", "e"};
  TerOptions no_shift;
  no_shift.shifts = false;
  for (int i = 0; i < 500; ++i) {
    Tokens h(rng() % 9), r(1 + rng() % 9);
    for (auto& w : h) w = vocab[rng() % vocab.size()];
    for (auto& w : r) w = vocab[rng() % vocab.size()];
    auto with = ter_tokens(h, r);
    auto without = ter_tokens(h, r, no_shift);
    CHECK(with.breakdown.edits() <= edit_distance(h, r));
    CHECK(without.breakdown.edits() == edit_distance(h, r));
    CHECK(without.breakdown.shifts == 0);
    CHECK(with.score >= 0.0);
    CHECK(with.score == doctest::Approx(static_cast<double>(with.breakdown.edits()) / static_cast<double>(r.size())));
    // Token counts balance: hyp - del + ins == ref.
    CHECK(static_cast<int>(h.size()) - with.breakdown.deletions + with.breakdown.insertions ==
          static_cast<int>(r.size()));
  }
}

TEST_CASE("HTER is the mean over post-edits") {
  const std::string hyp = "a b c d e f g h i j";
  CHECK(hter(hyp, {"a b c d e f g h i x"}) == doctest::Approx(0.1));
  CHECK(hter(hyp, {"a b c d e f g h i x", "a b c d e f g h y x"}) == doctest::Approx(0.15));
  CHECK(hter(example("scylla_t"), {example("scylla_t")}) == 0.0);
  CHECK_THROWS_AS(hter(hyp, {}), EvalError);
}

TEST_CASE("BLEU") {
  CHECK(bleu({{"the player scored a lay-up in the final minute", {"the player scored a lay-up in the final minute"}}}) ==
        doctest::Approx(100.0));
  CHECK(bleu({{"w x y z", {"a b c d"}}}) == 0.0);
  const std::string hyp = "the player scored a fine lay-up in the last minute";
  const std::string ref = "the player made a fine lay-up in the final minute";
  // Matches 8/10, 5/9, 3/8, 2/7; equal lengths.
  const double hand = 100.0 * std::pow(0.8 * (5.0 / 9) * (3.0 / 8) * (2.0 / 7), 0.25);
  CHECK(hand == doctest::Approx(46.71379777282).epsilon(1e-10));
  CHECK(bleu({{hyp, {ref}}}) == doctest::Approx(hand).epsilon(1e-12));
  CHECK(sentence_bleu(hyp, {ref}) ==
        doctest::Approx(100.0 * std::pow(0.8 * (6.0 / 10) * (4.0 / 9) * (3.0 / 8), 0.25)).epsilon(1e-12));
  // Brevity penalty.
  CHECK(sentence_bleu("the player made a fine", {ref}) == doctest::Approx(100.0 * std::exp(-1.0)).epsilon(1e-12));
  // Closest reference length wins.
  CHECK(bleu({{hyp, {ref, "the player"}}}) == doctest::Approx(hand).epsilon(1e-12));
  CHECK_THROWS_AS(bleu({}), EvalError);
}

TEST_CASE("BLEU drops when a matching word is replaced by an unseen one") {
  std::mt19937 rng(8);
  const Tokens vocab{"a", "b", "c", "d", "e", "f"};
  for (int i = 0; i < 300; ++i) {
    Tokens r(4 + rng() % 8);
    for (auto& w : r) w = vocab[rng() % vocab.size()];
    Tokens h = r;
    for (auto& w : h) {
      if (rng() % 4 == 0) w = vocab[rng() % vocab.size()];
    }
    auto join = [](const Tokens& t) {
      std::string s;
      for (const auto& w : t) s += (s.empty() ? "" : " ") + w;
      return s;
    };
    Tokens worse = h;
    worse[rng() % worse.size()] = "zzz";
    CHECK(sentence_bleu(join(worse), {join(r)}) <= sentence_bleu(join(h), {join(r)}) + 1e-12);
    CHECK(bleu({{join(worse), {join(r)}}}) <= bleu({{join(h), {join(r)}}}) + 1e-12);
  }
}

TEST_CASE("evaluation report") {
  auto rep = evaluate({example("baseline"), example("scylla_t")}, {{example("gold")}, {example("gold")}});
  REQUIRE(rep.per_sentence.size() == 2);
  CHECK(rep.per_sentence[0].id == "1");
  CHECK(rep.mean_ter == doctest::Approx((4.0 / 15 + 3.0 / 15) / 2));
  CHECK(rep.corpus_bleu > 0.0);
  CHECK_THROWS_AS(evaluate({"a"}, {}), EvalError);
  CHECK_THROWS_AS(evaluate({}, {}), EvalError);
}

TEST_CASE("truncated formatting") {
  CHECK(format_truncated(26.6666) == "26.66");
  CHECK(format_truncated(53.3333) == "53.33");
  CHECK(format_truncated(20.0) == "20.00");
  CHECK(format_truncated(100.0 * 3 / 15) == "20.00");
  CHECK(format_truncated(0.26666, 4) == "0.2666");
}
