#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sumbench/highlighting.hpp"

using namespace sumbench;

namespace {

const Document& two_sentences() {
  // Sentence spans: [0,17) "Alpha beta gamma." and [18,37) "Delta epsilon zeta."
  static const Document doc = analyze("Alpha beta gamma. Delta epsilon zeta.", "two");
  return doc;
}

HighlightSet with_pending(const Document& doc) {
  HighlightSet set{doc.id(), {}, {}};
  std::vector<PendingSuggestion> items;
  for (const auto& s : doc.sentences()) items.push_back({"s" + std::to_string(s.index), s.span, 0.5});
  return install_suggestions(set, items);
}

std::vector<std::pair<std::size_t, std::size_t>> as_pairs(const HighlightSet& set) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& h : set.active) out.emplace_back(h.span.start, h.span.end);
  return out;
}

}  // namespace

TEST(AddUserSpan, IntoEmptySet) {
  const auto& doc = fixtures::news_article();
  auto set = add_user_span({}, {5, 12}, doc);
  ASSERT_EQ(set.active.size(), 1u);
  EXPECT_EQ(set.active[0], (Highlight{{5, 12}, HighlightOrigin::user}));
}

TEST(AddUserSpan, OverlappingSpansMerge) {
  const auto& doc = fixtures::news_article();
  auto set = add_user_span(add_user_span({}, {5, 12}, doc), {10, 20}, doc);
  EXPECT_EQ(as_pairs(set), (std::vector<std::pair<std::size_t, std::size_t>>{{5, 20}}));
}

TEST(AddUserSpan, TouchingSpansMerge) {
  const auto& doc = fixtures::news_article();
  auto set = add_user_span(add_user_span({}, {5, 12}, doc), {12, 14}, doc);
  EXPECT_EQ(as_pairs(set), (std::vector<std::pair<std::size_t, std::size_t>>{{5, 14}}));
}

TEST(AddUserSpan, CoveringAPendingSuggestionAbsorbsIt) {
  const auto& doc = two_sentences();
  ASSERT_EQ(doc.sentences()[1].span, (Span{18, 37}));
  auto set = with_pending(doc);
  ASSERT_EQ(set.pending.size(), 2u);
  set = add_user_span(set, {10, 37}, doc);
  ASSERT_EQ(set.pending.size(), 0u);
  EXPECT_EQ(set.active, (std::vector<Highlight>{{{10, 37}, HighlightOrigin::user}}));
}

TEST(AddUserSpan, PartialOverlapAlsoAbsorbsSuggestion) {
  const auto& doc = two_sentences();
  auto set = add_user_span(with_pending(doc), {20, 25}, doc);
  ASSERT_EQ(set.pending.size(), 1u);
  EXPECT_EQ(set.pending[0].id, "s0");
  EXPECT_TRUE(is_normalized(set));
}

TEST(AddUserSpan, Errors) {
  const auto& doc = two_sentences();
  try {
    add_user_span({}, {30, 40}, doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_range);
  }
  try {
    add_user_span({}, {5, 5}, doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::validation);
  }
}

TEST(EraseSpan, Examples) {
  HighlightSet set{"d", {{{5, 20}, HighlightOrigin::user}}, {}};
  EXPECT_TRUE(erase_span(set, {0, 100}).active.empty());
  EXPECT_EQ(as_pairs(erase_span(set, {8, 10})),
            (std::vector<std::pair<std::size_t, std::size_t>>{{5, 8}, {10, 20}}));
  EXPECT_EQ(erase_span(set, {30, 40}), set);
}

TEST(EraseSpan, KeepsPendingAndOrigin) {
  const auto& doc = two_sentences();
  auto set = accept_suggestion(with_pending(doc), "s0");
  set = erase_span(set, {0, 6}, doc);
  EXPECT_EQ(set.active, (std::vector<Highlight>{{{6, 17}, HighlightOrigin::accepted_suggestion}}));
  EXPECT_EQ(set.pending.size(), 1u);
  EXPECT_THROW(erase_span(set, {0, 99}, doc), Error);
}

TEST(AcceptSuggestion, LoneSuggestion) {
  const auto& doc = two_sentences();
  auto set = accept_suggestion(with_pending(doc), "s1");
  EXPECT_EQ(set.active, (std::vector<Highlight>{{{18, 37}, HighlightOrigin::accepted_suggestion}}));
  EXPECT_EQ(set.pending.size(), 1u);
}

TEST(AcceptSuggestion, AdjacentUserHighlightMerges) {
  const auto& doc = two_sentences();
  auto set = with_pending(doc);
  set.pending.erase(set.pending.begin());  // keep only s1 [18,37)
  set = add_user_span(set, {12, 18}, doc);
  set = accept_suggestion(set, "s1");
  EXPECT_EQ(set.active, (std::vector<Highlight>{{{12, 37}, HighlightOrigin::user}}));
}

TEST(AcceptSuggestion, SecondAcceptIsNotFound) {
  const auto& doc = two_sentences();
  auto set = accept_suggestion(with_pending(doc), "s0");
  try {
    accept_suggestion(set, "s0");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_found);
  }
}

TEST(RejectSuggestion, Examples) {
  const auto& doc = fixtures::news_article();
  HighlightSet one{doc.id(), {}, {{"s0", doc.sentences()[0].span, 1.0}}};
  EXPECT_TRUE(reject_suggestion(one, "s0").pending.empty());

  HighlightSet three{doc.id(), {}, {}};
  for (std::size_t i : {0u, 3u, 7u}) three.pending.push_back({"s" + std::to_string(i), doc.sentences()[i].span, 0.1});
  auto after = reject_suggestion(three, "s3");
  ASSERT_EQ(after.pending.size(), 2u);
  EXPECT_EQ(after.pending[0].id, "s0");
  EXPECT_EQ(after.pending[1].id, "s7");
  EXPECT_TRUE(after.active.empty());

  try {
    reject_suggestion(three, "nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_found);
  }
}

TEST(Markup, Examples) {
  auto doc = analyze("A B. C D.", "m");
  HighlightSet set{"m", {{{5, 9}, HighlightOrigin::user}}, {}};
  EXPECT_EQ(to_markup(doc, set), "A B. <extra_id_1>C D.<extra_id_2>");
  EXPECT_EQ(to_markup(doc, HighlightSet{}), doc.text());

  HighlightSet two{"m", {{{0, 1}, HighlightOrigin::user}, {{5, 6}, HighlightOrigin::user}}, {}};
  EXPECT_EQ(to_markup(doc, two), "<extra_id_1>A<extra_id_2> B. <extra_id_1>C<extra_id_2> D.");
}

TEST(Markup, PendingNotSerialized) {
  const auto& doc = two_sentences();
  EXPECT_EQ(to_markup(doc, with_pending(doc)), doc.text());
}

TEST(Markup, Parse) {
  auto parsed = from_markup("x <extra_id_1>y<extra_id_2>");
  EXPECT_EQ(parsed.text, "x y");
  EXPECT_EQ(parsed.spans, (std::vector<Span>{{2, 3}}));
}

TEST(Markup, ParseErrors) {
  try {
    from_markup("<extra_id_2>y");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 0u);
    EXPECT_EQ(e.code(), ErrorCode::parse);
  }
  EXPECT_THROW(from_markup("<extra_id_1>a<extra_id_1>b<extra_id_2>"), ParseError);
  EXPECT_THROW(from_markup("a <extra_id_1>b"), ParseError);
  EXPECT_THROW(from_markup("a <extra_id_1><extra_id_2>"), ParseError);
}

TEST(Markup, UnicodeOffsets) {
  auto doc = analyze("Über café. Naïve.", "u");
  HighlightSet set{"u", {{{5, 9}, HighlightOrigin::user}}, {}};
  auto marked = to_markup(doc, set);
  EXPECT_EQ(marked, "Über <extra_id_1>café<extra_id_2>. Naïve.");
  auto parsed = from_markup(marked);
  EXPECT_EQ(parsed.spans, set.active_spans());
  EXPECT_EQ(parsed.text, doc.text());
}

TEST(HighlightProperty, CoverageMatchesPerCharacterOracle) {
  const auto& doc = fixtures::news_article();
  std::mt19937 rng(11);
  std::uniform_int_distribution<std::size_t> pos(0, doc.length() - 1);
  std::uniform_int_distribution<std::size_t> len(1, 80);
  std::bernoulli_distribution erase(0.35);
  for (int trial = 0; trial < 200; ++trial) {
    HighlightSet set{doc.id(), {}, {}};
    oracle::CoverageModel model(doc.length());
    for (int op = 0; op < 25; ++op) {
      std::size_t s = pos(rng);
      std::size_t e = std::min(doc.length(), s + len(rng));
      if (erase(rng)) {
        set = erase_span(set, {s, e}, doc);
        model.erase(s, e);
      } else {
        set = add_user_span(set, {s, e}, doc);
        model.add(s, e);
      }
      ASSERT_TRUE(is_normalized(set));
      ASSERT_EQ(as_pairs(set), model.runs());
    }
  }
}

TEST(HighlightProperty, NormalizeIsIdempotent) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<std::size_t> pos(0, 500);
  std::uniform_int_distribution<std::size_t> len(0, 40);
  std::bernoulli_distribution user(0.5);
  for (int trial = 0; trial < 300; ++trial) {
    HighlightSet set;
    for (int i = 0; i < 12; ++i) {
      std::size_t s = pos(rng);
      set.active.push_back({{s, s + len(rng)},
                            user(rng) ? HighlightOrigin::user : HighlightOrigin::accepted_suggestion});
    }
    for (int i = 0; i < 4; ++i) {
      std::size_t s = pos(rng);
      set.pending.push_back({"p" + std::to_string(i), {s, s + 30}, 0.5});
    }
    auto once = normalize(set);
    EXPECT_TRUE(is_normalized(once));
    EXPECT_EQ(normalize(once), once);
  }
}

TEST(HighlightProperty, MergedOriginIsUserIfAnyConstituentIs) {
  auto merged = merge_highlights({{{0, 5}, HighlightOrigin::accepted_suggestion},
                                  {{5, 9}, HighlightOrigin::user},
                                  {{20, 30}, HighlightOrigin::accepted_suggestion}});
  EXPECT_EQ(merged, (std::vector<Highlight>{{{0, 9}, HighlightOrigin::user},
                                            {{20, 30}, HighlightOrigin::accepted_suggestion}}));
}

TEST(HighlightProperty, MarkupRoundTripAndBalance) {
  const auto& doc = fixtures::news_article();
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> count(0, 15);
  for (int trial = 0; trial < 300; ++trial) {
    auto set = fixtures::random_highlights(doc, rng, count(rng));
    std::string marked = to_markup(doc, set);
    auto parsed = from_markup(marked);
    ASSERT_EQ(parsed.text, doc.text());
    ASSERT_EQ(parsed.spans, set.active_spans());

    // Markers alternate begin/end.
    std::size_t pos = 0;
    bool expect_begin = true;
    std::size_t pairs = 0;
    while (true) {
      auto b = marked.find("<extra_id_", pos);
      if (b == std::string::npos) break;
      std::string_view marker(marked.data() + b, 12);
      ASSERT_EQ(marker, expect_begin ? kHighlightBegin : kHighlightEnd);
      if (!expect_begin) ++pairs;
      expect_begin = !expect_begin;
      pos = b + 12;
    }
    ASSERT_TRUE(expect_begin);
    ASSERT_EQ(pairs, set.active.size());
  }
}
