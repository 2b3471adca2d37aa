#include <gtest/gtest.h>

#include <cmath>

#include "socialsim/error.hpp"
#include "socialsim/events.hpp"
#include "socialsim/platform.hpp"
#include "support.hpp"

using namespace socialsim;

TEST(FeedScore, ClosedForm) {
  EXPECT_NEAR(score_post(8, 1, 1, 4), 1.0, 1e-9);
  EXPECT_EQ(score_post(0, 3, 3, 1), 0.0);
  EXPECT_EQ(score_post(3, 0, 3, 1), 0.0);
  EXPECT_EQ(score_post(3, 3, 0, 1), 0.0);
  EXPECT_NEAR(score_post(1, 1, 1, 0), 1.0, 1e-12);
  EXPECT_NEAR(score_post(27, 1, 1, 9), 1.0, 1e-12);
}

TEST(FeedScore, MatchesFrozenOracle) {
  auto cases = testing_support::load_json("feed_score_cases.json");
  ASSERT_EQ(cases.size(), 200u);
  for (const auto& c : cases) {
    auto n = c["counts"];
    EXPECT_NEAR(score_post(n[0], n[1], n[2], n[3]), c["score"].get<double>(), 1e-9) << n.dump();
  }
}

TEST(AccountIds, PrintAndParse) {
  EXPECT_EQ(to_string(AccountId{12}), "user_12");
  EXPECT_EQ(parse_account_id("user_7")->value, 7u);
  EXPECT_FALSE(parse_account_id("user_").has_value());
  EXPECT_FALSE(parse_account_id("usr_3").has_value());
  EXPECT_FALSE(parse_account_id("user_0").has_value());
}

class PlatformTest : public ::testing::Test {
 protected:
  Platform p;
  AccountId a = p.create_account("alice", AccountKind::initial);
  AccountId b = p.create_account("bob", AccountKind::regular);
  AccountId c = p.create_account("carol", AccountKind::regular);
};

TEST_F(PlatformTest, AccountsAreUniqueAndSequential) {
  EXPECT_EQ(a.value, 1u);
  EXPECT_EQ(c.value, 3u);
  EXPECT_THROW(p.create_account("alice", AccountKind::regular), ValidationError);
  EXPECT_EQ(p.find_handle("bob"), b);
  EXPECT_THROW(p.account(AccountId{99}), LookupError);
}

TEST_F(PlatformTest, PublishValidatesBody) {
  EXPECT_THROW(p.publish_post(a, "", 0), ValidationError);
  EXPECT_THROW(p.publish_post(a, "   ", 0), ValidationError);
  EXPECT_THROW(p.publish_post(a, std::string(501, 'x'), 0), ValidationError);
  auto id = p.publish_post(a, std::string(500, 'x'), 0);
  EXPECT_EQ(p.post(id).body.size(), 500u);
  EXPECT_THROW(p.publish_post(AccountId{42}, "x", 0), LookupError);
}

TEST_F(PlatformTest, LikesAreIdempotent) {
  auto id = p.publish_post(a, "hello", 0);
  EXPECT_TRUE(p.engage(b, id, EngagementKind::like, std::nullopt, 1).applied);
  EXPECT_FALSE(p.engage(b, id, EngagementKind::like, std::nullopt, 2).applied);
  EXPECT_EQ(p.post(id).like_count, 1u);
  EXPECT_TRUE(p.has_liked(b, id));
}

TEST_F(PlatformTest, ReblogCreatesLinkedPost) {
  auto id = p.publish_post(a, "hello", 0);
  auto r = p.engage(b, id, EngagementKind::reblog, std::nullopt, 3);
  ASSERT_TRUE(r.reblog);
  EXPECT_EQ(p.post(*r.reblog).reblog_of, id);
  EXPECT_EQ(p.post(*r.reblog).author, b);
  EXPECT_EQ(p.post(id).reblog_count, 1u);
  EXPECT_EQ(p.posts().size(), 2u);
}

TEST_F(PlatformTest, CommentRequiresBody) {
  auto id = p.publish_post(a, "hello", 0);
  EXPECT_THROW(p.engage(b, id, EngagementKind::comment, std::nullopt, 1), ValidationError);
  EXPECT_THROW(p.engage(b, id, EngagementKind::like, std::string("x"), 1), ValidationError);
  auto r = p.engage(b, id, EngagementKind::comment, std::string("nice"), 1);
  ASSERT_TRUE(r.comment);
  EXPECT_EQ(p.comments().at(0).body, "nice");
  EXPECT_EQ(p.post(id).comment_count, 1u);
}

TEST_F(PlatformTest, FollowOnceNoSelf) {
  EXPECT_TRUE(p.follow(b, a));
  EXPECT_FALSE(p.follow(b, a));
  EXPECT_THROW(p.follow(b, b), ValidationError);
  EXPECT_EQ(p.follower_count(a), 1u);
  EXPECT_TRUE(p.account(b).following.count(a));
}

TEST_F(PlatformTest, RecommendOrdersAndMarksRead) {
  auto p1 = p.publish_post(a, "one", 0);
  auto p2 = p.publish_post(a, "two", 1);
  auto p3 = p.publish_post(c, "three", 1);
  auto own = p.publish_post(b, "mine", 1);
  for (int i = 0; i < 8; ++i) p.engage(c, p1, EngagementKind::like, std::nullopt, 2), (void)i;
  p.engage(c, p1, EngagementKind::reblog, std::nullopt, 2);
  p.engage(c, p1, EngagementKind::comment, std::string("x"), 2);

  auto feed = p.recommend(b, {}, 3, 2);
  ASSERT_EQ(feed.size(), 3u);
  EXPECT_EQ(feed[0], p1);  // only nonzero score
  // Zero-score posts: newer first, then lower id. p2 and p3 share turn 1; the reblog is newer.
  EXPECT_EQ(p.post(feed[1]).created_turn, 2);
  EXPECT_EQ(feed[2], p2);
  for (auto id : feed) EXPECT_NE(id, own);

  auto next = p.recommend(b, {}, 10, 3);
  ASSERT_EQ(next.size(), 1u);
  EXPECT_EQ(next[0], p3);
  EXPECT_TRUE(p.recommend(b, {}, 10, 4).empty());
}

TEST_F(PlatformTest, RecommendHonoursVisibility) {
  p.publish_post(a, "from initial", 0);
  auto reg = p.publish_post(c, "from regular", 0);
  auto feed = p.recommend(b, [](const Account& acc) { return acc.kind == AccountKind::regular; }, 10, 1);
  ASSERT_EQ(feed.size(), 1u);
  EXPECT_EQ(feed[0], reg);
}

TEST_F(PlatformTest, LiveFeedNewestFirst) {
  auto p1 = p.publish_post(a, "one", 0);
  auto p2 = p.publish_post(a, "two", 5);
  auto p3 = p.publish_post(a, "three", 5);
  auto feed = p.live_feed(10);
  EXPECT_EQ(feed, (std::vector<PostId>{p3, p2, p1}));
  EXPECT_EQ(p.live_feed(1).size(), 1u);
}

TEST_F(PlatformTest, SnapshotRoundTrip) {
  auto id = p.publish_post(a, "hello", 0);
  p.engage(b, id, EngagementKind::like, std::nullopt, 1);
  p.engage(b, id, EngagementKind::comment, std::string("hi"), 1);
  p.engage(c, id, EngagementKind::reblog, std::nullopt, 1);
  p.follow(b, a);
  p.recommend(c, {}, 5, 2);
  auto doc = p.to_json();
  auto back = Platform::from_json(doc);
  EXPECT_EQ(back.to_json().dump(), doc.dump());
  EXPECT_TRUE(back.has_liked(b, id));
  EXPECT_EQ(back.read_ledger(c), p.read_ledger(c));
}

TEST(Events, JsonlRoundTrip) {
  EventLog log;
  log.append(Event{3, "reg_001", "like", "post_1", nlohmann::json{{"x", 1}}, true});
  log.append(Event{4, "reg_002", "post", "post_2", nlohmann::json::object(), false});
  auto text = log.to_jsonl();
  auto back = EventLog::from_jsonl(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.events()[0], log.events()[0]);
  EXPECT_EQ(back.to_jsonl(), text);
  EXPECT_THROW(EventLog::from_jsonl("{\"turn\": 1}\n"), ParseError);
}
