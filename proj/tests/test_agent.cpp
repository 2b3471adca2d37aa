#include <gtest/gtest.h>

#include "socialsim/agent.hpp"
#include "socialsim/prompts.hpp"
#include "support.hpp"

using namespace socialsim;
using nlohmann::json;

namespace {

class FnBackend : public ChatBackend {
 public:
  explicit FnBackend(std::function<std::string(const ChatRequest&)> fn) : fn_(std::move(fn)) {}
  std::string complete(const ChatRequest& r) override {
    requests.push_back(r);
    return fn_(r);
  }
  std::string_view name() const override { return "fn"; }
  std::vector<ChatRequest> requests;

 private:
  std::function<std::string(const ChatRequest&)> fn_;
};

struct World {
  Platform platform;
  TfidfRetriever retriever{KnowledgeCorpus{}};
  SummaryCache summaries;
  EventLog log;

  AgentEnv env(ChatBackend& backend, ActionSettings settings = {}) {
    return AgentEnv{platform, backend, retriever, summaries, [this](Event e) { log.append(std::move(e)); }, settings};
  }

  AgentState agent(const std::string& handle, AccountKind kind = AccountKind::regular) {
    auto id = platform.create_account(handle, kind);
    return AgentState{id, handle, Persona(testing_support::mara()), 0.5, fallback_plan(0.5), {}, 0};
  }

  std::vector<Event> of_kind(std::string_view kind) const {
    std::vector<Event> out;
    for (const auto& e : log.events())
      if (e.kind == kind) out.push_back(e);
    return out;
  }
};

}  // namespace

TEST(Parsers, LikeAndReblog) {
  EXPECT_TRUE(parse_like("like").value);
  EXPECT_TRUE(parse_like("  LIKE ").value);
  EXPECT_TRUE(parse_like("\"like\"").value);
  EXPECT_FALSE(parse_like("like").anomaly);
  EXPECT_FALSE(parse_like("no operation").value);
  EXPECT_FALSE(parse_like("No Operation").anomaly);
  auto odd = parse_like("I would like this");
  EXPECT_FALSE(odd.value);
  EXPECT_TRUE(odd.anomaly);
  EXPECT_TRUE(parse_reblog("forward").value);
  EXPECT_FALSE(parse_reblog("like").value);
}

TEST(Parsers, Comment) {
  EXPECT_FALSE(parse_comment("no comment").value);
  EXPECT_FALSE(parse_comment("No comment.").value);
  EXPECT_EQ(parse_comment("Comment content: Great hive!").value, "Great hive!");
  auto bare = parse_comment("Great hive!");
  EXPECT_EQ(bare.value, "Great hive!");
  EXPECT_TRUE(bare.anomaly);
  auto empty = parse_comment("Comment content:   ");
  EXPECT_FALSE(empty.value);
  EXPECT_TRUE(empty.anomaly);
}

TEST(Parsers, Topics) {
  auto t = parse_topics("Here:\n1. #Bees in winter\n2) **Ski wax**\n3: one two three four five six seven eight nine ten "
                        "eleven twelve thirteen fourteen fifteen sixteen\nnot numbered\n4. extra",
                        3);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], "Bees in winter");
  EXPECT_EQ(t[1], "Ski wax");
  EXPECT_EQ(text::word_count(t[2]), 15u);
}

TEST(Parsers, Reflection) {
  auto registered = [](AccountId id) { return id.value <= 5; };
  EXPECT_FALSE(parse_reflection("Do not follow.", registered).follow);
  EXPECT_EQ(parse_reflection("I will follow user_3", registered).follow, AccountId{3});
  EXPECT_EQ(parse_reflection("USER_9 or user_2", registered).follow, AccountId{2});
  auto bad = parse_reflection("follow everybody", registered);
  EXPECT_FALSE(bad.follow);
  EXPECT_TRUE(bad.anomaly);
}

TEST(Dedup, ChooseAttempt) {
  EXPECT_EQ(choose_attempt({0.3}, 0.8).index, 0u);
  auto second = choose_attempt({0.9, 0.5}, 0.8);
  EXPECT_EQ(second.index, 1u);
  EXPECT_FALSE(second.best_of_retries);
  auto best = choose_attempt({0.95, 0.85, 0.85}, 0.8);
  EXPECT_EQ(best.index, 1u);
  EXPECT_TRUE(best.best_of_retries);
  EXPECT_EQ(choose_attempt({0.8}, 0.8).index, 0u);
  EXPECT_FALSE(choose_attempt({0.8}, 0.8).best_of_retries);
  EXPECT_EQ(max_similarity("anything", {}), 0.0);
}

TEST(Summary, CachedAndFallsBack) {
  SummaryCache cache;
  int calls = 0;
  FnBackend b([&](const ChatRequest& r) {
    ++calls;
    EXPECT_EQ(r.seed_key, "post_7:summary");
    return std::string("short summary");
  });
  EXPECT_EQ(summarize_post(PostId{7}, "long body", b, cache), "short summary");
  EXPECT_EQ(summarize_post(PostId{7}, "long body", b, cache), "short summary");
  EXPECT_EQ(calls, 1);

  FnBackend failing([](const ChatRequest&) -> std::string { throw BackendError(500, "down"); });
  std::string body;
  for (int i = 0; i < 60; ++i) body += "w" + std::to_string(i) + " ";
  auto s = summarize_post(PostId{8}, body, failing, cache);
  EXPECT_EQ(text::word_count(s), 50u);
}

TEST(Compose, RegeneratesOverlongDraftOnce) {
  auto view = full_view(testing_support::mara());
  FnBackend b([](const ChatRequest& r) {
    return r.seed_key.ends_with(":regen") ? std::string(700, 'y') : std::string(600, 'x');
  });
  auto post = compose_post("bees", view, {}, b, "a:1:post:0:0");
  ASSERT_EQ(b.requests.size(), 2u);
  EXPECT_EQ(b.requests[1].seed_key, "a:1:post:0:0:regen");
  EXPECT_EQ(post, std::string(500, 'y'));
  EXPECT_NE(b.requests[0].prompt.find(prompts::kPostPersona), std::string::npos);
  EXPECT_EQ(b.requests[0].prompt.find(prompts::kPostKnowledge), std::string::npos);

  FnBackend k([](const ChatRequest&) { return std::string("fine"); });
  compose_post("bees", view, {{0, "Hive", "Bees are busy."}}, k, "a:1:post:0:0");
  EXPECT_NE(k.requests[0].prompt.find("Title: Hive\nText: Bees are busy."), std::string::npos);
}

TEST(Publish, NearDuplicateIsRegenerated) {
  auto dedup = testing_support::load_json("dedup.json");
  World w;
  auto agent = w.agent("reg_001");
  agent.memory.own_posts.push_back(dedup["prior"]);
  FnBackend b([&](const ChatRequest& r) {
    return r.seed_key.ends_with(":0") ? dedup["near_duplicate"].get<std::string>() : dedup["fresh"].get<std::string>();
  });
  auto env = w.env(b);
  auto id = publish_on_topic(agent, env, "spring inspection", 5, "stage1");
  EXPECT_EQ(w.platform.post(id).body, dedup["fresh"]);
  auto posts = w.of_kind("post");
  ASSERT_EQ(posts.size(), 1u);
  const auto& p = posts[0].payload;
  EXPECT_EQ(p["regenerations"], 1);
  EXPECT_NEAR(p["max_similarities"][0].get<double>(), dedup["near_similarity"].get<double>(), 1e-12);
  EXPECT_FALSE(p["best_of_retries"].get<bool>());
  EXPECT_EQ(agent.posts_made, 1u);
  EXPECT_EQ(agent.memory.own_posts.size(), 2u);
}

TEST(Publish, PersistentDuplicateIsFlagged) {
  auto dedup = testing_support::load_json("dedup.json");
  World w;
  auto agent = w.agent("reg_001");
  agent.memory.own_posts.push_back(dedup["prior"]);
  FnBackend b([&](const ChatRequest&) { return dedup["near_duplicate"].get<std::string>(); });
  auto env = w.env(b);
  publish_on_topic(agent, env, "spring inspection", 5, "stage1");
  const auto p = w.of_kind("post").at(0).payload;
  EXPECT_EQ(p["attempts"], kGenerationAttempts);
  EXPECT_TRUE(p["best_of_retries"].get<bool>());
  EXPECT_EQ(p["chosen_attempt"], 0);
}

TEST(Browse, QuotasCapAppliedActions) {
  World w;
  auto author = w.platform.create_account("init_001", AccountKind::initial);
  for (int i = 0; i < 12; ++i) w.platform.publish_post(author, "post number " + std::to_string(i), 0);
  auto agent = w.agent("reg_001");
  agent.plan = fallback_plan(1.0);  // likes 2, reblogs 1, comments 1
  FnBackend yes([](const ChatRequest& r) -> std::string {
    switch (r.tag) {
      case PromptTag::like: return "like";
      case PromptTag::reblog: return "forward";
      case PromptTag::comment: return "Comment content: nice";
      default: return "summary";
    }
  });
  auto env = w.env(yes);
  auto records = browse_session(agent, env, {}, 3);
  EXPECT_EQ(records.size(), 10u);
  EXPECT_EQ(w.of_kind("browse").size(), 10u);
  int likes = 0, reblogs = 0, comments = 0, suppressed = 0;
  for (const auto& e : w.log.events()) {
    if (e.suppressed) {
      ++suppressed;
      continue;
    }
    likes += e.kind == "like";
    reblogs += e.kind == "reblog";
    comments += e.kind == "comment";
  }
  EXPECT_EQ(likes, 2);
  EXPECT_EQ(reblogs, 1);
  EXPECT_EQ(comments, 1);
  EXPECT_EQ(suppressed, 26);
  for (const auto& r : records) EXPECT_TRUE(r.liked);
  EXPECT_EQ(agent.memory.records.size(), 10u);
}

TEST(Browse, BadCompletionsDegradeToNoAction) {
  World w;
  auto author = w.platform.create_account("init_001", AccountKind::initial);
  w.platform.publish_post(author, "hello", 0);
  auto agent = w.agent("reg_001");
  FnBackend odd([](const ChatRequest& r) -> std::string {
    if (r.tag == PromptTag::like) throw BackendError(500, "down");
    return "maybe?";
  });
  auto env = w.env(odd);
  auto records = browse_session(agent, env, {}, 3);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_FALSE(records[0].liked);
  EXPECT_FALSE(records[0].reblogged);
  EXPECT_GE(w.of_kind("anomaly").size(), 2u);
  EXPECT_EQ(w.platform.post(PostId{1}).like_count, 0u);
}

TEST(Reflect, FollowsOnceAndAdvancesWindow) {
  World w;
  auto author = w.platform.create_account("init_001", AccountKind::initial);
  auto pid = w.platform.publish_post(author, "bees in winter", 0);
  auto agent = w.agent("reg_001");
  agent.memory.records.push_back(ActionRecord{3, pid, "bees in winter", author, true, true, std::string("nice")});
  FnBackend b([&](const ChatRequest& r) -> std::string {
    if (r.tag == PromptTag::summary) return "bees";
    EXPECT_EQ(r.seed_key, "reg_001:48:reflect");
    EXPECT_NE(r.prompt.find("user_1"), std::string::npos);
    return "user_1";
  });
  auto env = w.env(b);
  auto d = reflect_follow(agent, env, 48);
  EXPECT_EQ(d.follow, author);
  EXPECT_EQ(w.of_kind("follow").size(), 1u);
  EXPECT_EQ(agent.memory.reflected_upto, 1u);

  // Empty window: no model call, still a reflect event.
  auto calls = b.requests.size();
  reflect_follow(agent, env, 96);
  EXPECT_EQ(b.requests.size(), calls);
  EXPECT_EQ(w.of_kind("reflect").size(), 2u);
}

TEST(Reflect, SelfSelectionIsAnAnomaly) {
  World w;
  auto agent = w.agent("reg_001");
  auto pid = w.platform.publish_post(agent.id, "own post", 0);
  agent.memory.records.push_back(ActionRecord{3, pid, "own post", agent.id, true, false, std::nullopt});
  FnBackend b([](const ChatRequest& r) -> std::string { return r.tag == PromptTag::summary ? "s" : "user_1"; });
  auto env = w.env(b);
  auto d = reflect_follow(agent, env, 48);
  EXPECT_FALSE(d.follow);
  EXPECT_TRUE(d.anomaly);
  EXPECT_TRUE(w.of_kind("follow").empty());
}

TEST(Memory, ReplayFromTrace) {
  World w;
  auto author = w.platform.create_account("init_001", AccountKind::initial);
  for (int i = 0; i < 3; ++i) w.platform.publish_post(author, "post " + std::to_string(i), 0);
  auto agent = w.agent("reg_001");
  agent.plan = fallback_plan(1.0);
  FnBackend b([](const ChatRequest& r) -> std::string {
    if (r.tag == PromptTag::like) return "like";
    if (r.tag == PromptTag::comment) return "Comment content: hi";
    return "no operation";
  });
  auto env = w.env(b);
  auto records = browse_session(agent, env, {}, 4);
  auto replayed = replay_memory(w.log, w.platform);
  ASSERT_TRUE(replayed.count("reg_001"));
  EXPECT_EQ(replayed["reg_001"], records);
}

TEST(Describe, ActionText) {
  ActionRecord r;
  EXPECT_EQ(describe_action(r), "no operation");
  r.liked = true;
  r.comment = "x";
  EXPECT_EQ(describe_action(r), "like, comment");
}
