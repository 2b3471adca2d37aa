#include "socialsim/platform.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "socialsim/error.hpp"
#include "socialsim/text.hpp"

namespace socialsim {

using nlohmann::json;

std::string to_string(AccountId id) { return fmt::format("user_{}", id.value); }

std::optional<AccountId> parse_account_id(std::string_view s) {
  constexpr std::string_view prefix = "user_";
  if (s.size() <= prefix.size() || s.substr(0, prefix.size()) != prefix) return std::nullopt;
  std::string_view digits = s.substr(prefix.size());
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || value == 0) return std::nullopt;
  return AccountId{value};
}

std::string_view to_string(AccountKind kind) { return kind == AccountKind::initial ? "initial" : "regular"; }

AccountKind parse_account_kind(std::string_view s) {
  if (s == "initial") return AccountKind::initial;
  if (s == "regular") return AccountKind::regular;
  throw ValidationError(fmt::format("unknown account kind \"{}\"", s));
}

std::string_view to_string(EngagementKind kind) {
  switch (kind) {
    case EngagementKind::like: return "like";
    case EngagementKind::reblog: return "reblog";
    case EngagementKind::comment: return "comment";
  }
  return "?";
}

double score_post(std::uint64_t likes, std::uint64_t reblogs, std::uint64_t comments, std::uint64_t followers) {
  double product = static_cast<double>(likes) * static_cast<double>(reblogs) * static_cast<double>(comments);
  return std::cbrt(product) / std::sqrt(static_cast<double>(std::max<std::uint64_t>(followers, 1)));
}

AccountId Platform::create_account(std::string handle, AccountKind kind) {
  if (text::trim(handle).empty()) throw ValidationError("account handle must be nonempty");
  if (handles_.count(handle)) throw ValidationError(fmt::format("handle \"{}\" is already registered", handle));
  AccountId id{static_cast<std::uint32_t>(accounts_.size() + 1)};
  handles_.emplace(handle, id);
  accounts_.push_back(Account{id, std::move(handle), kind, {}, {}});
  read_.emplace_back();
  return id;
}

PostId Platform::publish_post(AccountId author, std::string body, Turn turn) {
  account(author);
  if (text::trim(body).empty()) throw ValidationError("post body must be nonempty");
  std::size_t len = text::utf8_length(body);
  if (len > kMaxPostChars)
    throw ValidationError(fmt::format("post body has {} characters; the limit is {}", len, kMaxPostChars));
  PostId id{static_cast<std::uint32_t>(posts_.size() + 1)};
  posts_.push_back(Post{id, author, std::move(body), turn, std::nullopt, 0, 0, 0});
  return id;
}

EngageResult Platform::engage(AccountId account_id, PostId post_id, EngagementKind kind,
                              std::optional<std::string> body, Turn turn) {
  account(account_id);
  post(post_id);
  if (kind == EngagementKind::comment) {
    if (!body || text::trim(*body).empty()) throw ValidationError("comment requires a nonempty body");
  } else if (body) {
    throw ValidationError(fmt::format("{} does not take a body", to_string(kind)));
  }

  EngageResult result;
  switch (kind) {
    case EngagementKind::like:
      if (!likes_.emplace(account_id, post_id).second) return result;
      ++post_mut(post_id).like_count;
      break;
    case EngagementKind::reblog: {
      std::string copied = post(post_id).body;
      PostId id{static_cast<std::uint32_t>(posts_.size() + 1)};
      posts_.push_back(Post{id, account_id, std::move(copied), turn, post_id, 0, 0, 0});
      ++post_mut(post_id).reblog_count;
      result.reblog = id;
      break;
    }
    case EngagementKind::comment: {
      CommentId id{static_cast<std::uint32_t>(comments_.size() + 1)};
      comments_.push_back(Comment{id, post_id, account_id, std::move(*body), turn});
      ++post_mut(post_id).comment_count;
      result.comment = id;
      break;
    }
  }
  result.applied = true;
  return result;
}

bool Platform::follow(AccountId follower, AccountId followee) {
  account(follower);
  account(followee);
  if (follower == followee) throw ValidationError(fmt::format("{} cannot follow itself", to_string(follower)));
  if (!account_mut(follower).following.insert(followee).second) return false;
  account_mut(followee).followers.insert(follower);
  return true;
}

double Platform::score(const Post& p) const {
  return score_post(p.like_count, p.reblog_count, p.comment_count, follower_count(p.author));
}

std::vector<PostId> Platform::recommend(AccountId viewer, const Visibility& visible, std::size_t n, Turn) {
  account(viewer);
  auto& ledger = read_[viewer.value - 1];

  struct Candidate {
    double score;
    const Post* post;
  };
  std::vector<Candidate> candidates;
  for (const auto& p : posts_) {
    if (p.author == viewer || ledger.count(p.id)) continue;
    if (visible && !visible(account(p.author))) continue;
    candidates.push_back({score(p), &p});
  }
  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.post->created_turn != b.post->created_turn) return a.post->created_turn > b.post->created_turn;
    return a.post->id < b.post->id;
  };
  std::size_t take = std::min(n, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(), better);

  std::vector<PostId> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back(candidates[i].post->id);
    ledger.insert(candidates[i].post->id);
  }
  return out;
}

std::vector<PostId> Platform::live_feed(std::size_t n) const {
  std::vector<const Post*> all;
  all.reserve(posts_.size());
  for (const auto& p : posts_) all.push_back(&p);
  std::size_t take = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                    [](const Post* a, const Post* b) {
                      if (a->created_turn != b->created_turn) return a->created_turn > b->created_turn;
                      return a->id > b->id;
                    });
  std::vector<PostId> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back(all[i]->id);
  return out;
}

const Account& Platform::account(AccountId id) const {
  if (!has_account(id)) throw LookupError(fmt::format("unknown account {}", to_string(id)));
  return accounts_[id.value - 1];
}

const Post& Platform::post(PostId id) const {
  if (!has_post(id)) throw LookupError(fmt::format("unknown post {}", id.value));
  return posts_[id.value - 1];
}

Account& Platform::account_mut(AccountId id) { return const_cast<Account&>(account(id)); }
Post& Platform::post_mut(PostId id) { return const_cast<Post&>(post(id)); }

std::optional<AccountId> Platform::find_handle(std::string_view handle) const {
  auto it = handles_.find(handle);
  if (it == handles_.end()) return std::nullopt;
  return it->second;
}

bool Platform::has_account(AccountId id) const { return id.value >= 1 && id.value <= accounts_.size(); }
bool Platform::has_post(PostId id) const { return id.value >= 1 && id.value <= posts_.size(); }

bool Platform::has_liked(AccountId account_id, PostId post_id) const {
  return likes_.count({account_id, post_id}) > 0;
}

const std::set<PostId>& Platform::read_ledger(AccountId viewer) const {
  account(viewer);
  return read_[viewer.value - 1];
}

json Platform::to_json() const {
  json accounts = json::array();
  for (const auto& a : accounts_) {
    json followers = json::array(), following = json::array();
    for (auto f : a.followers) followers.push_back(f.value);
    for (auto f : a.following) following.push_back(f.value);
    accounts.push_back({{"id", a.id.value},
                        {"handle", a.handle},
                        {"kind", to_string(a.kind)},
                        {"followers", followers},
                        {"following", following}});
  }
  json posts = json::array();
  for (const auto& p : posts_) {
    posts.push_back({{"id", p.id.value},
                     {"author", p.author.value},
                     {"body", p.body},
                     {"created_turn", p.created_turn},
                     {"reblog_of", p.reblog_of ? json(p.reblog_of->value) : json(nullptr)},
                     {"like_count", p.like_count},
                     {"reblog_count", p.reblog_count},
                     {"comment_count", p.comment_count}});
  }
  json comments = json::array();
  for (const auto& c : comments_) {
    comments.push_back({{"id", c.id.value},
                        {"post", c.post.value},
                        {"author", c.author.value},
                        {"body", c.body},
                        {"created_turn", c.created_turn}});
  }
  json follows = json::array();
  for (const auto& a : accounts_)
    for (auto f : a.following) follows.push_back({a.id.value, f.value});
  json likes = json::array();
  for (const auto& [acct, post_id] : likes_) likes.push_back({acct.value, post_id.value});
  json read = json::object();
  for (std::size_t i = 0; i < read_.size(); ++i) {
    if (read_[i].empty()) continue;
    json ids = json::array();
    for (auto p : read_[i]) ids.push_back(p.value);
    read[to_string(AccountId{static_cast<std::uint32_t>(i + 1)})] = ids;
  }
  return {{"accounts", accounts}, {"posts", posts},  {"comments", comments},
          {"follows", follows},   {"likes", likes},  {"read", read}};
}

Platform Platform::from_json(const json& doc) {
  Platform p;
  try {
    for (const auto& a : doc.at("accounts")) {
      AccountId id = p.create_account(a.at("handle").get<std::string>(),
                                      parse_account_kind(a.at("kind").get<std::string>()));
      if (id.value != a.at("id").get<std::uint32_t>())
        throw ValidationError("snapshot account ids must be dense and ordered");
    }
    for (const auto& e : doc.at("follows")) p.follow(AccountId{e.at(0).get<std::uint32_t>()}, AccountId{e.at(1).get<std::uint32_t>()});
    for (const auto& j : doc.at("posts")) {
      Post post;
      post.id = PostId{j.at("id").get<std::uint32_t>()};
      if (post.id.value != p.posts_.size() + 1) throw ValidationError("snapshot post ids must be dense and ordered");
      post.author = AccountId{j.at("author").get<std::uint32_t>()};
      p.account(post.author);
      post.body = j.at("body").get<std::string>();
      post.created_turn = j.at("created_turn").get<Turn>();
      if (!j.at("reblog_of").is_null()) post.reblog_of = PostId{j.at("reblog_of").get<std::uint32_t>()};
      post.like_count = j.at("like_count").get<std::uint32_t>();
      post.reblog_count = j.at("reblog_count").get<std::uint32_t>();
      post.comment_count = j.at("comment_count").get<std::uint32_t>();
      p.posts_.push_back(std::move(post));
    }
    for (const auto& j : doc.at("comments")) {
      Comment c;
      c.id = CommentId{j.at("id").get<std::uint32_t>()};
      c.post = PostId{j.at("post").get<std::uint32_t>()};
      c.author = AccountId{j.at("author").get<std::uint32_t>()};
      c.body = j.at("body").get<std::string>();
      c.created_turn = j.at("created_turn").get<Turn>();
      p.post(c.post);
      p.comments_.push_back(std::move(c));
    }
    for (const auto& e : doc.at("likes"))
      p.likes_.emplace(AccountId{e.at(0).get<std::uint32_t>()}, PostId{e.at(1).get<std::uint32_t>()});
    for (const auto& [key, ids] : doc.at("read").items()) {
      auto id = parse_account_id(key);
      if (!id || !p.has_account(*id)) throw ValidationError(fmt::format("read ledger for unknown account {}", key));
      for (const auto& v : ids) p.read_[id->value - 1].insert(PostId{v.get<std::uint32_t>()});
    }
  } catch (const json::exception& e) {
    throw ParseError("snapshot", fmt::format("malformed platform snapshot: {}", e.what()));
  }
  return p;
}

}  // namespace socialsim
