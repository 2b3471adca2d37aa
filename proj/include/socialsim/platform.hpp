#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace socialsim {

/// Simulation time in hours since the start of the run.
using Turn = std::int64_t;

template <class Tag>
struct Id {
  std::uint32_t value = 0;
  auto operator<=>(const Id&) const = default;
};

using AccountId = Id<struct AccountTag>;
using PostId = Id<struct PostTag>;
using CommentId = Id<struct CommentTag>;

/// Account ids print as "user_<n>"; this is the form agents see in prompts.
std::string to_string(AccountId id);
std::optional<AccountId> parse_account_id(std::string_view s);

enum class AccountKind { initial, regular };
std::string_view to_string(AccountKind kind);
AccountKind parse_account_kind(std::string_view s);

enum class EngagementKind { like, reblog, comment };
std::string_view to_string(EngagementKind kind);

inline constexpr std::size_t kMaxPostChars = 500;

struct Account {
  AccountId id;
  std::string handle;
  AccountKind kind = AccountKind::regular;
  std::set<AccountId> followers;
  std::set<AccountId> following;
};

struct Post {
  PostId id;
  AccountId author;
  std::string body;
  Turn created_turn = 0;
  std::optional<PostId> reblog_of;
  std::uint32_t like_count = 0;
  std::uint32_t reblog_count = 0;
  std::uint32_t comment_count = 0;
};

struct Comment {
  CommentId id;
  PostId post;
  AccountId author;
  std::string body;
  Turn created_turn = 0;
};

struct EngageResult {
  /// False only for a repeated like, which leaves the counter untouched.
  bool applied = false;
  std::optional<PostId> reblog;
  std::optional<CommentId> comment;
};

/// Feed ranking score: cbrt(likes * reblogs * comments) / sqrt(max(followers, 1)).
double score_post(std::uint64_t likes, std::uint64_t reblogs, std::uint64_t comments, std::uint64_t followers);

/// Headless social platform state. Mutations must be serialized by the
/// caller; const member functions may run concurrently between mutations.
class Platform {
 public:
  using Visibility = std::function<bool(const Account&)>;

  AccountId create_account(std::string handle, AccountKind kind);

  /// Throws ValidationError on an empty body or one longer than 500 characters.
  PostId publish_post(AccountId author, std::string body, Turn turn);

  /// Like / reblog / comment. `body` is required for comments and rejected otherwise.
  EngageResult engage(AccountId account, PostId post, EngagementKind kind,
                      std::optional<std::string> body, Turn turn);

  /// Adds the edge once. Returns false when it already existed.
  bool follow(AccountId follower, AccountId followee);

  /// Up to n unread posts from visible authors (never the viewer's own),
  /// best score first, then newer, then lower id. Marks them read.
  std::vector<PostId> recommend(AccountId viewer, const Visibility& visible, std::size_t n, Turn turn);

  /// Newest n posts: created_turn descending, id descending within a turn.
  std::vector<PostId> live_feed(std::size_t n) const;

  double score(const Post& post) const;

  const Account& account(AccountId id) const;
  const Post& post(PostId id) const;
  std::optional<AccountId> find_handle(std::string_view handle) const;
  bool has_account(AccountId id) const;
  bool has_post(PostId id) const;
  bool has_liked(AccountId account, PostId post) const;
  std::uint32_t follower_count(AccountId id) const { return static_cast<std::uint32_t>(account(id).followers.size()); }

  const std::vector<Account>& accounts() const noexcept { return accounts_; }
  const std::vector<Post>& posts() const noexcept { return posts_; }
  const std::vector<Comment>& comments() const noexcept { return comments_; }
  const std::set<PostId>& read_ledger(AccountId viewer) const;

  nlohmann::json to_json() const;
  static Platform from_json(const nlohmann::json& doc);

 private:
  Account& account_mut(AccountId id);
  Post& post_mut(PostId id);

  std::vector<Account> accounts_;  // index = id - 1
  std::vector<Post> posts_;        // index = id - 1
  std::vector<Comment> comments_;  // index = id - 1
  std::map<std::string, AccountId, std::less<>> handles_;
  std::set<std::pair<AccountId, PostId>> likes_;
  std::vector<std::set<PostId>> read_;  // index = account id - 1
};

}  // namespace socialsim
