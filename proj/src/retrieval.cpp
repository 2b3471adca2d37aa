#include "socialsim/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "socialsim/error.hpp"
#include "socialsim/text.hpp"

namespace socialsim {

using nlohmann::json;

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TermVector term_counts(std::string_view text) {
  TermVector counts;
  for (auto& tok : tokenize(text)) counts[tok] += 1.0;
  return counts;
}

double smoothed_idf(std::size_t n_docs, std::size_t doc_freq) {
  return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(doc_freq))) + 1.0;
}

namespace {

double norm(const TermVector& v) {
  double sum = 0.0;
  for (const auto& [term, w] : v) sum += w * w;
  return std::sqrt(sum);
}

}  // namespace

double cosine(const TermVector& a, const TermVector& b) {
  if (a.empty() || b.empty()) return 0.0;
  double dot = 0.0;
  for (const auto& [term, w] : a) {
    auto it = b.find(term);
    if (it != b.end()) dot += w * it->second;
  }
  double denom = norm(a) * norm(b);
  if (denom == 0.0) return 0.0;
  return std::clamp(dot / denom, 0.0, 1.0);
}

double pairwise_similarity(std::string_view a, std::string_view b) {
  TermVector ta = term_counts(a);
  TermVector tb = term_counts(b);
  if (ta.empty() || tb.empty()) return 0.0;
  auto weigh = [](TermVector& self, const TermVector& other) {
    for (auto& [term, w] : self) {
      std::size_t df = 1 + (other.count(term) ? 1 : 0);
      w *= smoothed_idf(2, df);
    }
  };
  TermVector wa = ta, wb = tb;
  weigh(wa, tb);
  weigh(wb, ta);
  return cosine(wa, wb);
}

TfidfRetriever::TfidfRetriever(KnowledgeCorpus corpus) : corpus_(std::move(corpus)) {
  std::vector<TermVector> counts;
  counts.reserve(corpus_.size());
  std::map<std::string, std::size_t, std::less<>> doc_freq;
  for (const auto& entry : corpus_) {
    counts.push_back(term_counts(entry.indexed_text()));
    for (const auto& [term, c] : counts.back()) ++doc_freq[term];
  }

  idf_.reserve(doc_freq.size());
  for (const auto& [term, df] : doc_freq) {
    term_ids_.emplace(term, idf_.size());
    idf_.push_back(smoothed_idf(corpus_.size(), df));
  }
  postings_.resize(idf_.size());

  for (std::uint32_t d = 0; d < counts.size(); ++d) {
    double sum = 0.0;
    for (const auto& [term, c] : counts[d]) {
      double w = c * idf_[term_ids_.find(term)->second];
      sum += w * w;
    }
    double n = std::sqrt(sum);
    if (n == 0.0) continue;
    for (const auto& [term, c] : counts[d]) {
      std::size_t id = term_ids_.find(term)->second;
      postings_[id].push_back({d, c * idf_[id] / n});
    }
  }
}

std::vector<double> TfidfRetriever::score_all(std::string_view text) const {
  std::vector<double> scores(corpus_.size(), 0.0);
  TermVector q = term_counts(text);
  if (q.empty() || corpus_.empty()) return scores;

  // Terms outside the corpus vocabulary carry no weight.
  double qsum = 0.0;
  for (auto& [term, c] : q) {
    auto it = term_ids_.find(term);
    c = it == term_ids_.end() ? 0.0 : c * idf_[it->second];
    qsum += c * c;
  }
  if (qsum == 0.0) return scores;
  double qnorm = std::sqrt(qsum);
  for (const auto& [term, w] : q) {
    auto it = term_ids_.find(term);
    if (it == term_ids_.end()) continue;
    for (const auto& p : postings_[it->second]) scores[p.doc] += w * p.weight;
  }
  for (auto& s : scores) s = std::clamp(s / qnorm, 0.0, 1.0);
  return scores;
}

std::vector<KnowledgeHit> TfidfRetriever::query(std::string_view text, std::size_t k) const {
  std::vector<double> scores = score_all(text);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] > 0.0) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return corpus_[a].id < corpus_[b].id;
  });
  if (order.size() > k) order.resize(k);

  std::vector<KnowledgeHit> hits;
  hits.reserve(order.size());
  for (auto i : order) hits.push_back({corpus_[i], scores[i]});
  return hits;
}

std::vector<KnowledgeHit> topk(std::string_view query, const KnowledgeCorpus& corpus, std::size_t k) {
  if (corpus.empty()) return {};
  return TfidfRetriever(corpus).query(query, k);
}

KnowledgeCorpus ingest_knowledge(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open knowledge file {}", path.string()));

  KnowledgeCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto where = fmt::format("line {}", line_no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where, fmt::format("{}:{}: malformed JSON record: {}", path.string(), line_no, e.what()));
    }
    if (!record.is_object())
      throw ParseError(where, fmt::format("{}:{}: record is not an object", path.string(), line_no));
    KnowledgeEntry entry;
    entry.id = static_cast<std::uint32_t>(corpus.size());
    if (record.contains("title")) {
      if (!record["title"].is_string())
        throw ParseError(where, fmt::format("{}:{}: \"title\" must be a string", path.string(), line_no));
      entry.title = record["title"].get<std::string>();
    }
    if (!record.contains("text") || !record["text"].is_string() ||
        text::trim(record["text"].get<std::string>()).empty())
      throw ParseError(where, fmt::format("{}:{}: missing or empty \"text\"", path.string(), line_no));
    entry.text = record["text"].get<std::string>();
    corpus.push_back(std::move(entry));
  }
  return corpus;
}

void write_knowledge(const KnowledgeCorpus& corpus, const std::filesystem::path& path) {
  std::string out;
  for (const auto& e : corpus) {
    out += json{{"title", e.title}, {"text", e.text}}.dump();
    out += '\n';
  }
  text::write_file(path, out);
}

namespace {

void flatten_question(const json& q, KnowledgeCorpus& corpus, std::set<std::pair<std::string, std::string>>& seen) {
  if (!q.is_object() || !q.contains("context")) throw ParseError("context", "question without \"context\"");
  const json& ctx = q["context"];

  auto add = [&](const std::string& title, const json& sentences) {
    std::string body;
    for (const auto& s : sentences) body += s.get<std::string>();
    std::string passage(text::trim(body));
    if (passage.empty()) return;
    if (!seen.emplace(title, passage).second) return;
    corpus.push_back({static_cast<std::uint32_t>(corpus.size()), title, passage});
  };

  if (ctx.is_array()) {
    // [[title, [sentence, ...]], ...]
    for (const auto& para : ctx) {
      if (!para.is_array() || para.size() != 2 || !para[0].is_string() || !para[1].is_array())
        throw ParseError("context", "context paragraph must be [title, [sentences]]");
      add(para[0].get<std::string>(), para[1]);
    }
  } else if (ctx.is_object() && ctx.contains("title") && ctx.contains("sentences")) {
    // {"title": [...], "sentences": [[...], ...]}
    const auto& titles = ctx["title"];
    const auto& sents = ctx["sentences"];
    if (!titles.is_array() || !sents.is_array() || titles.size() != sents.size())
      throw ParseError("context", "context title/sentences arrays differ in length");
    for (std::size_t i = 0; i < titles.size(); ++i) add(titles[i].get<std::string>(), sents[i]);
  } else {
    throw ParseError("context", "unrecognized context layout");
  }
}

}  // namespace

KnowledgeCorpus convert_hotpotqa(const std::filesystem::path& path) {
  std::string raw = text::read_file(path);
  KnowledgeCorpus corpus;
  std::set<std::pair<std::string, std::string>> seen;

  std::string_view trimmed = text::trim(raw);
  if (trimmed.empty()) return corpus;
  if (trimmed.front() == '[') {
    json doc;
    try {
      doc = json::parse(trimmed);
    } catch (const json::parse_error& e) {
      throw ParseError("document", fmt::format("{}: malformed HotpotQA JSON: {}", path.string(), e.what()));
    }
    for (std::size_t i = 0; i < doc.size(); ++i) {
      try {
        flatten_question(doc[i], corpus, seen);
      } catch (const ParseError& e) {
        throw ParseError(fmt::format("record {}", i), fmt::format("{}: record {}: {}", path.string(), i, e.what()));
      } catch (const json::exception& e) {
        throw ParseError(fmt::format("record {}", i), fmt::format("{}: record {}: {}", path.string(), i, e.what()));
      }
    }
    return corpus;
  }

  std::istringstream lines(raw);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      flatten_question(json::parse(line), corpus, seen);
    } catch (const std::exception& e) {
      throw ParseError(fmt::format("line {}", line_no), fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return corpus;
}

}  // namespace socialsim
