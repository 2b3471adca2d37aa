#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace socialsim {

/// One retrievable passage of world knowledge.
struct KnowledgeEntry {
  std::uint32_t id = 0;
  std::string title;
  std::string text;

  /// Text that is indexed and gated: title and passage joined by a space.
  std::string indexed_text() const { return title.empty() ? text : title + " " + text; }
};

using KnowledgeCorpus = std::vector<KnowledgeEntry>;

/// Sparse term -> weight map. Zero weights are never stored.
using TermVector = std::map<std::string, double>;

/// Lowercases and splits on every run of non-alphanumeric ASCII characters.
/// Bytes outside ASCII act as separators.
std::vector<std::string> tokenize(std::string_view text);

/// Raw term counts of `text`.
TermVector term_counts(std::string_view text);

/// Smoothed inverse document frequency, ln((1 + N) / (1 + df)) + 1.
double smoothed_idf(std::size_t n_docs, std::size_t doc_freq);

double cosine(const TermVector& a, const TermVector& b);

/// TF-IDF cosine of two texts using the two of them as the whole corpus.
/// Returns 0 when either text has no tokens.
double pairwise_similarity(std::string_view a, std::string_view b);

struct KnowledgeHit {
  KnowledgeEntry entry;
  double score = 0.0;
};

/// Relevance ranker over a fixed corpus. Results are sorted by descending
/// score, ties by ascending entry id. Implementations must be deterministic
/// and safe to query concurrently.
class Retriever {
 public:
  virtual ~Retriever() = default;
  virtual std::vector<KnowledgeHit> query(std::string_view text, std::size_t k) const = 0;
};

/// Lexical TF-IDF index; idf is computed over the whole corpus.
class TfidfRetriever final : public Retriever {
 public:
  explicit TfidfRetriever(KnowledgeCorpus corpus);

  std::vector<KnowledgeHit> query(std::string_view text, std::size_t k) const override;

  /// Cosine of `text` against every entry, in corpus order.
  std::vector<double> score_all(std::string_view text) const;

  const KnowledgeCorpus& corpus() const noexcept { return corpus_; }

 private:
  struct Posting {
    std::uint32_t doc;
    double weight;  // already divided by the document norm
  };

  KnowledgeCorpus corpus_;
  std::map<std::string, std::size_t, std::less<>> term_ids_;
  std::vector<double> idf_;
  std::vector<std::vector<Posting>> postings_;
};

/// Ranks `corpus` against `query` with corpus-wide TF-IDF; at most k entries,
/// zero-similarity entries dropped.
std::vector<KnowledgeHit> topk(std::string_view query, const KnowledgeCorpus& corpus, std::size_t k);

/// Reads a knowledge file: JSON Lines of {"title": ..., "text": ...}.
/// Blank lines are skipped; ids follow file order starting at 0.
KnowledgeCorpus ingest_knowledge(const std::filesystem::path& path);

void write_knowledge(const KnowledgeCorpus& corpus, const std::filesystem::path& path);

/// Flattens a HotpotQA dump (a JSON array of questions, or JSON Lines of
/// question objects) into one entry per titled context paragraph. Paragraphs
/// repeated across questions are kept once, at first appearance.
KnowledgeCorpus convert_hotpotqa(const std::filesystem::path& path);

}  // namespace socialsim
