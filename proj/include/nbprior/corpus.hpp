#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace nbprior {

using DocId = std::uint64_t;

/// Sorted, duplicate-free list of lowercase tokens.
using TokenSet = std::vector<std::string>;

namespace corpus {

/// Splits on whitespace, strips leading and trailing ASCII punctuation from
/// each piece, lowercases ASCII letters and drops pieces left empty. Interior
/// punctuation survives ("2.0", "don't"). Bytes >= 0x80 are kept verbatim.
TokenSet tokenize(std::string_view text);

struct Document {
  DocId id = 0;
  std::string title;
  TokenSet tokens;

  friend bool operator==(const Document&, const Document&) = default;
};

/// Documents partitioned into shards by a stable hash of their id.
class Corpus {
 public:
  static constexpr std::size_t kDefaultShards = 1000;

  explicit Corpus(std::size_t shard_count = 1);

  /// Throws nbprior::Error on a duplicate id.
  void add(Document doc);

  std::size_t shard_count() const noexcept { return shards_.size(); }
  std::size_t doc_count() const noexcept { return locations_.size(); }
  const std::vector<Document>& shard(std::size_t i) const { return shards_.at(i); }
  const std::vector<std::vector<Document>>& shards() const noexcept { return shards_; }

  const Document* find(DocId id) const;
  bool contains(DocId id) const { return locations_.count(id) != 0; }
  /// Throws when the id is absent.
  const Document& at(DocId id) const;

  /// All ids, ascending.
  std::vector<DocId> ids() const;

  static std::size_t shard_of(DocId id, std::size_t shard_count);

  /// Same shard count and same documents; insertion order is ignored.
  friend bool operator==(const Corpus& a, const Corpus& b);

 private:
  std::vector<std::vector<Document>> shards_;
  std::unordered_map<DocId, std::pair<std::size_t, std::size_t>> locations_;
};

/// Category name to the ids of its direct members.
class CategoryIndex {
 public:
  void add(const std::string& category, DocId id);

  bool contains(std::string_view category) const;
  /// Ascending ids; throws nbprior::Error for an unknown category.
  const std::vector<DocId>& members(std::string_view category) const;
  std::vector<std::string> names() const;
  std::size_t size() const noexcept { return members_.size(); }

  /// Throws nbprior::Error when a member id is not in the corpus.
  void validate(const Corpus& corpus) const;

  friend bool operator==(const CategoryIndex&, const CategoryIndex&) = default;

 private:
  std::map<std::string, std::vector<DocId>, std::less<>> members_;
};

struct IngestOptions {
  std::size_t min_bytes = 300;
  std::size_t shard_count = 1;
};

struct IngestStats {
  std::size_t pages = 0;
  std::size_t kept = 0;
  std::size_t skipped_namespace = 0;
  std::size_t skipped_redirect = 0;
  std::size_t skipped_disambiguation = 0;
  std::size_t skipped_short = 0;
};

struct IngestResult {
  Corpus corpus;
  CategoryIndex categories;
  IngestStats stats;
};

/// Reads a MediaWiki pages XML export. Only main-namespace article pages are
/// kept. Category links are collected from the full wikitext; the body is then
/// cut at the first "References" heading, category links are removed and the
/// remainder must be at least min_bytes long before it is tokenized.
///
/// Throws IngestError with the byte offset on malformed XML.
IngestResult ingest_wiki_dump(std::istream& in, const IngestOptions& options = {});

/// Exposed for testing: the body the ingester tokenizes, and the categories
/// it extracts, for one page of wikitext.
struct ArticleText {
  std::string body;
  std::vector<std::string> categories;
};
ArticleText split_article(std::string_view wikitext);

/// Layout:
///   <dir>/corpus.meta                 shard and document counts
///   <dir>/shards/shard-NNNNN.tsv      id \t title \t space-joined sorted tokens
///   <dir>/categories/<name>.txt       member ids, ascending, one per line
/// Category names are percent-encoded in file names.
void store_corpus(const Corpus& corpus, const CategoryIndex& categories,
                  const std::filesystem::path& dir);

/// Throws LoadError naming the shard (or category file) that is missing or
/// corrupt.
std::pair<Corpus, CategoryIndex> load_corpus(const std::filesystem::path& dir);

std::string shard_file_name(std::size_t shard);

}  // namespace corpus
}  // namespace nbprior
