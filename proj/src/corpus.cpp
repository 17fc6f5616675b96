#include "nbprior/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nbprior/error.hpp"
#include "nbprior/text.hpp"

namespace nbprior::corpus {

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::string_view kMetaHeader = "nbprior-corpus 1";

}  // namespace

TokenSet tokenize(std::string_view text) {
  TokenSet tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t end = i;
    while (end < text.size() && !is_space(text[end])) ++end;
    std::size_t b = i, e = end;
    while (b < e && is_punct(text[b])) ++b;
    while (e > b && is_punct(text[e - 1])) --e;
    if (b < e) {
      std::string token(text.substr(b, e - b));
      for (char& c : token)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      tokens.push_back(std::move(token));
    }
    i = end;
  }
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

// --- Corpus ---------------------------------------------------------------

Corpus::Corpus(std::size_t shard_count) : shards_(shard_count) {
  if (shard_count == 0) throw Error("shard count must be positive");
}

std::size_t Corpus::shard_of(DocId id, std::size_t shard_count) {
  return static_cast<std::size_t>(splitmix64(id) % shard_count);
}

void Corpus::add(Document doc) {
  if (locations_.count(doc.id)) throw Error("duplicate document id " + std::to_string(doc.id));
  const auto s = shard_of(doc.id, shards_.size());
  locations_.emplace(doc.id, std::make_pair(s, shards_[s].size()));
  shards_[s].push_back(std::move(doc));
}

const Document* Corpus::find(DocId id) const {
  auto it = locations_.find(id);
  if (it == locations_.end()) return nullptr;
  return &shards_[it->second.first][it->second.second];
}

const Document& Corpus::at(DocId id) const {
  if (const Document* doc = find(id)) return *doc;
  throw Error("unknown document id " + std::to_string(id));
}

std::vector<DocId> Corpus::ids() const {
  std::vector<DocId> out;
  out.reserve(locations_.size());
  for (const auto& [id, loc] : locations_) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

bool operator==(const Corpus& a, const Corpus& b) {
  if (a.shard_count() != b.shard_count() || a.doc_count() != b.doc_count()) return false;
  for (const auto& shard : a.shards_)
    for (const auto& doc : shard) {
      const Document* other = b.find(doc.id);
      if (!other || !(*other == doc)) return false;
    }
  return true;
}

// --- CategoryIndex ----------------------------------------------------------

void CategoryIndex::add(const std::string& category, DocId id) {
  auto& ids = members_[category];
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) ids.insert(it, id);
}

bool CategoryIndex::contains(std::string_view category) const {
  return members_.find(category) != members_.end();
}

const std::vector<DocId>& CategoryIndex::members(std::string_view category) const {
  auto it = members_.find(category);
  if (it == members_.end()) throw Error("unknown category '" + std::string(category) + "'");
  return it->second;
}

std::vector<std::string> CategoryIndex::names() const {
  std::vector<std::string> out;
  for (const auto& [name, ids] : members_) out.push_back(name);
  return out;
}

void CategoryIndex::validate(const Corpus& corpus) const {
  for (const auto& [name, ids] : members_)
    for (DocId id : ids)
      if (!corpus.contains(id))
        throw Error("category '" + name + "' references unknown document " + std::to_string(id));
}

// --- storage ----------------------------------------------------------------

std::string shard_file_name(std::size_t shard) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "shard-%05zu.tsv", shard);
  return buf;
}

void store_corpus(const Corpus& corpus, const CategoryIndex& categories,
                  const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path shard_dir = dir / "shards";
  const fs::path cat_dir = dir / "categories";
  fs::create_directories(dir);
  fs::remove_all(shard_dir);
  fs::remove_all(cat_dir);
  fs::create_directories(shard_dir);
  fs::create_directories(cat_dir);

  {
    std::ofstream meta(dir / "corpus.meta", std::ios::binary | std::ios::trunc);
    meta << kMetaHeader << "\nshards " << corpus.shard_count() << "\ndocuments "
         << corpus.doc_count() << "\n";
    if (!meta) throw Error("cannot write " + (dir / "corpus.meta").string());
  }

  for (std::size_t s = 0; s < corpus.shard_count(); ++s) {
    std::vector<const Document*> docs;
    for (const auto& doc : corpus.shard(s)) docs.push_back(&doc);
    std::sort(docs.begin(), docs.end(),
              [](const Document* a, const Document* b) { return a->id < b->id; });
    const fs::path path = shard_dir / shard_file_name(s);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (const Document* doc : docs) {
      if (doc->title.find_first_of("\t\n\r") != std::string::npos)
        throw Error("title of document " + std::to_string(doc->id) +
                    " contains a tab or newline");
      out << doc->id << '\t' << doc->title << '\t';
      for (std::size_t i = 0; i < doc->tokens.size(); ++i) {
        if (i) out << ' ';
        out << doc->tokens[i];
      }
      out << '\n';
    }
    if (!out) throw Error("cannot write " + path.string());
  }

  for (const auto& name : categories.names()) {
    const fs::path path = cat_dir / (percent_encode(name) + ".txt");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (DocId id : categories.members(name)) out << id << '\n';
    if (!out) throw Error("cannot write " + path.string());
  }
}

std::pair<Corpus, CategoryIndex> load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path meta_path = dir / "corpus.meta";
  std::ifstream meta(meta_path, std::ios::binary);
  if (!meta) throw LoadError("missing corpus metadata", meta_path.string());

  std::string header, key;
  std::size_t shard_count = 0, doc_count = 0;
  std::getline(meta, header);
  if (header != kMetaHeader) throw LoadError("unrecognised metadata header", meta_path.string());
  if (!(meta >> key >> shard_count) || key != "shards" || shard_count == 0)
    throw LoadError("bad shard count", meta_path.string());
  if (!(meta >> key >> doc_count) || key != "documents")
    throw LoadError("bad document count", meta_path.string());

  Corpus corpus(shard_count);
  for (std::size_t s = 0; s < shard_count; ++s) {
    const std::string name = shard_file_name(s);
    const fs::path path = dir / "shards" / name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("missing shard", name);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto where = " on line " + std::to_string(line_no);
      const auto fields = split(line, '\t');
      if (fields.size() != 3) throw LoadError("expected 3 tab-separated fields" + where, name);
      Document doc;
      try {
        doc.id = parse_uint(fields[0]);
      } catch (const Error&) {
        throw LoadError("bad document id" + where, name);
      }
      if (Corpus::shard_of(doc.id, shard_count) != s)
        throw LoadError("document " + std::to_string(doc.id) + " stored in the wrong shard", name);
      doc.title = std::string(fields[1]);
      if (!fields[2].empty())
        for (auto token : split(fields[2], ' ')) {
          if (token.empty()) throw LoadError("empty token" + where, name);
          doc.tokens.emplace_back(token);
        }
      if (!std::is_sorted(doc.tokens.begin(), doc.tokens.end()) ||
          std::adjacent_find(doc.tokens.begin(), doc.tokens.end()) != doc.tokens.end())
        throw LoadError("tokens not sorted and unique" + where, name);
      try {
        corpus.add(std::move(doc));
      } catch (const Error& e) {
        throw LoadError(e.what(), name);
      }
    }
  }
  if (corpus.doc_count() != doc_count)
    throw LoadError("expected " + std::to_string(doc_count) + " documents, found " +
                        std::to_string(corpus.doc_count()),
                    meta_path.string());

  CategoryIndex categories;
  const fs::path cat_dir = dir / "categories";
  if (fs::exists(cat_dir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(cat_dir))
      if (entry.path().extension() == ".txt") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      const std::string file = path.filename().string();
      const std::string category = percent_decode(path.stem().string());
      std::ifstream in(path, std::ios::binary);
      std::string line;
      DocId previous = 0;
      bool first = true;
      while (std::getline(in, line)) {
        DocId id = 0;
        try {
          id = parse_uint(line);
        } catch (const Error&) {
          throw LoadError("bad member id '" + line + "'", file);
        }
        if (!first && id <= previous) throw LoadError("member ids not ascending", file);
        if (!corpus.contains(id))
          throw LoadError("member " + std::to_string(id) + " not in corpus", file);
        categories.add(category, id);
        previous = id;
        first = false;
      }
    }
  }
  return {std::move(corpus), std::move(categories)};
}

}  // namespace nbprior::corpus
