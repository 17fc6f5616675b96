#include <expat.h>

#include <algorithm>
#include <array>
#include <istream>
#include <memory>

#include "nbprior/corpus.hpp"
#include "nbprior/error.hpp"
#include "nbprior/text.hpp"

namespace nbprior::corpus {

namespace {

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool iequals_prefix(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (text.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (ascii_lower(text[pos + i]) != prefix[i]) return false;
  return true;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string normalize_category(std::string_view raw) {
  std::string name;
  for (char c : trim(raw)) {
    if (c == '_') c = ' ';
    if (c == ' ' && !name.empty() && name.back() == ' ') continue;
    name += c;
  }
  while (!name.empty() && name.back() == ' ') name.pop_back();
  if (!name.empty() && name[0] >= 'a' && name[0] <= 'z') name[0] = static_cast<char>(name[0] - 'a' + 'A');
  return name;
}

struct CategoryLink {
  std::size_t begin;
  std::size_t end;  // one past the closing "]]"
  std::string name;
};

// Finds [[Category:Name]] and [[Category:Name|sort key]] links.
std::vector<CategoryLink> find_category_links(std::string_view text) {
  std::vector<CategoryLink> links;
  std::size_t pos = 0;
  while ((pos = text.find("[[", pos)) != std::string_view::npos) {
    std::size_t p = pos + 2;
    while (p < text.size() && text[p] == ' ') ++p;
    if (!iequals_prefix(text, p, "category")) {
      pos += 2;
      continue;
    }
    p += 8;
    while (p < text.size() && text[p] == ' ') ++p;
    if (p >= text.size() || text[p] != ':') {
      pos += 2;
      continue;
    }
    const auto close = text.find("]]", p);
    if (close == std::string_view::npos) break;
    std::string_view inner = text.substr(p + 1, close - p - 1);
    if (inner.find('[') != std::string_view::npos || inner.find('\n') != std::string_view::npos) {
      pos += 2;
      continue;
    }
    inner = inner.substr(0, inner.find('|'));
    std::string name = normalize_category(inner);
    if (!name.empty()) links.push_back({pos, close + 2, std::move(name)});
    pos = close + 2;
  }
  return links;
}

// Offset of the first line that is a heading titled "References", or npos.
std::size_t find_references_heading(std::string_view text) {
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    auto line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = trim(text.substr(line_start, line_end - line_start));
    if (line.size() >= 2 && line.front() == '=' && line.back() == '=') {
      const auto b = line.find_first_not_of('=');
      const auto e = line.find_last_not_of('=');
      if (b != std::string_view::npos && b <= e) {
        std::string title(trim(line.substr(b, e - b + 1)));
        std::transform(title.begin(), title.end(), title.begin(), ascii_lower);
        if (title == "references") return line_start;
      }
    }
    line_start = line_end + 1;
  }
  return std::string_view::npos;
}

bool is_redirect_text(std::string_view text) {
  const auto t = trim(text);
  return iequals_prefix(t, 0, "#redirect");
}

bool is_disambiguation(std::string_view title, std::string_view text) {
  if (title.find("(disambiguation)") != std::string_view::npos) return true;
  static constexpr std::array<std::string_view, 6> kTemplates = {
      "{{disambiguation", "{{disambig", "{{dab}}", "{{dab|", "{{hndis", "{{geodis"};
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), ascii_lower);
  return std::any_of(kTemplates.begin(), kTemplates.end(),
                     [&](std::string_view t) { return lower.find(t) != std::string::npos; });
}

struct RawPage {
  std::string title;
  std::string ns;
  std::string id;
  std::string text;
  bool redirect = false;
};

enum class Field { none, title, ns, id, text };

struct ParseState {
  std::vector<std::string> stack;
  std::vector<RawPage> completed;
  RawPage current;
  bool in_page = false;
  bool have_page_id = false;
  Field field = Field::none;
};

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char**) {
  auto& st = *static_cast<ParseState*>(user);
  const std::string_view element(name);
  const std::string_view parent = st.stack.empty() ? std::string_view{} : st.stack.back();
  if (element == "page") {
    st.in_page = true;
    st.have_page_id = false;
    st.current = RawPage{};
  } else if (st.in_page) {
    if (element == "title" && parent == "page") {
      st.field = Field::title;
    } else if (element == "ns" && parent == "page") {
      st.field = Field::ns;
    } else if (element == "id" && parent == "page" && !st.have_page_id) {
      st.field = Field::id;
    } else if (element == "redirect" && parent == "page") {
      st.current.redirect = true;
    } else if (element == "text" && parent == "revision") {
      st.current.text.clear();
      st.field = Field::text;
    }
  }
  st.stack.emplace_back(element);
}

void XMLCALL on_end(void* user, const XML_Char* name) {
  auto& st = *static_cast<ParseState*>(user);
  const std::string_view element(name);
  if (st.field == Field::id) st.have_page_id = true;
  st.field = Field::none;
  if (element == "page" && st.in_page) {
    st.completed.push_back(std::move(st.current));
    st.in_page = false;
  }
  if (!st.stack.empty()) st.stack.pop_back();
}

void XMLCALL on_chars(void* user, const XML_Char* s, int len) {
  auto& st = *static_cast<ParseState*>(user);
  switch (st.field) {
    case Field::title: st.current.title.append(s, len); break;
    case Field::ns: st.current.ns.append(s, len); break;
    case Field::id: st.current.id.append(s, len); break;
    case Field::text: st.current.text.append(s, len); break;
    case Field::none: break;
  }
}

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

}  // namespace

ArticleText split_article(std::string_view wikitext) {
  ArticleText out;
  for (auto& link : find_category_links(wikitext)) out.categories.push_back(link.name);
  std::sort(out.categories.begin(), out.categories.end());
  out.categories.erase(std::unique(out.categories.begin(), out.categories.end()),
                       out.categories.end());

  const auto cut = find_references_heading(wikitext);
  const std::string_view kept = cut == std::string_view::npos ? wikitext : wikitext.substr(0, cut);
  std::size_t from = 0;
  for (const auto& link : find_category_links(kept)) {
    out.body.append(kept.substr(from, link.begin - from));
    from = link.end;
  }
  out.body.append(kept.substr(from));
  return out;
}

IngestResult ingest_wiki_dump(std::istream& in, const IngestOptions& options) {
  IngestResult result{Corpus(options.shard_count), CategoryIndex{}, IngestStats{}};
  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreate("UTF-8"));
  if (!parser) throw Error("cannot create XML parser");
  ParseState state;
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_chars);

  auto process = [&](long long offset) {
    for (auto& page : state.completed) {
      ++result.stats.pages;
      if (trim(page.ns) != "0") {
        ++result.stats.skipped_namespace;
        continue;
      }
      if (page.redirect || is_redirect_text(page.text)) {
        ++result.stats.skipped_redirect;
        continue;
      }
      if (is_disambiguation(page.title, page.text)) {
        ++result.stats.skipped_disambiguation;
        continue;
      }
      ArticleText article = split_article(page.text);
      if (article.body.size() < options.min_bytes) {
        ++result.stats.skipped_short;
        continue;
      }
      Document doc;
      try {
        doc.id = parse_uint(trim(page.id));
      } catch (const Error&) {
        throw IngestError("page '" + page.title + "' has a bad id", offset);
      }
      doc.title = std::string(trim(page.title));
      doc.tokens = tokenize(article.body);
      const DocId id = doc.id;
      try {
        result.corpus.add(std::move(doc));
      } catch (const Error& e) {
        throw IngestError(e.what(), offset);
      }
      for (const auto& category : article.categories) result.categories.add(category, id);
      ++result.stats.kept;
    }
    state.completed.clear();
  };

  std::vector<char> buffer(1 << 20);
  while (true) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const auto got = static_cast<int>(in.gcount());
    const bool final = got == 0 || in.eof();
    if (XML_Parse(parser.get(), buffer.data(), got, final) == XML_STATUS_ERROR) {
      throw IngestError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser.get())),
                        static_cast<long long>(XML_GetCurrentByteIndex(parser.get())));
    }
    process(static_cast<long long>(XML_GetCurrentByteIndex(parser.get())));
    if (final) break;
  }
  return result;
}

}  // namespace nbprior::corpus
