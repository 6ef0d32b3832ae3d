#include "dnet/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

#include "dnet/rng.h"

namespace dnet {
namespace {

// Splits one comma-separated record. Quoted fields may contain commas and
// use "" for a literal quote.
bool split_record(std::string_view line, std::vector<std::string>& fields) {
  fields.clear();
  std::size_t pos = 0;
  for (;;) {
    std::string field;
    if (pos < line.size() && line[pos] == '"') {
      ++pos;
      for (;;) {
        if (pos >= line.size()) return false;  // unterminated quote
        if (line[pos] == '"') {
          if (pos + 1 < line.size() && line[pos + 1] == '"') {
            field.push_back('"');
            pos += 2;
            continue;
          }
          ++pos;
          break;
        }
        field.push_back(line[pos++]);
      }
      if (pos < line.size() && line[pos] != ',') return false;
    } else {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      field.assign(line.substr(pos, end - pos));
      pos = end;
    }
    fields.push_back(std::move(field));
    if (pos >= line.size()) return true;
    ++pos;  // skip ','
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

ItemVocabulary ItemVocabulary::numbered(std::size_t n) {
  ItemVocabulary vocab;
  for (std::size_t i = 0; i < n; ++i) {
    vocab.add(Item{static_cast<std::int64_t>(i), "item " + std::to_string(i),
                   ""});
  }
  return vocab;
}

ItemIndex ItemVocabulary::add(Item item) {
  const auto index = static_cast<ItemIndex>(items_.size());
  if (!index_.emplace(item.id, index).second) {
    throw VocabularyError("duplicate item id " + std::to_string(item.id));
  }
  items_.push_back(std::move(item));
  return index;
}

std::optional<ItemIndex> ItemVocabulary::find(std::int64_t id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ItemIndex ItemVocabulary::index_of(std::int64_t id) const {
  if (auto index = find(id)) return *index;
  throw VocabularyError("unknown item id " + std::to_string(id));
}

CaseMatrix::CaseMatrix(std::size_t n_items,
                       std::vector<std::vector<ItemIndex>> cases)
    : n_items_(n_items) {
  cases_.reserve(cases.size());
  for (auto& c : cases) add_case(std::move(c));
}

void CaseMatrix::add_case(std::vector<ItemIndex> items) {
  std::sort(items.begin(), items.end());
  if (std::adjacent_find(items.begin(), items.end()) != items.end()) {
    throw DataError("case " + std::to_string(cases_.size()) +
                    " lists an item twice");
  }
  if (!items.empty() && items.back() >= n_items_) {
    throw DataError("item index " + std::to_string(items.back()) +
                    " out of range for " + std::to_string(n_items_) +
                    " items");
  }
  cases_.push_back(std::move(items));
}

bool CaseMatrix::contains(std::size_t c, ItemIndex item) const {
  return std::binary_search(cases_[c].begin(), cases_[c].end(), item);
}

std::size_t CaseMatrix::total_preferences() const {
  std::size_t total = 0;
  for (const auto& c : cases_) total += c.size();
  return total;
}

double CaseMatrix::mean_items() const {
  if (cases_.empty()) return 0.0;
  return static_cast<double>(total_preferences()) /
         static_cast<double>(cases_.size());
}

UciDataset parse_uci_web(std::istream& in) {
  UciDataset out;
  std::vector<std::vector<std::int64_t>> raw_votes;
  std::vector<std::size_t> case_lines;
  std::vector<std::string> fields;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty()) continue;
    if (!split_record(line, fields)) {
      throw ParseError(line_no, "unterminated quoted field");
    }
    const std::string& tag = fields[0];
    if (tag == "A") {
      std::int64_t id = 0;
      if (fields.size() != 5 || !parse_int(fields[1], id)) {
        throw ParseError(line_no, "malformed attribute record");
      }
      try {
        out.vocabulary.add(Item{id, fields[3], fields[4]});
      } catch (const VocabularyError& e) {
        throw ParseError(line_no, e.what());
      }
    } else if (tag == "C") {
      std::int64_t id = 0;
      if (fields.size() != 3 || !parse_int(fields[2], id)) {
        throw ParseError(line_no, "malformed case record");
      }
      out.case_ids.push_back(id);
      raw_votes.emplace_back();
      case_lines.push_back(line_no);
    } else if (tag == "V") {
      std::int64_t id = 0;
      if (fields.size() != 3 || !parse_int(fields[1], id)) {
        throw ParseError(line_no, "malformed vote record");
      }
      if (raw_votes.empty()) {
        throw FormatError(line_no, "vote record before any case record");
      }
      raw_votes.back().push_back(id);
    } else if (tag == "I" || tag == "T" || tag == "N" || tag == "D") {
      continue;
    } else {
      throw ParseError(line_no, "unknown record tag '" + tag + "'");
    }
  }

  out.cases = CaseMatrix(out.vocabulary.size());
  for (std::size_t c = 0; c < raw_votes.size(); ++c) {
    std::vector<ItemIndex> items;
    items.reserve(raw_votes[c].size());
    for (std::int64_t id : raw_votes[c]) {
      const auto index = out.vocabulary.find(id);
      if (!index) {
        throw VocabularyError("case starting at line " +
                              std::to_string(case_lines[c]) +
                              " references undeclared attribute " +
                              std::to_string(id));
      }
      items.push_back(*index);
    }
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    out.cases.add_case(std::move(items));
  }
  return out;
}

void write_uci_web(std::ostream& out, const ItemVocabulary& vocabulary,
                   const CaseMatrix& cases,
                   std::span<const std::int64_t> case_ids) {
  if (!case_ids.empty() && case_ids.size() != cases.size()) {
    throw DataError("case id count does not match case count");
  }
  for (const Item& item : vocabulary.items()) {
    out << "A," << item.id << ",1," << quote(item.title) << ','
        << quote(item.url) << '\n';
  }
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const std::int64_t id =
        case_ids.empty() ? static_cast<std::int64_t>(c + 1) : case_ids[c];
    out << "C,\"" << id << "\"," << id << '\n';
    for (ItemIndex i : cases[c]) out << "V," << vocabulary[i].id << ",1\n";
  }
}

CaseMatrix parse_sparse_pairs(std::istream& in, std::size_t n_items) {
  std::map<std::int64_t, std::size_t> slot_of;
  std::vector<std::vector<ItemIndex>> cases;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto comma = body.find(',');
    std::int64_t case_id = 0;
    ItemIndex item = 0;
    if (comma == std::string_view::npos ||
        !parse_int(body.substr(0, comma), case_id) ||
        !parse_int(body.substr(comma + 1), item)) {
      throw ParseError(line_no, "expected 'case_id,item_index'");
    }
    if (item >= n_items) {
      throw ParseError(line_no, "item index " + std::to_string(item) +
                                    " out of range for " +
                                    std::to_string(n_items) + " items");
    }
    const auto [it, inserted] = slot_of.emplace(case_id, cases.size());
    if (inserted) cases.emplace_back();
    cases[it->second].push_back(item);
  }
  for (auto& c : cases) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return CaseMatrix(n_items, std::move(cases));
}

std::pair<CaseMatrix, CaseMatrix> split_train_test(const CaseMatrix& m,
                                                   double test_fraction,
                                                   std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must lie in (0, 1)");
  }
  if (m.empty()) throw DataError("cannot split an empty case matrix");

  const std::size_t n = m.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  const auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(n)));
  std::vector<bool> in_test(n, false);
  for (std::size_t k = 0; k < n_test; ++k) in_test[order[k]] = true;

  CaseMatrix train(m.n_items()), test(m.n_items());
  for (std::size_t c = 0; c < n; ++c) {
    auto items = std::vector<ItemIndex>(m[c].begin(), m[c].end());
    (in_test[c] ? test : train).add_case(std::move(items));
  }
  return {std::move(train), std::move(test)};
}

Popularity popularity(const CaseMatrix& m) {
  if (m.empty()) throw DataError("popularity of an empty case matrix");
  std::vector<std::size_t> counts(m.n_items(), 0);
  for (const auto& c : m.cases()) {
    for (ItemIndex i : c) ++counts[i];
  }
  Popularity pop;
  pop.probs.resize(m.n_items());
  const double denom = static_cast<double>(m.size()) + 2.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    pop.probs[i] = (static_cast<double>(counts[i]) + 1.0) / denom;
  }
  return pop;
}

CaseMatrix reindex(const CaseMatrix& cases, const ItemVocabulary& from,
                   const ItemVocabulary& to) {
  CaseMatrix out(to.size());
  for (const auto& c : cases.cases()) {
    std::vector<ItemIndex> items;
    items.reserve(c.size());
    for (ItemIndex i : c) items.push_back(to.index_of(from[i].id));
    out.add_case(std::move(items));
  }
  return out;
}

DatasetFingerprint fingerprint(const CaseMatrix& m) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](std::uint64_t value) {
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (value >> (8 * byte)) & 0xff;
      hash *= 0x100000001b3ULL;
    }
  };
  mix(m.n_items());
  for (const auto& c : m.cases()) {
    mix(c.size());
    for (ItemIndex i : c) mix(i);
  }
  return {m.size(), m.n_items(), hash};
}

}  // namespace dnet
