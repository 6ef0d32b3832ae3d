#ifndef DNET_DATA_H_
#define DNET_DATA_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dnet {

using ItemIndex = std::uint32_t;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input line; line() is 1-based.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed lines in an invalid order (e.g. a vote before any case).
class FormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

class VocabularyError : public DataError {
 public:
  using DataError::DataError;
};

struct Item {
  std::int64_t id = 0;
  std::string title;
  std::string url;

  friend bool operator==(const Item&, const Item&) = default;
};

// Items in first-declaration order; dense index i <-> items()[i].
class ItemVocabulary {
 public:
  ItemVocabulary() = default;

  // Items 0..n-1 with external id equal to the dense index.
  static ItemVocabulary numbered(std::size_t n);

  // Throws VocabularyError on a duplicate external id.
  ItemIndex add(Item item);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Item& operator[](ItemIndex i) const { return items_[i]; }
  const std::vector<Item>& items() const { return items_; }

  std::optional<ItemIndex> find(std::int64_t id) const;
  // Throws VocabularyError for an unknown id.
  ItemIndex index_of(std::int64_t id) const;

  friend bool operator==(const ItemVocabulary& a, const ItemVocabulary& b) {
    return a.items_ == b.items_;
  }

 private:
  std::vector<Item> items_;
  std::unordered_map<std::int64_t, ItemIndex> index_;
};

// Sparse binary case-by-item matrix. Each case stores the sorted indices of
// its preferred items; an absent index means state 0.
class CaseMatrix {
 public:
  explicit CaseMatrix(std::size_t n_items = 0) : n_items_(n_items) {}
  // Validates bounds; sorts each case; throws DataError on duplicates.
  CaseMatrix(std::size_t n_items, std::vector<std::vector<ItemIndex>> cases);

  void add_case(std::vector<ItemIndex> items);

  std::size_t n_items() const { return n_items_; }
  std::size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }
  std::span<const ItemIndex> operator[](std::size_t c) const {
    return cases_[c];
  }
  const std::vector<std::vector<ItemIndex>>& cases() const { return cases_; }

  bool contains(std::size_t c, ItemIndex item) const;
  std::size_t total_preferences() const;
  double mean_items() const;

  friend bool operator==(const CaseMatrix&, const CaseMatrix&) = default;

 private:
  std::size_t n_items_;
  std::vector<std::vector<ItemIndex>> cases_;
};

struct UciDataset {
  ItemVocabulary vocabulary;
  CaseMatrix cases;
  std::vector<std::int64_t> case_ids;
};

// Anonymous-web ASCII format: A (attribute), C (case), V (vote) records;
// I, T, N, D lines ignored; LF or CRLF.
UciDataset parse_uci_web(std::istream& in);
void write_uci_web(std::ostream& out, const ItemVocabulary& vocabulary,
                   const CaseMatrix& cases,
                   std::span<const std::int64_t> case_ids = {});

// "case_id,item_index" lines; '#' comments. Cases appear in order of first
// mention of their id; duplicates within a case collapse.
CaseMatrix parse_sparse_pairs(std::istream& in, std::size_t n_items);

// Returns (train, test) with |test| = round(test_fraction * N). Case order
// within each part follows the original order.
std::pair<CaseMatrix, CaseMatrix> split_train_test(const CaseMatrix& m,
                                                   double test_fraction,
                                                   std::uint64_t seed);

// Laplace-smoothed p(X_i = 1): (count_i + 1) / (N + 2).
struct Popularity {
  std::vector<double> probs;
};
Popularity popularity(const CaseMatrix& m);

// Maps cases indexed by `from` onto the dense indices of `to` through the
// external ids. Throws VocabularyError if a used item is missing from `to`.
CaseMatrix reindex(const CaseMatrix& cases, const ItemVocabulary& from,
                   const ItemVocabulary& to);

struct DatasetFingerprint {
  std::uint64_t n_cases = 0;
  std::uint64_t n_items = 0;
  std::uint64_t checksum = 0;  // FNV-1a over case sizes and indices

  friend bool operator==(const DatasetFingerprint&,
                         const DatasetFingerprint&) = default;
};
DatasetFingerprint fingerprint(const CaseMatrix& m);

}  // namespace dnet

#endif  // DNET_DATA_H_
