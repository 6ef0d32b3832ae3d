#ifndef DNET_MODEL_IO_H_
#define DNET_MODEL_IO_H_

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "dnet/network.h"

namespace dnet {

inline constexpr int kModelFormatVersion = 1;

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical line-oriented text: fixed field order, reals as %.17g, so
// equal models serialize to identical bytes.
//
//   dnet-model <version>
//   config kappa <real> seed <int>
//   dataset cases <N> items <n> checksum <16 hex digits>
//   items <n>
//   item <external id> "<title>" "<url>"          (n lines)
//   tree <target> states <r> nodes <count>        (n blocks)
//   split <variable> <value> <gain> <step>        (preorder)
//   leaf <count_0> ... <count_{r-1}>
//   arcs <count>
//   arc <from> <to> <strength> <order>
//   end
void write_model(std::ostream& out, const DependencyNetwork& dn);
std::string model_to_string(const DependencyNetwork& dn);
DependencyNetwork read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const DependencyNetwork& dn);
DependencyNetwork load_model(const std::filesystem::path& path);

}  // namespace dnet

#endif  // DNET_MODEL_IO_H_
