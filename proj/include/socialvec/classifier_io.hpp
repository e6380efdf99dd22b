#pragma once

#include <string>
#include <utility>
#include <variant>

#include "socialvec/inference.hpp"
#include "socialvec/params.hpp"

// Classifier files follow the model-file conventions: line-oriented text,
// `SOCIALVEC-CLF 1` header, named weight sections, reals with 17
// significant digits. Rows inside a section are keyed by row index.

namespace socialvec {

namespace detail {

inline void append_table(std::string& out, const char* name,
                         const VecTable& table) {
  out += name;
  out += ' ';
  out += std::to_string(table.rows());
  out += '\n';
  for (std::size_t i = 0; i < table.rows(); ++i)
    append_row(out, std::to_string(i), table.row(i));
}

inline VecTable read_table(ModelReader& reader, const char* name,
                           std::size_t expected_rows, std::size_t width) {
  const std::size_t rows = reader.section(name);
  if (rows != expected_rows)
    throw DimensionMismatchError(reader.path() + ": section " + name +
                                 " has " + std::to_string(rows) +
                                 " rows, expected " +
                                 std::to_string(expected_rows));
  VecTable table(rows, width);
  for (std::size_t i = 0; i < rows; ++i) {
    auto [id, values] = reader.row(width);
    std::copy(values.begin(), values.end(), table.row(i).begin());
  }
  return table;
}

inline void append_clf_header(std::string& out, const char* type,
                              const std::string& name, std::uint64_t fp) {
  out += "SOCIALVEC-CLF 1\n";
  out += "TYPE ";
  out += type;
  out += '\n';
  out += "NAME " + name + "\n";
  out += "FINGERPRINT " + std::to_string(fp) + "\n";
}

inline void append_labels(std::string& out,
                          const std::vector<std::string>& names) {
  out += "LABELS " + std::to_string(names.size()) + "\n";
  for (const auto& n : names) out += n + "\n";
}

struct ClfHeader {
  std::string type;
  std::string name;
  std::uint64_t fingerprint = 0;
};

inline ClfHeader read_clf_header(ModelReader& reader) {
  const std::string header = reader.next_line();
  const auto sp = header.find(' ');
  if (sp == std::string::npos || header.substr(0, sp) != "SOCIALVEC-CLF")
    throw VersionMismatchError(reader.path() +
                               ": not a SOCIALVEC classifier file");
  if (header.substr(sp + 1) != "1")
    throw VersionMismatchError(reader.path() +
                               ": unsupported classifier version '" +
                               header.substr(sp + 1) + "'");
  ClfHeader out;
  auto field = [&](const char* key) {
    const std::string line = reader.next_line();
    const auto pos = line.find(' ');
    if (pos == std::string::npos || line.substr(0, pos) != key)
      throw TruncatedModelError(reader.path() + ": expected " + key);
    return line.substr(pos + 1);
  };
  out.type = field("TYPE");
  out.name = field("NAME");
  out.fingerprint = static_cast<std::uint64_t>(
      std::stoull(field("FINGERPRINT")));
  return out;
}

inline std::vector<std::string> read_labels(ModelReader& reader,
                                            std::size_t count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::size_t i = 0; i < count; ++i) names.push_back(reader.next_line());
  return names;
}

}  // namespace detail

inline std::string classifier_to_string(const AttributeClassifier& clf) {
  std::string out;
  detail::append_clf_header(out, "ATTR", clf.name, clf.fingerprint);
  out += "K " + std::to_string(clf.k) + "\n";
  out += "H " + std::to_string(clf.hidden) + "\n";
  detail::append_labels(out, clf.label_names);
  detail::append_table(out, "W", clf.w);
  detail::append_table(out, "U", clf.u);
  detail::append_table(out, "ACC_W", clf.acc_w);
  detail::append_table(out, "ACC_U", clf.acc_u);
  return out;
}

inline std::string classifier_to_string(const RelationClassifier& clf) {
  std::string out;
  detail::append_clf_header(out, "REL", clf.name, clf.fingerprint);
  out += "K " + std::to_string(clf.k) + "\n";
  out += "H " + std::to_string(clf.hidden) + "\n";
  out += "H2 " + std::to_string(clf.hidden2) + "\n";
  detail::append_labels(out, clf.label_names);
  detail::append_table(out, "WA", clf.wa);
  detail::append_table(out, "WB", clf.wb);
  detail::append_table(out, "WDIFF", clf.w_diff);
  detail::append_table(out, "WPROD", clf.w_prod);
  detail::append_table(out, "W1", clf.w1);
  detail::append_table(out, "W2", clf.w2);
  detail::append_table(out, "U", clf.u);
  detail::append_table(out, "ACC_WA", clf.acc_wa);
  detail::append_table(out, "ACC_WB", clf.acc_wb);
  detail::append_table(out, "ACC_WDIFF", clf.acc_w_diff);
  detail::append_table(out, "ACC_WPROD", clf.acc_w_prod);
  detail::append_table(out, "ACC_W1", clf.acc_w1);
  detail::append_table(out, "ACC_W2", clf.acc_w2);
  detail::append_table(out, "ACC_U", clf.acc_u);
  return out;
}

template <typename Classifier>
void save_classifier(const Classifier& clf, const std::string& path) {
  write_file(path, classifier_to_string(clf));
}

using AnyClassifier = std::variant<AttributeClassifier, RelationClassifier>;

inline AnyClassifier load_classifier(const std::string& path) {
  detail::ModelReader reader(path);
  const auto header = detail::read_clf_header(reader);
  const std::size_t k = reader.section("K");
  const std::size_t hidden = reader.section("H");
  if (header.type == "ATTR") {
    AttributeClassifier clf;
    clf.name = header.name;
    clf.fingerprint = header.fingerprint;
    clf.k = static_cast<int>(k);
    clf.hidden = static_cast<int>(hidden);
    const std::size_t labels = reader.section("LABELS");
    clf.labels = static_cast<int>(labels);
    clf.label_names = detail::read_labels(reader, labels);
    clf.w = detail::read_table(reader, "W", hidden, k);
    clf.u = detail::read_table(reader, "U", labels, hidden);
    clf.acc_w = detail::read_table(reader, "ACC_W", hidden, k);
    clf.acc_u = detail::read_table(reader, "ACC_U", labels, hidden);
    return clf;
  }
  if (header.type == "REL") {
    RelationClassifier clf;
    clf.name = header.name;
    clf.fingerprint = header.fingerprint;
    clf.k = static_cast<int>(k);
    clf.hidden = static_cast<int>(hidden);
    const std::size_t hidden2 = reader.section("H2");
    clf.hidden2 = static_cast<int>(hidden2);
    const std::size_t labels = reader.section("LABELS");
    clf.labels = static_cast<int>(labels);
    clf.label_names = detail::read_labels(reader, labels);
    clf.wa = detail::read_table(reader, "WA", hidden, k);
    clf.wb = detail::read_table(reader, "WB", hidden, k);
    clf.w_diff = detail::read_table(reader, "WDIFF", hidden2, hidden);
    clf.w_prod = detail::read_table(reader, "WPROD", hidden2, hidden);
    clf.w1 = detail::read_table(reader, "W1", hidden2, hidden);
    clf.w2 = detail::read_table(reader, "W2", hidden2, hidden);
    clf.u = detail::read_table(reader, "U", labels, hidden2);
    clf.acc_wa = detail::read_table(reader, "ACC_WA", hidden, k);
    clf.acc_wb = detail::read_table(reader, "ACC_WB", hidden, k);
    clf.acc_w_diff = detail::read_table(reader, "ACC_WDIFF", hidden2, hidden);
    clf.acc_w_prod = detail::read_table(reader, "ACC_WPROD", hidden2, hidden);
    clf.acc_w1 = detail::read_table(reader, "ACC_W1", hidden2, hidden);
    clf.acc_w2 = detail::read_table(reader, "ACC_W2", hidden2, hidden);
    clf.acc_u = detail::read_table(reader, "ACC_U", labels, hidden2);
    return clf;
  }
  throw ModelFormatError(path + ": unknown classifier type '" + header.type +
                         "'");
}

}  // namespace socialvec
