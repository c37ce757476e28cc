#pragma once

#include <map>
#include <string>
#include <string_view>

#include "capscore/text.hpp"

namespace capscore {

inline constexpr std::string_view kVersion = "0.1.0";

/// Shortest round-trip decimal form, exponent without padding ("1e-15").
std::string format_number(double value);

/// Builds `NAME|tok:<scheme>|<key>:<value>|...|v:<version>`; keys after
/// `tok` are emitted in lexicographic order.
class Signature {
 public:
  Signature(std::string name, Scheme scheme) : name_(std::move(name)), scheme_(scheme) {}

  Signature& set(std::string key, std::string value);
  Signature& set(std::string key, double value);
  Signature& set(std::string key, int value);

  std::string str() const;

 private:
  std::string name_;
  Scheme scheme_;
  std::map<std::string, std::string> params_;
};

/// Scores for one metric over a set of captions.
struct MetricReport {
  std::string metric_name;
  std::string signature;
  std::map<std::string, double> per_caption;
  double aggregate = 0.0;
};

}  // namespace capscore
