#include "capscore/signature.hpp"

#include <charconv>
#include <cmath>

namespace capscore {

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, end);
  // "1e-09" -> "1e-9", "1e+20" -> "1e20"
  if (auto e = s.find('e'); e != std::string::npos) {
    std::string mantissa = s.substr(0, e);
    std::string exponent = s.substr(e + 1);
    bool negative = false;
    if (!exponent.empty() && (exponent[0] == '-' || exponent[0] == '+')) {
      negative = exponent[0] == '-';
      exponent.erase(0, 1);
    }
    while (exponent.size() > 1 && exponent[0] == '0') exponent.erase(0, 1);
    s = mantissa + "e" + (negative ? "-" : "") + exponent;
  }
  return s;
}

Signature& Signature::set(std::string key, std::string value) {
  params_[std::move(key)] = std::move(value);
  return *this;
}

Signature& Signature::set(std::string key, double value) {
  return set(std::move(key), format_number(value));
}

Signature& Signature::set(std::string key, int value) {
  return set(std::move(key), std::to_string(value));
}

std::string Signature::str() const {
  std::string out = name_;
  out += "|tok:";
  out += scheme_name(scheme_);
  for (const auto& [key, value] : params_) {
    out += '|';
    out += key;
    out += ':';
    out += value;
  }
  out += "|v:";
  out += kVersion;
  return out;
}

}  // namespace capscore
