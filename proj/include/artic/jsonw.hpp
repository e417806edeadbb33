#pragma once

#include <cstdio>
#include <string>

namespace artic {

// 17 significant digits: enough for bit-stable double round-trips.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Minimal append-only JSON writer. All output files are emitted through this
// so float formatting and key order are fully under our control (nlohmann is
// used for parsing only).
class JsonWriter {
 public:
  std::string str() && { return std::move(out_); }
  const std::string& str() const& { return out_; }

  JsonWriter& begin_object() { return token("{"); }
  JsonWriter& end_object() { fresh_ = false; out_ += "}"; return *this; }
  JsonWriter& begin_array() { return token("["); }
  JsonWriter& end_array() { fresh_ = false; out_ += "]"; return *this; }

  JsonWriter& key(const std::string& k) {
    comma();
    write_string(k);
    out_ += ":";
    fresh_ = true;
    return *this;
  }

  JsonWriter& value(double v) { comma(); out_ += fmt_g17(v); return *this; }
  JsonWriter& value(int v) { comma(); out_ += std::to_string(v); return *this; }
  JsonWriter& value(long long v) { comma(); out_ += std::to_string(v); return *this; }
  JsonWriter& value(unsigned long long v) { comma(); out_ += std::to_string(v); return *this; }
  JsonWriter& value(bool v) { comma(); out_ += v ? "true" : "false"; return *this; }
  JsonWriter& value(const std::string& v) { comma(); write_string(v); return *this; }
  JsonWriter& value(const char* v) { comma(); write_string(v); return *this; }
  JsonWriter& null() { comma(); out_ += "null"; return *this; }

  template <typename T>
  JsonWriter& kv(const std::string& k, const T& v) {
    return key(k).value(v);
  }

  JsonWriter& vec3(double x, double y, double z) {
    comma();
    out_ += "[" + fmt_g17(x) + "," + fmt_g17(y) + "," + fmt_g17(z) + "]";
    return *this;
  }

  // Splices pre-serialized JSON (e.g. a canonical config object) as a value.
  JsonWriter& raw(const std::string& json_text) {
    comma();
    out_ += json_text;
    return *this;
  }

 private:
  JsonWriter& token(const char* t) {
    comma();
    out_ += t;
    fresh_ = true;
    return *this;
  }
  void comma() {
    if (!fresh_ && !out_.empty()) {
      const char last = out_.back();
      if (last != '{' && last != '[' && last != ':') out_ += ",";
    }
    fresh_ = false;
  }
  void write_string(const std::string& s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\r': out_ += "\\r"; break;
        case '\t': out_ += "\\t"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  bool fresh_ = true;
};

}  // namespace artic
