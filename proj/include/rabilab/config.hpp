#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rabilab {

// Flat TOML-syntax key/value file: `key = value` lines, `#` comments, values
// are strings ("..."), booleans, numbers, or arrays of numbers. No tables.
// Unknown keys are hard errors at the call site via ConfigMap::finish().
class ConfigValue {
  public:
    using Array = std::vector<double>;
    std::variant<std::string, double, bool, Array> v;

    const std::string& as_string() const {
        if (!std::holds_alternative<std::string>(v)) throw std::runtime_error("expected string");
        return std::get<std::string>(v);
    }
    double as_number() const {
        if (!std::holds_alternative<double>(v)) throw std::runtime_error("expected number");
        return std::get<double>(v);
    }
    bool as_bool() const {
        if (!std::holds_alternative<bool>(v)) throw std::runtime_error("expected boolean");
        return std::get<bool>(v);
    }
    const Array& as_array() const {
        if (!std::holds_alternative<Array>(v)) throw std::runtime_error("expected array");
        return std::get<Array>(v);
    }
};

class ConfigMap {
  public:
    static ConfigMap parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_string(ss.str(), path);
    }

    static ConfigMap parse_string(const std::string& text, const std::string& origin = "<string>") {
        ConfigMap cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = strip_comment(line);
            s = trim(s);
            if (s.empty()) continue;
            if (s[0] == '[')
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": tables are not supported; use flat keys");
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": expected `key = value`");
            std::string key = trim(s.substr(0, eq));
            std::string val = trim(s.substr(eq + 1));
            if (key.empty() || val.empty())
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": empty key or value");
            if (cfg.values_.count(key))
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": duplicate key `" + key + "`");
            cfg.values_[key] = parse_value(val, origin, lineno);
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& dflt) {
        return take(key) ? taken_->as_string() : dflt;
    }
    double get_number(const std::string& key, double dflt) {
        return take(key) ? taken_->as_number() : dflt;
    }
    bool get_bool(const std::string& key, bool dflt) {
        return take(key) ? taken_->as_bool() : dflt;
    }
    std::vector<double> get_array(const std::string& key, std::vector<double> dflt) {
        return take(key) ? taken_->as_array() : dflt;
    }
    double require_number(const std::string& key) {
        if (!take(key)) throw std::runtime_error("config: missing required key `" + key + "`");
        return taken_->as_number();
    }
    std::string require_string(const std::string& key) {
        if (!take(key)) throw std::runtime_error("config: missing required key `" + key + "`");
        return taken_->as_string();
    }

    // Every key must have been consumed; silent typos are the worst failure
    // mode for physics parameters.
    void finish() const {
        for (const auto& [k, v] : values_)
            if (!consumed_.count(k)) throw std::runtime_error("config: unknown key `" + k + "`");
    }

  private:
    bool take(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) return false;
        consumed_.insert(key);
        taken_ = &it->second;
        return true;
    }

    static std::string trim(const std::string& s) {
        size_t b = s.find_first_not_of(" \t\r");
        size_t e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }
    static std::string strip_comment(const std::string& s) {
        bool in_str = false;
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') in_str = !in_str;
            if (s[i] == '#' && !in_str) return s.substr(0, i);
        }
        return s;
    }
    static ConfigValue parse_value(const std::string& val, const std::string& origin, int lineno) {
        auto fail = [&](const std::string& what) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + what);
        };
        ConfigValue out;
        if (val.front() == '"') {
            if (val.size() < 2 || val.back() != '"') fail("unterminated string");
            out.v = val.substr(1, val.size() - 2);
            return out;
        }
        if (val == "true" || val == "false") {
            out.v = (val == "true");
            return out;
        }
        if (val.front() == '[') {
            if (val.back() != ']') fail("unterminated array");
            ConfigValue::Array arr;
            std::string body = val.substr(1, val.size() - 2);
            std::istringstream ss(body);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (item.empty()) fail("empty array element");
                arr.push_back(parse_number(item, fail));
            }
            out.v = std::move(arr);
            return out;
        }
        out.v = parse_number(val, fail);
        return out;
    }
    template <class Fail>
    static double parse_number(const std::string& s, Fail fail) {
        char* end = nullptr;
        double x = std::strtod(s.c_str(), &end);
        if (end != s.c_str() + s.size()) fail("not a number: `" + s + "`");
        return x;
    }

    std::map<std::string, ConfigValue> values_;
    std::set<std::string> consumed_;
    const ConfigValue* taken_ = nullptr;
};

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace rabilab
