// Reader/writer for CME model files. The format is a TOML subset:
//
//   [model]       d = 2, N = 4
//   [velocities]  v1 = [0.0, 1.0] ... vN
//   [kappa]       row1 = [[re, im], ...] ... rowN   (dense)
//   [gamma]       entries = [[j, m, n, o, re, im], ...]   (1-based, sparse)
//
// Only numbers and (nested) arrays are recognised as values.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gapsol/cme_model.hpp"
#include "gapsol/error.hpp"

namespace gapsol {

namespace {

struct Value {
    bool is_array = false;
    bool is_integer = false;
    double number = 0.0;
    std::vector<Value> items;
    int line = 0;
};

struct Entry {
    Value value;
    int line = 0;
};

using Section = std::map<std::string, Entry>;
using Document = std::map<std::string, Section>;

[[noreturn]] void fail(int line, const std::string& msg) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string strip_comment(const std::string& s) {
    const auto pos = s.find('#');
    return pos == std::string::npos ? s : s.substr(0, pos);
}

class ValueParser {
public:
    ValueParser(const std::string& text, int line) : text_(text), line_(line) {}

    Value parse() {
        Value v = parse_value();
        skip_ws();
        if (pos_ != text_.size()) fail(line_, "unexpected trailing characters '" + text_.substr(pos_) + "'");
        return v;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    Value parse_value() {
        skip_ws();
        if (pos_ >= text_.size()) fail(line_, "missing value");
        if (text_[pos_] == '[') return parse_array();
        return parse_number();
    }

    Value parse_array() {
        Value v;
        v.is_array = true;
        v.line = line_;
        ++pos_;  // '['
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ']') {
            ++pos_;
            return v;
        }
        while (true) {
            v.items.push_back(parse_value());
            skip_ws();
            if (pos_ >= text_.size()) fail(line_, "unterminated array");
            if (text_[pos_] == ',') {
                ++pos_;
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ']') {  // trailing comma
                    ++pos_;
                    return v;
                }
                continue;
            }
            if (text_[pos_] == ']') {
                ++pos_;
                return v;
            }
            fail(line_, std::string("expected ',' or ']' but found '") + text_[pos_] + "'");
        }
    }

    Value parse_number() {
        const auto start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        std::string token = text_.substr(start, pos_ - start);
        std::string cleaned;
        for (char c : token)
            if (c != '_') cleaned += c;
        if (cleaned.empty()) fail(line_, "empty number");
        char* end = nullptr;
        const double x = std::strtod(cleaned.c_str(), &end);
        if (end != cleaned.c_str() + cleaned.size()) fail(line_, "invalid number '" + token + "'");
        Value v;
        v.number = x;
        v.line = line_;
        v.is_integer = cleaned.find_first_of(".eEni") == std::string::npos;
        return v;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_;
};

int bracket_balance(const std::string& s) {
    int depth = 0;
    for (char c : s) {
        if (c == '[') ++depth;
        if (c == ']') --depth;
    }
    return depth;
}

Document parse_document(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string raw;
    std::string current;
    int line_no = 0;
    bool have_section = false;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[' && line.find('=') == std::string::npos) {
            if (line.back() != ']' || line.size() < 3) fail(line_no, "malformed section header '" + line + "'");
            current = trim(line.substr(1, line.size() - 2));
            if (doc.count(current)) fail(line_no, "duplicate section [" + current + "]");
            doc[current];
            have_section = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        if (!have_section) fail(line_no, "key outside of any section");
        const std::string key = trim(line.substr(0, eq));
        std::string value_text = trim(line.substr(eq + 1));
        const int start_line = line_no;
        while (bracket_balance(value_text) > 0) {
            if (!std::getline(in, raw)) fail(start_line, "unterminated array for '" + key + "'");
            ++line_no;
            value_text += " " + trim(strip_comment(raw));
        }
        if (key.empty()) fail(start_line, "empty key");
        auto& section = doc[current];
        if (section.count(key)) fail(start_line, "duplicate key '" + key + "' in [" + current + "]");
        section[key] = Entry{ValueParser(value_text, start_line).parse(), start_line};
    }
    return doc;
}

const Section& require_section(const Document& doc, const std::string& name) {
    auto it = doc.find(name);
    if (it == doc.end()) throw Error(ErrorCode::ParseError, "missing section [" + name + "] (field '" + name + "')");
    return it->second;
}

const Entry& require_key(const Section& section, const std::string& section_name, const std::string& key) {
    auto it = section.find(key);
    if (it == section.end())
        throw Error(ErrorCode::ParseError, "missing field '" + key + "' in [" + section_name + "]");
    return it->second;
}

int as_int(const Value& v, const std::string& field) {
    if (v.is_array || !v.is_integer || v.number != std::floor(v.number))
        fail(v.line, "field '" + field + "' must be an integer");
    return static_cast<int>(v.number);
}

double as_number(const Value& v, const std::string& field) {
    if (v.is_array) fail(v.line, "field '" + field + "' must be a number");
    return v.number;
}

const std::vector<Value>& as_array(const Value& v, const std::string& field, std::size_t expected) {
    if (!v.is_array) fail(v.line, "field '" + field + "' must be an array");
    if (expected != 0 && v.items.size() != expected)
        fail(v.line, "field '" + field + "' must have " + std::to_string(expected) + " entries, got " +
                         std::to_string(v.items.size()));
    return v.items;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

}  // namespace

CmeParameters parse_config(const std::string& text) {
    const Document doc = parse_document(text);

    const Section& model = require_section(doc, "model");
    CmeParameters p;
    p.dim = as_int(require_key(model, "model", "d").value, "d");
    p.modes = as_int(require_key(model, "model", "N").value, "N");
    if (p.dim <= 0 || p.modes <= 0) throw Error(ErrorCode::ParseError, "[model] d and N must be positive");

    const Section& vel = require_section(doc, "velocities");
    for (int j = 1; j <= p.modes; ++j) {
        const std::string key = "v" + std::to_string(j);
        const auto& items = as_array(require_key(vel, "velocities", key).value, key, static_cast<std::size_t>(p.dim));
        Eigen::VectorXd v(p.dim);
        for (int i = 0; i < p.dim; ++i) v(i) = as_number(items[i], key);
        p.velocities.push_back(v);
    }

    const Section& kap = require_section(doc, "kappa");
    p.kappa.resize(p.modes, p.modes);
    for (int j = 1; j <= p.modes; ++j) {
        const std::string key = "row" + std::to_string(j);
        const auto& row = as_array(require_key(kap, "kappa", key).value, key, static_cast<std::size_t>(p.modes));
        for (int r = 0; r < p.modes; ++r) {
            const auto& pair = as_array(row[r], key, 2);
            p.kappa(j - 1, r) = cplx{as_number(pair[0], key), as_number(pair[1], key)};
        }
    }

    const Section& gam = require_section(doc, "gamma");
    const auto& entries = as_array(require_key(gam, "gamma", "entries").value, "entries", 0);
    for (const auto& e : entries) {
        const auto& t = as_array(e, "entries", 6);
        GammaEntry g;
        g.j = as_int(t[0], "entries") - 1;
        g.m = as_int(t[1], "entries") - 1;
        g.n = as_int(t[2], "entries") - 1;
        g.o = as_int(t[3], "entries") - 1;
        g.value = cplx{as_number(t[4], "entries"), as_number(t[5], "entries")};
        for (int idx : {g.j, g.m, g.n, g.o})
            if (idx < 0 || idx >= p.modes)
                throw Error(ErrorCode::IndexOutOfRange, "line " + std::to_string(e.line) + ": gamma index " +
                                                            std::to_string(idx + 1) + " outside 1.." +
                                                            std::to_string(p.modes));
        p.gamma.push_back(g);
    }

    return validate(std::move(p));
}

CmeParameters load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_config(buffer.str());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
        throw;
    }
}

std::string format_config(const CmeParameters& params) {
    std::ostringstream out;
    out << "# coupled-mode model; indices are 1-based\n\n";
    out << "[model]\n";
    out << "d = " << params.dim << "\n";
    out << "N = " << params.modes << "\n\n";

    out << "[velocities]\n";
    for (int j = 0; j < params.modes; ++j) {
        out << "v" << j + 1 << " = [";
        for (int i = 0; i < params.velocities[j].size(); ++i)
            out << (i ? ", " : "") << format_double(params.velocities[j](i));
        out << "]\n";
    }

    out << "\n[kappa]\n# row j: [re, im] for columns 1..N\n";
    for (int j = 0; j < params.modes; ++j) {
        out << "row" << j + 1 << " = [";
        for (int r = 0; r < params.modes; ++r) {
            const cplx z = params.kappa(j, r);
            out << (r ? ", " : "") << "[" << format_double(z.real()) << ", " << format_double(z.imag()) << "]";
        }
        out << "]\n";
    }

    out << "\n[gamma]\n# [j, m, n, o, re, im]: gamma_j^{(m,n,o)} A_m conj(A_n) A_o\n";
    out << "entries = [\n";
    for (const auto& g : params.gamma) {
        out << "  [" << g.j + 1 << ", " << g.m + 1 << ", " << g.n + 1 << ", " << g.o + 1 << ", "
            << format_double(g.value.real()) << ", " << format_double(g.value.imag()) << "],\n";
    }
    out << "]\n";
    return out.str();
}

void save_config(const CmeParameters& params, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out << format_config(params);
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace gapsol
