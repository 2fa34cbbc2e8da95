#include "osp/registry.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "osp/errors.hpp"

namespace osp {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    raise("RegistryParse", "line " + std::to_string(line) + ": " + msg);
}

struct Value {
    enum Kind { str, num, arr } kind = num;
    std::string s;
    double n = 0.0;
    std::vector<Value> items;
};

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
};

Value parse_value(Cursor& c) {
    c.skip_ws();
    if (c.pos >= c.text.size()) fail(c.line, "unexpected end of value");
    const char ch = c.text[c.pos];
    Value v;
    if (ch == '"') {
        ++c.pos;
        const std::size_t end = c.text.find('"', c.pos);
        if (end == std::string::npos) fail(c.line, "unterminated string");
        v.kind = Value::str;
        v.s = c.text.substr(c.pos, end - c.pos);
        c.pos = end + 1;
        return v;
    }
    if (ch == '[') {
        ++c.pos;
        v.kind = Value::arr;
        c.skip_ws();
        if (c.pos < c.text.size() && c.text[c.pos] == ']') {
            ++c.pos;
            return v;
        }
        while (true) {
            v.items.push_back(parse_value(c));
            c.skip_ws();
            if (c.pos >= c.text.size()) fail(c.line, "unterminated array");
            if (c.text[c.pos] == ',') {
                ++c.pos;
                continue;
            }
            if (c.text[c.pos] == ']') {
                ++c.pos;
                return v;
            }
            fail(c.line, "expected ',' or ']' in array");
        }
    }
    const char* start = c.text.c_str() + c.pos;
    char* end = nullptr;
    v.kind = Value::num;
    v.n = std::strtod(start, &end);
    if (end == start) fail(c.line, "expected a value");
    c.pos += static_cast<std::size_t>(end - start);
    return v;
}

Complex parse_complex(const std::string& raw, int line) {
    std::string s;
    for (char ch : raw) {
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    }
    if (s.empty()) fail(line, "empty complex literal");
    if (s.back() != 'i') {  // pure real
        char* end = nullptr;
        const double re = std::strtod(s.c_str(), &end);
        if (end != s.c_str() + s.size()) fail(line, "bad complex literal '" + raw + "'");
        return Complex(re, 0.0);
    }
    s.pop_back();  // drop the 'i'
    // Split at the sign of the imaginary part: the last +/- not following an
    // exponent marker and not in position 0.
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    std::string re_part = (split == std::string::npos) ? "0" : s.substr(0, split);
    std::string im_part = (split == std::string::npos) ? s : s.substr(split);
    if (im_part.empty() || im_part == "+") im_part = "1";
    if (im_part == "-") im_part = "-1";
    char* end = nullptr;
    const double re = std::strtod(re_part.c_str(), &end);
    if (end != re_part.c_str() + re_part.size()) fail(line, "bad complex literal '" + raw + "'");
    const double im = std::strtod(im_part.c_str(), &end);
    if (end != im_part.c_str() + im_part.size()) fail(line, "bad complex literal '" + raw + "'");
    return Complex(re, im);
}

EndpointToken parse_token(const std::string& s, int line) {
    if (s == "left_end") return EndpointToken::left_end;
    if (s == "x1") return EndpointToken::x1;
    if (s == "x2") return EndpointToken::x2;
    if (s == "right_end") return EndpointToken::right_end;
    fail(line, "unknown endpoint token '" + s + "'");
}

ConstraintKind parse_constraint(const std::string& s, int line) {
    if (s == "real_part_zero") return ConstraintKind::real_part_zero;
    if (s == "imag_part_zero") return ConstraintKind::imag_part_zero;
    if (s == "real_part_equals") return ConstraintKind::real_part_equals;
    if (s == "imag_part_equals") return ConstraintKind::imag_part_equals;
    fail(line, "unknown constraint '" + s + "'");
}

CountPart parse_part(const std::string& s, int line) {
    if (s == "imag") return CountPart::imag;
    if (s == "real") return CountPart::real;
    if (s == "modulus") return CountPart::modulus;
    fail(line, "unknown counting part '" + s + "'");
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        if (line[k] == '"') in_string = !in_string;
        if (line[k] == '#' && !in_string) return line.substr(0, k);
    }
    return line;
}

int bracket_balance(const std::string& s) {
    int bal = 0;
    bool in_string = false;
    for (char ch : s) {
        if (ch == '"') in_string = !in_string;
        if (in_string) continue;
        if (ch == '[') ++bal;
        if (ch == ']') --bal;
    }
    return bal;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

const CurveCondition* Registry::find_condition(const std::string& id) const {
    for (const CurveCondition& c : conditions) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

const CountingLaw* Registry::find_law(const std::string& condition_id) const {
    for (const CountingLaw& l : laws) {
        if (l.condition_id == condition_id) return &l;
    }
    return nullptr;
}

Registry parse_registry(const std::string& text) {
    Registry reg;
    CurveCondition* cur_cond = nullptr;
    CountingLaw* cur_law = nullptr;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;

        // Arrays may continue over several lines; join until brackets balance.
        while (bracket_balance(line) > 0) {
            std::string more;
            if (!std::getline(in, more)) fail(line_no, "unterminated array");
            ++line_no;
            line += ' ' + trim(strip_comment(more));
        }

        if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
            const std::string name = trim(line.substr(1, line.size() - 2));
            const std::size_t dot = name.find('.');
            if (dot == std::string::npos) fail(line_no, "section must be curve.<id> or count.<id>");
            const std::string kind = name.substr(0, dot);
            const std::string id = name.substr(dot + 1);
            if (id.empty()) fail(line_no, "empty section id");
            cur_cond = nullptr;
            cur_law = nullptr;
            if (kind == "curve") {
                reg.conditions.emplace_back();
                cur_cond = &reg.conditions.back();
                cur_cond->id = id;
            } else if (kind == "count") {
                reg.laws.emplace_back();
                cur_law = &reg.laws.back();
                cur_law->condition_id = id;
            } else {
                fail(line_no, "unknown section kind '" + kind + "'");
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value_text = trim(line.substr(eq + 1));
        Cursor c{value_text, 0, line_no};
        const Value v = parse_value(c);
        if (!c.done()) fail(line_no, "trailing characters after value");

        if (cur_cond != nullptr) {
            if (key == "terms") {
                if (v.kind != Value::arr) fail(line_no, "terms must be an array");
                for (const Value& t : v.items) {
                    if (t.kind != Value::arr || t.items.size() != 3 ||
                        t.items[0].kind != Value::str || t.items[1].kind != Value::str ||
                        t.items[2].kind != Value::str) {
                        fail(line_no, "each term must be [\"from\",\"to\",\"coeff\"]");
                    }
                    ActionTerm term;
                    term.from = parse_token(t.items[0].s, line_no);
                    term.to = parse_token(t.items[1].s, line_no);
                    term.coeff = parse_complex(t.items[2].s, line_no);
                    cur_cond->terms.push_back(term);
                }
            } else if (key == "constraint") {
                if (v.kind != Value::str) fail(line_no, "constraint must be a string");
                cur_cond->kind = parse_constraint(v.s, line_no);
            } else if (key == "value") {
                if (v.kind != Value::num) fail(line_no, "value must be a number");
                cur_cond->value = v.n;
            } else if (key == "domain") {
                if (v.kind != Value::arr || v.items.size() != 4) {
                    fail(line_no, "domain must be [re_min, re_max, im_min, im_max]");
                }
                for (const Value& d : v.items) {
                    if (d.kind != Value::num) fail(line_no, "domain entries must be numbers");
                }
                cur_cond->domain = Rect{v.items[0].n, v.items[1].n, v.items[2].n, v.items[3].n};
                if (cur_cond->domain.empty()) fail(line_no, "domain rectangle is empty");
            } else if (key == "seeds") {
                if (v.kind != Value::arr) fail(line_no, "seeds must be an array");
                for (const Value& s : v.items) {
                    if (s.kind != Value::str) fail(line_no, "seeds must be complex strings");
                    cur_cond->seeds.push_back(parse_complex(s.s, line_no));
                }
            } else {
                fail(line_no, "unknown key '" + key + "' in curve section");
            }
        } else if (cur_law != nullptr) {
            if (key == "kappa") {
                if (v.kind != Value::num) fail(line_no, "kappa must be a number");
                cur_law->kappa = v.n;
            } else if (key == "part") {
                if (v.kind != Value::str) fail(line_no, "part must be a string");
                cur_law->part = parse_part(v.s, line_no);
            } else {
                fail(line_no, "unknown key '" + key + "' in count section");
            }
        } else {
            fail(line_no, "key outside of a section");
        }
    }

    for (const CurveCondition& c : reg.conditions) {
        if (c.terms.empty()) {
            raise("RegistryParse", "curve." + c.id + " has no action terms");
        }
    }
    for (const CountingLaw& l : reg.laws) {
        if (!(l.kappa > 0.0)) {
            raise("RegistryParse", "count." + l.condition_id + " needs kappa > 0");
        }
        if (reg.find_condition(l.condition_id) == nullptr) {
            raise("RegistryParse",
                  "count." + l.condition_id + " references a missing curve section");
        }
    }
    return reg;
}

Registry load_registry(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise("IoError", "cannot open registry file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_registry(buf.str());
}

}  // namespace osp
