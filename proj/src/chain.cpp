#include "facte/chain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <regex>
#include <sstream>

#include "facte/errors.hpp"

namespace facte {

std::string to_string(TaskKind k) {
    switch (k) {
        case TaskKind::MathNumeric: return "math-numeric";
        case TaskKind::MathExpression: return "math-expression";
        case TaskKind::MultipleChoice: return "multiple-choice";
        case TaskKind::FreeText: return "free-text";
    }
    return "free-text";
}

TaskKind task_kind_from_string(const std::string& s) {
    if (s == "math-numeric") return TaskKind::MathNumeric;
    if (s == "math-expression") return TaskKind::MathExpression;
    if (s == "multiple-choice") return TaskKind::MultipleChoice;
    if (s == "free-text") return TaskKind::FreeText;
    throw ConfigError("unknown task_kind: " + s);
}

std::string to_string(SegmentationPolicy p) {
    switch (p) {
        case SegmentationPolicy::ExplicitMarkers: return "explicit-markers";
        case SegmentationPolicy::SentenceBoundary: return "sentence-boundary";
        case SegmentationPolicy::BlankLine: return "blank-line";
    }
    return "explicit-markers";
}

SegmentationPolicy segmentation_policy_from_string(const std::string& s) {
    if (s == "explicit-markers") return SegmentationPolicy::ExplicitMarkers;
    if (s == "sentence-boundary") return SegmentationPolicy::SentenceBoundary;
    if (s == "blank-line") return SegmentationPolicy::BlankLine;
    throw ConfigError("unknown segmentation policy: " + s);
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string join_steps(const std::vector<Step>& steps) {
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (i) out.push_back('\n');
        out += steps[i].text;
    }
    return out;
}

std::string ReasoningChain::joined() const { return join_steps(steps); }

// ---------------------------------------------------------------------------
// Rational
// ---------------------------------------------------------------------------

Rational Rational::make(std::int64_t n, std::int64_t d) {
    if (d == 0) throw Unparseable("zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    return Rational{n, d};
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

// ---------------------------------------------------------------------------
// Segmentation
// ---------------------------------------------------------------------------

static ReasoningChain finalize_chain(std::vector<std::string> parts, ChainSource source) {
    ReasoningChain chain;
    chain.source = source;
    for (auto& p : parts) {
        std::string t = trim(p);
        if (t.empty()) continue;
        chain.steps.push_back(Step{static_cast<int>(chain.steps.size()) + 1, std::move(t)});
    }
    if (chain.steps.empty()) throw EmptyChain("no step survived segmentation");
    return chain;
}

ReasoningChain chain_from_steps(const std::vector<std::string>& steps, ChainSource source) {
    return finalize_chain(steps, source);
}

static ReasoningChain segment_markers(const std::string& text) {
    static const std::regex marker(R"((^|\n)\s*Step\s+\d+\s*[:.])",
                                   std::regex::icase);
    std::vector<std::pair<std::size_t, std::size_t>> hits;  // (start, end-of-marker)
    for (auto it = std::sregex_iterator(text.begin(), text.end(), marker);
         it != std::sregex_iterator(); ++it) {
        hits.emplace_back(static_cast<std::size_t>(it->position(0)),
                          static_cast<std::size_t>(it->position(0) + it->length(0)));
    }
    if (hits.empty()) throw MarkerPolicyMismatch("no 'Step k:' markers found");
    std::vector<std::string> parts;
    for (std::size_t h = 0; h < hits.size(); ++h) {
        std::size_t body = hits[h].second;
        std::size_t end = (h + 1 < hits.size()) ? hits[h + 1].first : text.size();
        parts.push_back(text.substr(body, end - body));
    }
    return finalize_chain(std::move(parts), ChainSource::ModelGenerated);
}

static ReasoningChain segment_sentences(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        cur.push_back(c);
        if (c == '.' || c == '!' || c == '?') {
            bool at_end = (i + 1 == text.size());
            bool followed_by_space =
                !at_end && std::isspace(static_cast<unsigned char>(text[i + 1]));
            if (at_end || followed_by_space) {
                parts.push_back(cur);
                cur.clear();
            }
        }
    }
    if (!trim(cur).empty()) parts.push_back(cur);
    return finalize_chain(std::move(parts), ChainSource::ModelGenerated);
}

static ReasoningChain segment_blank_lines(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            parts.push_back(cur);
            cur.clear();
        } else {
            if (!cur.empty()) cur.push_back('\n');
            cur += line;
        }
    }
    parts.push_back(cur);
    return finalize_chain(std::move(parts), ChainSource::ModelGenerated);
}

ReasoningChain segment_chain(const std::string& raw_text, SegmentationPolicy policy) {
    if (trim(raw_text).empty()) throw EmptyChain("empty chain text");
    switch (policy) {
        case SegmentationPolicy::ExplicitMarkers: return segment_markers(raw_text);
        case SegmentationPolicy::SentenceBoundary: return segment_sentences(raw_text);
        case SegmentationPolicy::BlankLine: return segment_blank_lines(raw_text);
    }
    throw ConfigError("unknown segmentation policy");
}

SplitPair split_at(const ReasoningChain& chain, int i) {
    const int L = chain.length();
    if (L <= 1) throw SingleStepChain("cannot split a single-step chain");
    if (i < 1 || i >= L)
        throw OutOfRange("split index " + std::to_string(i) + " outside [1, " +
                         std::to_string(L - 1) + "]");
    SplitPair sp;
    sp.split_index = i;
    sp.prefix.assign(chain.steps.begin(), chain.steps.begin() + i);
    sp.suffix.assign(chain.steps.begin() + i, chain.steps.end());
    return sp;
}

// ---------------------------------------------------------------------------
// Answer canonicalization
// ---------------------------------------------------------------------------

static std::string strip_answer_prefix(std::string s) {
    s = trim(s);
    static const std::regex prefix(R"(^(?:the\s+)?answer\s*(?:is)?\s*[:=]?\s*)",
                                   std::regex::icase);
    std::smatch m;
    if (std::regex_search(s, m, prefix) && m.position(0) == 0 && m.length(0) > 0 &&
        static_cast<std::size_t>(m.length(0)) < s.size()) {
        s = s.substr(static_cast<std::size_t>(m.length(0)));
    }
    return trim(s);
}

static AnswerValue canonical_numeric(const std::string& raw) {
    std::string s = strip_answer_prefix(raw);
    // \boxed{...} unwrapping, then currency/group separators
    static const std::regex boxed(R"(\\boxed\{([^}]*)\})");
    std::smatch bm;
    if (std::regex_search(s, bm, boxed)) s = bm[1].str();
    std::string cleaned;
    for (char c : s) {
        if (c == '$' || c == ',') continue;
        cleaned.push_back(c);
    }
    static const std::regex number(R"([+-]?\d+(\.\d+)?(\s*/\s*[+-]?\d+(\.\d+)?)?)");
    std::smatch m;
    if (!std::regex_search(cleaned, m, number))
        throw Unparseable("no numeric value in: " + raw);

    auto parse_decimal = [](const std::string& tok) -> Rational {
        auto dot = tok.find('.');
        if (dot == std::string::npos)
            return Rational::make(std::stoll(tok), 1);
        std::string digits = tok.substr(0, dot) + tok.substr(dot + 1);
        std::int64_t den = 1;
        for (std::size_t i = dot + 1; i < tok.size(); ++i) den *= 10;
        return Rational::make(std::stoll(digits), den);
    };

    std::string tok = m[0].str();
    Rational value{};
    auto slash = tok.find('/');
    if (slash == std::string::npos) {
        value = parse_decimal(tok);
    } else {
        Rational a = parse_decimal(trim(tok.substr(0, slash)));
        Rational b = parse_decimal(trim(tok.substr(slash + 1)));
        if (b.num == 0) throw Unparseable("division by zero in: " + raw);
        value = Rational::make(a.num * b.den, a.den * b.num);
    }
    AnswerValue v;
    v.kind = TaskKind::MathNumeric;
    v.rational = value;
    v.canonical = value.str();
    v.raw = raw;
    return v;
}

// Recursive string-level LaTeX/ascii normalizer. Not a CAS: forms outside the
// rewrite table compare unequal, never error.
static std::string normalize_expr(const std::string& s);

static std::string read_brace_group(const std::string& s, std::size_t& i) {
    // s[i] == '{'; returns inner content, advances i past the closing brace.
    int depth = 0;
    std::size_t start = i + 1;
    for (; i < s.size(); ++i) {
        if (s[i] == '{') ++depth;
        if (s[i] == '}') {
            --depth;
            if (depth == 0) {
                std::string inner = s.substr(start, i - start);
                ++i;
                return inner;
            }
        }
    }
    throw Unparseable("unbalanced braces");
}

static std::string normalize_expr(const std::string& s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isspace(c) || c == '$') {
            ++i;
            continue;
        }
        if (c == 0xC2 && i + 1 < s.size() &&
            static_cast<unsigned char>(s[i + 1]) == 0xB0) {  // degree sign
            i += 2;
            continue;
        }
        if (c == '\\') {
            std::size_t j = i + 1;
            while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
            std::string cmd = s.substr(i + 1, j - i - 1);
            i = j;
            if (cmd.empty()) {  // escaped punctuation like \, \! — drop
                if (i < s.size()) ++i;
                continue;
            }
            if (cmd == "frac" || cmd == "dfrac" || cmd == "tfrac") {
                while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
                if (i >= s.size() || s[i] != '{') throw Unparseable("frac without braces");
                std::string a = read_brace_group(s, i);
                while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
                if (i >= s.size() || s[i] != '{') throw Unparseable("frac without braces");
                std::string b = read_brace_group(s, i);
                out += "(" + normalize_expr(a) + ")/(" + normalize_expr(b) + ")";
            } else if (cmd == "sqrt") {
                while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
                if (i < s.size() && s[i] == '{') {
                    std::string x = read_brace_group(s, i);
                    out += "sqrt(" + normalize_expr(x) + ")";
                } else {
                    out += "sqrt";
                }
            } else if (cmd == "pi") {
                out += "pi";
            } else if (cmd == "cdot" || cmd == "times") {
                out += "*";
            } else if (cmd == "left" || cmd == "right" || cmd == "circ" ||
                       cmd == "degree") {
                // dropped
            } else if (cmd == "text" || cmd == "mbox" || cmd == "mathrm") {
                while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
                if (i < s.size() && s[i] == '{') out += normalize_expr(read_brace_group(s, i));
            } else if (cmd == "boxed") {
                while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
                if (i < s.size() && s[i] == '{') out += normalize_expr(read_brace_group(s, i));
            } else {
                out += cmd;
            }
            continue;
        }
        if (c == '{') {
            std::string inner = read_brace_group(s, i);
            out += "(" + normalize_expr(inner) + ")";
            continue;
        }
        out.push_back(static_cast<char>(c));
        ++i;
    }
    return out;
}

// Dropped commands (\circ and friends) can strand an exponent marker; erase
// empty groups and dangling carets so "28^{\circ}" lands on "28".
static std::string scrub_expr(std::string s) {
    for (std::size_t pos = s.find("^()"); pos != std::string::npos;
         pos = s.find("^()"))
        s.erase(pos, 3);
    for (std::size_t pos = s.find("()"); pos != std::string::npos; pos = s.find("()"))
        s.erase(pos, 2);
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '^' && (i + 1 == s.size() || s[i + 1] == ')')) continue;
        out.push_back(s[i]);
    }
    return out;
}

static AnswerValue canonical_expression(const std::string& raw) {
    std::string s = strip_answer_prefix(raw);
    std::string norm = scrub_expr(normalize_expr(s));
    if (norm.empty()) throw Unparseable("empty expression: " + raw);
    AnswerValue v;
    v.kind = TaskKind::MathExpression;
    v.canonical = norm;
    v.raw = raw;
    return v;
}

static AnswerValue canonical_choice(const std::string& raw) {
    std::string s = strip_answer_prefix(raw);
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (up < 'A' || up > 'E') continue;
        bool left_ok = (i == 0) || !std::isalnum(static_cast<unsigned char>(s[i - 1]));
        bool right_ok =
            (i + 1 == s.size()) || !std::isalnum(static_cast<unsigned char>(s[i + 1]));
        if (left_ok && right_ok) {
            AnswerValue v;
            v.kind = TaskKind::MultipleChoice;
            v.canonical = std::string(1, up);
            v.raw = raw;
            return v;
        }
    }
    throw Unparseable("no choice letter in: " + raw);
}

static AnswerValue canonical_free_text(const std::string& raw) {
    std::string s = strip_answer_prefix(raw);
    std::string out;
    bool in_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (out.empty()) throw Unparseable("empty free-text answer");
    AnswerValue v;
    v.kind = TaskKind::FreeText;
    v.canonical = out;
    v.raw = raw;
    return v;
}

AnswerValue canonicalize_answer(const std::string& raw, TaskKind kind) {
    if (trim(raw).empty()) throw Unparseable("empty answer");
    switch (kind) {
        case TaskKind::MathNumeric: return canonical_numeric(raw);
        case TaskKind::MathExpression: return canonical_expression(raw);
        case TaskKind::MultipleChoice: return canonical_choice(raw);
        case TaskKind::FreeText: return canonical_free_text(raw);
    }
    throw Unparseable("unknown task kind");
}

bool AnswerValue::equals(const AnswerValue& other) const {
    if (kind != other.kind) return false;
    if (kind == TaskKind::MathNumeric && rational && other.rational)
        return *rational == *other.rational;
    return canonical == other.canonical;
}

}  // namespace facte
