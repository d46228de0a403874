#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "facte/chain.hpp"
#include "facte/errors.hpp"
#include "facte/rng.hpp"

using namespace facte;

TEST_CASE("explicit markers segmentation") {
    auto chain = segment_chain("Step 1: a\nStep 2: b", SegmentationPolicy::ExplicitMarkers);
    REQUIRE(chain.length() == 2);
    CHECK(chain.steps[0].text == "a");
    CHECK(chain.steps[1].text == "b");
    CHECK(chain.steps[0].index == 1);
    CHECK(chain.steps[1].index == 2);
}

TEST_CASE("sentence boundary segmentation") {
    auto chain = segment_chain("First, x. Then, y. Thus, z.",
                               SegmentationPolicy::SentenceBoundary);
    CHECK(chain.length() == 3);
    CHECK(chain.steps[2].text == "Thus, z.");
}

TEST_CASE("sentence boundary keeps decimals intact") {
    auto chain = segment_chain("We compute 0.49 times 49. That gives 24.01.",
                               SegmentationPolicy::SentenceBoundary);
    CHECK(chain.length() == 2);
}

TEST_CASE("blank line segmentation") {
    auto chain = segment_chain("first block\nstill first\n\nsecond block",
                               SegmentationPolicy::BlankLine);
    REQUIRE(chain.length() == 2);
    CHECK(chain.steps[0].text == "first block\nstill first");
}

TEST_CASE("empty text raises EmptyChain") {
    CHECK_THROWS_AS(segment_chain("", SegmentationPolicy::SentenceBoundary), EmptyChain);
    CHECK_THROWS_AS(segment_chain("   \n ", SegmentationPolicy::BlankLine), EmptyChain);
}

TEST_CASE("marker policy mismatch is distinguishable") {
    CHECK_THROWS_AS(segment_chain("no markers here.", SegmentationPolicy::ExplicitMarkers),
                    MarkerPolicyMismatch);
}

TEST_CASE("segmentation is deterministic") {
    const std::string text = "Step 1: compute.\nStep 2: conclude.";
    auto a = segment_chain(text, SegmentationPolicy::ExplicitMarkers);
    auto b = segment_chain(text, SegmentationPolicy::ExplicitMarkers);
    REQUIRE(a.length() == b.length());
    for (int i = 0; i < a.length(); ++i) CHECK(a.steps[i].text == b.steps[i].text);
}

static ReasoningChain make_chain(int L) {
    std::vector<std::string> steps;
    for (int i = 1; i <= L; ++i) steps.push_back("step " + std::to_string(i));
    return chain_from_steps(steps);
}

TEST_CASE("split_at basics") {
    auto chain = make_chain(4);
    auto sp = split_at(chain, 2);
    REQUIRE(sp.prefix.size() == 2);
    REQUIRE(sp.suffix.size() == 2);
    CHECK(sp.prefix[1].text == "step 2");
    CHECK(sp.suffix[0].text == "step 3");

    auto two = make_chain(2);
    auto sp2 = split_at(two, 1);
    CHECK(sp2.prefix.size() == 1);
    CHECK(sp2.suffix.size() == 1);

    CHECK_THROWS_AS(split_at(make_chain(3), 3), OutOfRange);
    CHECK_THROWS_AS(split_at(make_chain(3), 0), OutOfRange);
    CHECK_THROWS_AS(split_at(make_chain(1), 1), SingleStepChain);
}

TEST_CASE("split then concatenate reproduces the chain for all i") {
    KeyedStream rng(7, "split-roundtrip");
    for (int trial = 0; trial < 50; ++trial) {
        const int L = static_cast<int>(rng.uniform_int(2, 9));
        auto chain = make_chain(L);
        for (int i = 1; i <= L - 1; ++i) {
            auto sp = split_at(chain, i);
            std::vector<Step> joined = sp.prefix;
            joined.insert(joined.end(), sp.suffix.begin(), sp.suffix.end());
            REQUIRE(joined.size() == chain.steps.size());
            for (std::size_t k = 0; k < joined.size(); ++k)
                CHECK(joined[k].text == chain.steps[k].text);
        }
    }
}

TEST_CASE("numeric canonicalization") {
    auto a = canonicalize_answer("Answer: 70000", TaskKind::MathNumeric);
    CHECK(a.canonical == "70000");
    CHECK(a.equals(canonicalize_answer("70,000", TaskKind::MathNumeric)));
    CHECK(a.equals(canonicalize_answer("$70000", TaskKind::MathNumeric)));
    CHECK(canonicalize_answer("0.5", TaskKind::MathNumeric)
              .equals(canonicalize_answer("1/2", TaskKind::MathNumeric)));
    CHECK(canonicalize_answer("24.01/0.51", TaskKind::MathNumeric).canonical == "2401/51");
    CHECK(canonicalize_answer("-3", TaskKind::MathNumeric).canonical == "-3");
    CHECK(canonicalize_answer("\\boxed{42}", TaskKind::MathNumeric).canonical == "42");
    CHECK_THROWS_AS(canonicalize_answer("no digits", TaskKind::MathNumeric), Unparseable);
    CHECK_THROWS_AS(canonicalize_answer("", TaskKind::MathNumeric), Unparseable);
}

TEST_CASE("multiple choice canonicalization") {
    CHECK(canonicalize_answer("(B)", TaskKind::MultipleChoice).canonical == "B");
    CHECK(canonicalize_answer("b.", TaskKind::MultipleChoice).canonical == "B");
    CHECK(canonicalize_answer("Answer: C", TaskKind::MultipleChoice).canonical == "C");
    CHECK_THROWS_AS(canonicalize_answer("42", TaskKind::MultipleChoice), Unparseable);
}

TEST_CASE("free text canonicalization") {
    auto v = canonicalize_answer("  The  Eiffel Tower ", TaskKind::FreeText);
    CHECK(v.canonical == "the eiffel tower");
    CHECK(v.equals(canonicalize_answer("the eiffel tower", TaskKind::FreeText)));
}

// Hand-built equivalence fixture of MATH-style answer pairs; each pair must
// normalize to identical canonical forms.
static const std::vector<std::pair<const char*, const char*>> kExprPairs = {
    {"$\\sqrt{51}$", "sqrt(51)"},
    {"\\sqrt{2}", "sqrt(2)"},
    {"3\\sqrt{2}", "3sqrt(2)"},
    {"\\sqrt{x+1}", "sqrt(x+1)"},
    {"\\sqrt{2}/2", "sqrt(2)/2"},
    {"\\frac{1}{2}", "(1)/(2)"},
    {"\\dfrac{1}{2}", "(1)/(2)"},
    {"\\tfrac{1}{2}", "(1)/(2)"},
    {"\\frac{3}{4}", " (3)/(4) "},
    {"\\frac{a}{b}", "(a)/(b)"},
    {"\\frac{\\pi}{2}", "(pi)/(2)"},
    {"\\frac{\\sqrt{3}}{2}", "(sqrt(3))/(2)"},
    {"\\frac{24.01}{0.51}", "(24.01)/(0.51)"},
    {"$\\frac{56}{2}$", "(56)/(2)"},
    {"\\frac{56^\\circ}{2}", "(56)/(2)"},
    {"2\\pi", "2pi"},
    {"\\pi r^{2}", "pir^(2)"},
    {"x^{2}", "x^(2)"},
    {"2^{10}", "2^(10)"},
    {"\\left(3,\\frac{\\pi}{2}\\right)", "(3,(pi)/(2))"},
    {"(3, \\frac{\\pi}{2})", "(3,(pi)/(2))"},
    {"5\\cdot 3", "5*3"},
    {"4\\times 2", "4*2"},
    {"90^\\circ", "90"},
    {"28^{\\circ}", "28"},
    {"\\text{cm}", "cm"},
    {"\\boxed{42}", "42"},
    {"Answer: \\sqrt{51}", "sqrt(51)"},
    {"$x^{2}+1$", "x^(2)+1"},
    {"\\frac{x^{2}}{\\sqrt{3}}", "(x^(2))/(sqrt(3))"},
};

TEST_CASE("expression equivalence fixture") {
    for (const auto& [lhs, rhs] : kExprPairs) {
        auto a = canonicalize_answer(lhs, TaskKind::MathExpression);
        auto b = canonicalize_answer(rhs, TaskKind::MathExpression);
        INFO(lhs, " vs ", rhs, " -> ", a.canonical, " vs ", b.canonical);
        CHECK(a.equals(b));
    }
}

TEST_CASE("expressions beyond the table compare unequal, never error") {
    auto a = canonicalize_answer("\\frac{1}{2}", TaskKind::MathExpression);
    auto b = canonicalize_answer("0.5", TaskKind::MathExpression);
    CHECK_FALSE(a.equals(b));  // string-level normalization, not a CAS
}

TEST_CASE("canonicalization is idempotent") {
    for (const auto& [lhs, rhs] : kExprPairs) {
        auto once = canonicalize_answer(lhs, TaskKind::MathExpression);
        auto twice = canonicalize_answer(once.canonical, TaskKind::MathExpression);
        CHECK(once.canonical == twice.canonical);
    }
    for (const char* raw : {"Answer: 70000", "24.01/0.51", "-3", "0.125"}) {
        auto once = canonicalize_answer(raw, TaskKind::MathNumeric);
        auto twice = canonicalize_answer(once.canonical, TaskKind::MathNumeric);
        CHECK(once.canonical == twice.canonical);
    }
}

TEST_CASE("answer equality is an equivalence relation on the fixture set") {
    std::vector<AnswerValue> values;
    for (const auto& [lhs, rhs] : kExprPairs) {
        values.push_back(canonicalize_answer(lhs, TaskKind::MathExpression));
        values.push_back(canonicalize_answer(rhs, TaskKind::MathExpression));
    }
    for (const auto& a : values) CHECK(a.equals(a));  // reflexive
    for (const auto& a : values)
        for (const auto& b : values) CHECK(a.equals(b) == b.equals(a));  // symmetric
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = 0; j < values.size(); ++j)
            for (std::size_t k = 0; k < values.size(); ++k)
                if (values[i].equals(values[j]) && values[j].equals(values[k]))
                    CHECK(values[i].equals(values[k]));  // transitive
}

TEST_CASE("kinds never compare equal across each other") {
    auto num = canonicalize_answer("2", TaskKind::MathNumeric);
    auto txt = canonicalize_answer("2", TaskKind::FreeText);
    CHECK_FALSE(num.equals(txt));
}
