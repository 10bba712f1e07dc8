#include <doctest.h>

#include <cmath>

#include "cotrim/metrics.hpp"
#include "support/test_util.hpp"

using namespace cotrim;
using cotrim::testing::throws_kind;

TEST_CASE("whitespace counter counts maximal non-space runs") {
    TokenCounter c;
    CHECK(c.count("one two three") == 3);
    CHECK(c.count("  padded   out  ") == 2);
    CHECK(c.count("a\nb\tc d") == 4);
    CHECK(c.count("") == 0);
    CHECK(c.count("   \n\t ") == 0);
    CHECK(c.count("single") == 1);
}

TEST_CASE("char-approx counter rounds bytes/4 up") {
    TokenCounter c;
    c.mode = TokenCounterMode::CharApprox;
    CHECK(c.count("") == 0);
    CHECK(c.count("a") == 1);
    CHECK(c.count("abcd") == 1);
    CHECK(c.count("abcde") == 2);
    CHECK(c.count(std::string(17, 'x')) == 5);
}

TEST_CASE("external counter runs a command over stdin") {
    TokenCounter c;
    c.mode = TokenCounterMode::External;
    c.command = "wc -w";
    TokenCounter ws;
    // wc -w agrees with the whitespace counter on plain ASCII text.
    for (const char* text : {"alpha beta gamma", "", "  a  b  ", "x\ny z\t w"})
        CHECK(c.count(text) == ws.count(text));

    c.command = "";
    CHECK(throws_kind(ErrorKind::ConfigError, [&] { c.count("x"); }));
    c.command = "false";
    CHECK(throws_kind(ErrorKind::IoError, [&] { c.count("x"); }));
    c.command = "head -c 3";
    CHECK(throws_kind(ErrorKind::IoError, [&] { c.count("not a number"); }));
}

TEST_CASE("count_think_tokens measures the block interior only") {
    TokenCounter c;
    auto r = count_think_tokens("<think>\nalpha beta\n\ngamma\n</think>\n\nsummary words here", c);
    CHECK(r.think_found);
    CHECK(r.tokens == 3);

    auto missing = count_think_tokens("no block at all", c);
    CHECK_FALSE(missing.think_found);
    CHECK(missing.tokens == 0);

    auto unclosed = count_think_tokens("<think> never closed", c);
    CHECK_FALSE(unclosed.think_found);

    auto empty = count_think_tokens("<think></think>after", c);
    CHECK(empty.think_found);
    CHECK(empty.tokens == 0);
}

TEST_CASE("corpus_ratio is the ratio of corpus means, in percent") {
    CHECK(corpus_ratio(100.0, 50.0) == doctest::Approx(50.0));
    CHECK(corpus_ratio(3660.35, 2263.17) == doctest::Approx(61.83).epsilon(0.0002));
    CHECK(corpus_ratio(3875.96, 1967.19) == doctest::Approx(50.75).epsilon(0.0002));
    CHECK(throws_kind(ErrorKind::ZeroOriginal, [] { corpus_ratio(0.0, 10.0); }));
    CHECK(throws_kind(ErrorKind::ZeroOriginal, [] { corpus_ratio(-5.0, 10.0); }));
}

TEST_CASE("bucket_distribution bins boundaries upward except 100") {
    auto bins = bucket_distribution({0.0, 9.99, 10.0, 55.0, 90.0, 99.9, 100.0});
    CHECK(bins[0] == 2);
    CHECK(bins[1] == 1);
    CHECK(bins[5] == 1);
    CHECK(bins[9] == 3);  // 90.0, 99.9 and the 100 boundary
    size_t total = 0;
    for (size_t b : bins) total += b;
    CHECK(total == 7);

    CHECK(throws_kind(ErrorKind::RatioOutOfRange, [] { bucket_distribution({101.0}); }));
    CHECK(throws_kind(ErrorKind::RatioOutOfRange, [] { bucket_distribution({-0.1}); }));
}

TEST_CASE("compute_strategy_stats aggregates means, bins and diagnostics") {
    DistilledRecord a;
    a.orig_tokens = 100;
    a.kept_tokens = 40;
    a.ratio = 0.4;
    a.orig_steps = 20;
    a.kept_steps = 4;  // ends well before the last 10 steps
    DistilledRecord b;
    b.orig_tokens = 300;
    b.kept_tokens = 240;
    b.ratio = 0.8;
    b.orig_steps = 12;
    b.kept_steps = 11;  // inside the last 10 steps

    StrategyStats s = compute_strategy_stats(Strategy::BinaryCut, {a, b}, 3);
    CHECK(s.n_records == 2);
    CHECK(s.n_rejected == 3);
    CHECK(s.orig_mean == doctest::Approx(200.0));
    CHECK(s.remaining_mean == doctest::Approx(140.0));
    CHECK(s.ratio == doctest::Approx(70.0));
    CHECK(s.bins[4] == 1);
    CHECK(s.bins[8] == 1);
    CHECK(s.last10_fraction == doctest::Approx(0.5));

    StrategyStats empty = compute_strategy_stats(Strategy::Fcs, {}, 1);
    CHECK(empty.n_records == 0);
    CHECK(empty.n_rejected == 1);
    CHECK(empty.ratio == 0.0);
}

TEST_CASE("round2 rounds to two decimals") {
    CHECK(round2(61.8333) == doctest::Approx(61.83));
    CHECK(round2(50.745) == doctest::Approx(50.75).epsilon(1e-9));
    CHECK(round2(1.005) == doctest::Approx(std::round(1.005 * 100.0) / 100.0));
}

TEST_CASE("token counter mode names round-trip") {
    for (auto mode : {TokenCounterMode::Whitespace, TokenCounterMode::CharApprox,
                      TokenCounterMode::External})
        CHECK(parse_token_counter_mode(token_counter_mode_name(mode)) == mode);
    CHECK(throws_kind(ErrorKind::ConfigError, [] { parse_token_counter_mode("gpt2"); }));
}
