// pksm: packed-text exact string search.
//   pksm search PATTERN FILE      grep-like search
//   pksm bench ...                engine comparison, CSV on stdout
//   pksm selftest                 exhaustive small-instance checks

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <pksm/pksm.hpp>

using namespace pksm;
using json = nlohmann::json;

namespace {

constexpr int exit_match = 0;
constexpr int exit_no_match = 1;
constexpr int exit_error = 2;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("failed reading " + path);
    return ss.str();
}

ByteMapping mapping_for(const std::string& mode) {
    if (mode == "byte") return byte_mapping();
    if (mode == "dna") return dna_mapping();
    if (mode.starts_with("custom:")) return load_custom_mapping(mode.substr(7));
    throw invalid_parameter_error("unknown alphabet '" + mode + "' (byte, dna, custom:<file>)");
}

PreprocessOptions options_for(unsigned budget_log2, int forced_r) {
    if (budget_log2 < 1 || budget_log2 > 63) throw invalid_parameter_error("--budget-log2 must be in [1, 63]");
    PreprocessOptions o;
    o.t_budget = std::uint64_t{1} << budget_log2;
    if (forced_r != 0) {
        if (forced_r < 2 || forced_r % 2 != 0) throw invalid_parameter_error("--r must be even and at least 2");
        o.forced_r = static_cast<std::uint32_t>(forced_r);
    }
    return o;
}

struct SearchArgs {
    std::vector<std::string> positional;
    std::string pattern_file;
    std::string alphabet = "byte";
    unsigned budget_log2 = 22;
    int r = 0;
    std::string format = "text";
    bool start_offsets = false;
    bool verify = false;
    bool keep_newlines = false;
    std::string table_cache;
};

int cmd_search(const SearchArgs& a) {
    std::string pattern_bytes, path;
    if (!a.pattern_file.empty()) {
        if (a.positional.size() != 1) throw invalid_parameter_error("with --pattern-file give exactly one FILE");
        pattern_bytes = read_file(a.pattern_file);
        path = a.positional[0];
    } else {
        if (a.positional.size() != 2) throw invalid_parameter_error("expected PATTERN FILE");
        pattern_bytes = a.positional[0];
        path = a.positional[1];
    }
    const ByteMapping mapping = mapping_for(a.alphabet);
    const std::string skip = a.alphabet == "dna" && !a.keep_newlines ? "\r\n" : "";
    const PreprocessOptions opts = options_for(a.budget_log2, a.r);

    auto t0 = Clock::now();
    const std::string text_bytes = read_file(path);
    const double read_s = seconds_since(t0);

    t0 = Clock::now();
    std::vector<code_t> pattern_codes;
    try {
        pattern_codes = mapping.map(pattern_bytes, skip);
    } catch (const unmappable_byte_error& e) {
        throw invalid_parameter_error(std::string("pattern: ") + e.what());
    }
    if (pattern_codes.empty()) throw empty_pattern_error();
    std::vector<code_t> text_codes;
    try {
        text_codes = mapping.map(text_bytes, skip);
    } catch (const unmappable_byte_error& e) {
        throw invalid_parameter_error(path + ": " + e.what());
    }
    const PackedString pattern = pack(pattern_codes, mapping.alphabet());
    const PackedString text = pack(text_codes, mapping.alphabet());
    const double pack_s = seconds_since(t0);

    t0 = Clock::now();
    const PreprocessedPattern p = preprocess(pattern, opts);
    bool cache_loaded = false;
    if (!a.table_cache.empty() && std::filesystem::exists(a.table_cache)) {
        std::ifstream in(a.table_cache, std::ios::binary);
        if (!in) throw io_error("cannot open " + a.table_cache);
        p.table()->load(in, a.verify);
        cache_loaded = true;
    }
    const double preprocess_s = seconds_since(t0);

    t0 = Clock::now();
    const SearchOutcome out = search(p, text);
    const double search_s = seconds_since(t0);

    if (a.verify) {
        const auto expect = naive_search(pattern, text);
        if (expect != out.end_positions) {
            std::cerr << "pksm: verify: packed search reported " << out.end_positions.size()
                      << " matches, naive scan " << expect.size() << "\n";
            return exit_error;
        }
        if (MpAutomaton(pattern).search_baseline(text).end_positions != expect) {
            std::cerr << "pksm: verify: baseline disagrees with naive scan\n";
            return exit_error;
        }
    }

    if (!a.table_cache.empty()) {
        std::ofstream os(a.table_cache, std::ios::binary | std::ios::trunc);
        if (!os) throw io_error("cannot write " + a.table_cache);
        p.table()->save(os);
    }

    const std::size_t m = pattern.size();
    auto position = [&](std::size_t end) { return a.start_offsets ? end - m : end; };
    if (a.format == "json") {
        json matches = json::array();
        for (auto e : out.end_positions) matches.push_back(position(e));
        json doc = {
            {"matches", matches},
            {"positions", a.start_offsets ? "start-0" : "end-1"},
            {"stats",
             {{"N_hforward", out.stats.heavy_forward},
              {"N_hfail", out.stats.heavy_failure},
              {"N_accept", out.stats.accepting},
              {"iterations", out.iterations},
              {"r", p.r()},
              {"sigma", p.alphabet().sigma()}}},
            {"timings",
             {{"read_s", read_s}, {"pack_s", pack_s}, {"preprocess_s", preprocess_s}, {"search_s", search_s}}},
        };
        if (!p.diagnostic().empty()) doc["diagnostic"] = p.diagnostic();
        if (cache_loaded) doc["table_cache_loaded"] = true;
        std::cout << doc.dump(2) << "\n";
    } else {
        std::string buf;
        for (auto e : out.end_positions) buf += std::to_string(position(e)) + '\n';
        std::cout << buf;
    }
    return out.end_positions.empty() ? exit_no_match : exit_match;
}

struct BenchArgs {
    std::uint32_t sigma = 4;
    std::size_t n = 1000000;
    std::size_t m = 32;
    std::uint64_t seed = 1;
    unsigned trials = 3;
    std::string generator = "random";
    unsigned budget_log2 = 22;
    int r = 0;
};

int cmd_bench(const BenchArgs& a) {
    if (a.m < 1 || a.n < a.m) throw invalid_parameter_error("bench needs n >= m >= 1");
    if (a.generator != "random" && a.generator != "periodic")
        throw invalid_parameter_error("unknown generator '" + a.generator + "' (random, periodic)");
    const Alphabet alphabet(a.sigma);
    const PreprocessOptions opts = options_for(a.budget_log2, a.r);

    std::cout << "engine,sigma,n,m,r,seconds,matches,N_hforward,N_hfail\n";
    for (unsigned trial = 0; trial < a.trials; ++trial) {
        const std::uint64_t seed = a.seed + trial;
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<code_t> letter(0, a.sigma - 1);
        std::vector<code_t> pc(a.m), tc(a.n);
        for (auto& c : pc) c = letter(rng);
        if (a.generator == "periodic") {
            for (std::size_t i = 0; i < a.n; ++i) tc[i] = pc[i % a.m];
        } else {
            for (auto& c : tc) c = letter(rng);
        }
        const PackedString pattern = pack(pc, alphabet);
        const PackedString text = pack(tc, alphabet);

        const PreprocessedPattern p = preprocess(pattern, opts);
        auto t0 = Clock::now();
        const SearchOutcome packed = search(p, text);
        const double packed_s = seconds_since(t0);

        const MpAutomaton mp(pattern);
        t0 = Clock::now();
        const BaselineOutcome base = mp.search_baseline(text);
        const double mp_s = seconds_since(t0);

        t0 = Clock::now();
        const auto naive = naive_search(pattern, text);
        const double naive_s = seconds_since(t0);

        if (packed.end_positions != naive || base.end_positions != naive) {
            std::cout.flush();
            std::cerr << "pksm: bench: engines disagree (packed " << packed.end_positions.size() << ", mp_baseline "
                      << base.end_positions.size() << ", naive " << naive.size() << ") for seed " << seed
                      << "; rerun with --seed " << seed << " --trials 1\n";
            return exit_error;
        }

        const std::string common = std::to_string(a.sigma) + "," + std::to_string(a.n) + "," + std::to_string(a.m);
        auto row = [&](const char* engine, const std::string& r, double s, std::size_t matches,
                       const std::string& counters) {
            std::ostringstream line;
            line << engine << "," << common << "," << r << "," << std::fixed << std::setprecision(6) << s << ","
                 << matches << "," << counters << "\n";
            std::cout << line.str();
        };
        row("packed", std::to_string(p.r()), packed_s, packed.end_positions.size(),
            std::to_string(packed.stats.heavy_forward) + "," + std::to_string(packed.stats.heavy_failure));
        row("mp_baseline", "", mp_s, base.end_positions.size(), ",");
        row("naive", "", naive_s, naive.size(), ",");
        std::cout << "# ratio packed/mp_baseline trial " << trial << " seed " << seed << ": " << std::fixed
                  << std::setprecision(3) << (mp_s > 0 ? packed_s / mp_s : 0.0) << "\n";
    }
    return 0;
}

// ---- selftest ----

struct SuiteResult {
    std::size_t cases = 0;
    std::string failure;
};

template <class F>
void for_each_binary(std::size_t max_m, F&& f) {
    for (std::size_t m = 1; m <= max_m; ++m)
        for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
            std::vector<code_t> p(m);
            for (std::size_t i = 0; i < m; ++i) p[i] = (mask >> i) & 1u;
            f(p);
        }
}

SuiteResult suite_encoding(bool fault) {
    SuiteResult res;
    const Alphabet a(2);
    for_each_binary(10, [&](const std::vector<code_t>& p) {
        if (!res.failure.empty()) return;
        const MpAutomaton mp(pack(p, a));
        for (std::uint32_t r : {2u, 4u}) {
            if (r > p.size() + 1) continue;
            const SegmentAutomaton sa(mp, r);
            const auto layout = encoding_layout(r, a);
            for (std::uint32_t i = 0; i < sa.segment_count(); ++i) {
                const auto d = describe(sa, i);
                auto e = encode(d, layout);
                if (fault && res.cases == 0) e.set(layout.light_at + 1, !e.test(layout.light_at + 1));
                ++res.cases;
                std::string why;
                try {
                    if (decode(e, layout, a) != d) why = "decode(encode(S)) != S";
                } catch (const error& err) {
                    why = err.what();
                }
                if (!why.empty()) {
                    res.failure = why + " (m=" + std::to_string(p.size()) + ", r=" + std::to_string(r) +
                                  ", segment " + std::to_string(i) + ")";
                    return;
                }
            }
        }
    });
    return res;
}

SuiteResult suite_lookup(bool fault) {
    SuiteResult res;
    const Alphabet a(2);
    NextTable table(4, a);
    for_each_binary(7, [&](const std::vector<code_t>& p) {
        if (!res.failure.empty() || p.size() < 3) return;
        const SegmentAutomaton sa(MpAutomaton(pack(p, a)), 4);
        for (std::uint32_t i = 0; i < sa.segment_count(); ++i) {
            const auto d = describe(sa, i);
            const auto enc = encode(d, table.layout().enc);
            for (std::uint32_t j = 0; j < d.size; ++j)
                for (std::uint32_t len = 0; len <= 3; ++len)
                    for (std::uint64_t bits = 0; bits < (1u << len); ++bits) {
                        const Window w{len, bits};
                        NextResult got = table.lookup(make_key(table.layout(), enc, j, w));
                        if (fault && res.cases == 0) ++got.consumed;
                        ++res.cases;
                        if (got != next_direct(d, j, w, a) && res.failure.empty())
                            res.failure = "lookup != next_direct (m=" + std::to_string(p.size()) + ", segment " +
                                          std::to_string(i) + ", j=" + std::to_string(j) + ")";
                    }
        }
    });
    return res;
}

SuiteResult suite_counters(bool fault) {
    SuiteResult res;
    std::mt19937_64 rng(12345);
    for (std::uint32_t sigma : {2u, 4u}) {
        const Alphabet a(sigma);
        std::uniform_int_distribution<code_t> letter(0, sigma - 1);
        for (int trial = 0; trial < 500 && res.failure.empty(); ++trial) {
            const std::size_t m = 1 + rng() % 40;
            std::vector<code_t> p(m);
            for (auto& c : p) c = letter(rng);
            const std::size_t n = m + rng() % 1000;
            std::vector<code_t> t(n);
            for (std::size_t k = 0; k < n; ++k) t[k] = trial % 2 ? p[k % m] : letter(rng);
            const MpAutomaton mp(pack(p, a));
            auto fails = mp.fail_table();
            for (std::size_t s = 1; s < m; ++s)
                if (fails[s] > fails[s - 1] + 1) res.failure = "fail(s+1) > fail(s)+1";
            const auto r = static_cast<std::uint32_t>(2 * (1 + rng() % ((m + 1) / 2)));
            PreprocessOptions o;
            o.forced_r = std::min(r, max_engine_r(a));
            const auto pp = preprocess(pack(p, a), o);
            const auto out = search(pp, pack(t, a));
            SimStats s = out.stats;
            if (fault && res.cases == 0) s.heavy_failure = 2 * s.heavy_forward + 1;
            ++res.cases;
            const double nn = static_cast<double>(n), rr = pp.r();
            const double occ = static_cast<double>(out.end_positions.size());
            if (s.heavy_failure > 2 * s.heavy_forward) res.failure = "N_hfail > 2 N_hforward";
            else if (s.heavy_forward > 4 * nn / (rr - 1) + 1) res.failure = "N_hforward > 4n/(r-1)+1";
            else if (static_cast<double>(s.heavy_forward + s.heavy_failure + s.accepting) > 12 * nn / rr + occ + 3)
                res.failure = "N_hforward+N_hfail+N_accept > 12n/r+occ+3";
            else if (out.end_positions != naive_search(pack(p, a), pack(t, a))) res.failure = "matches differ from naive";
            if (!res.failure.empty())
                res.failure += " (sigma=" + std::to_string(sigma) + ", trial " + std::to_string(trial) + ")";
        }
    }
    return res;
}

SuiteResult suite_worked_example(bool fault) {
    SuiteResult res;
    const Alphabet a(3);
    auto codes = [](std::string_view s) {
        std::vector<code_t> v;
        for (char c : s) v.push_back(static_cast<code_t>(c - 'a'));
        return v;
    };
    PreprocessOptions o;
    o.forced_r = 4;
    const auto p = preprocess(pack(codes("ababca"), a), o);
    std::vector<TraceEvent> trace;
    const auto out = search(p, pack(codes("abacacababca"), a), &trace);

    std::cout << "  P = ababca, Q = abacacababca, r = 4\n";
    for (std::size_t e = 0; e < trace.size(); ++e) {
        const auto& ev = trace[e];
        std::cout << "  " << (ev.phase == TraceEvent::Phase::light_run ? "S2 light run " : "S4 ")
                  << (ev.phase == TraceEvent::Phase::single ? std::string(to_string(ev.kind)) + " " : "") << "-> ("
                  << ev.state.segment << "," << ev.state.local << ") k=" << ev.consumed
                  << (ev.accepting ? "  occurrence ends at " + std::to_string(ev.consumed) : "") << "\n";
    }

    struct Want {
        std::uint32_t seg, local;
        std::size_t k;
    };
    std::vector<Want> want = {{0, 3, 3},  {0, 1, 3},  {0, 0, 6},  {0, 1, 7},  {0, 3, 9},
                              {2, 0, 10}, {2, 1, 11}, {2, 2, 12}, {2, 2, 12}};
    if (fault) want[0].k = 2;
    res.cases = want.size();
    bool same = trace.size() == want.size();
    for (std::size_t e = 0; same && e < want.size(); ++e)
        same = trace[e].state == SegmentState{want[e].seg, want[e].local} && trace[e].consumed == want[e].k;
    if (!same) res.failure = "trace differs from the expected state sequence";
    else if (out.end_positions != std::vector<std::size_t>{12}) res.failure = "expected one occurrence ending at 12";
    return res;
}

int cmd_selftest(const std::string& inject) {
    struct Suite {
        const char* name;
        SuiteResult (*run)(bool);
    };
    const Suite suites[] = {
        {"encoding-roundtrip", suite_encoding},
        {"lookup-vs-direct", suite_lookup},
        {"counters", suite_counters},
        {"worked-example", suite_worked_example},
    };
    bool known = inject.empty();
    for (auto& s : suites) known |= inject == s.name;
    if (!known) throw invalid_parameter_error("unknown suite '" + inject + "'");

    int failed = 0;
    for (auto& s : suites) {
        const auto res = s.run(inject == s.name);
        if (res.failure.empty()) {
            std::cout << "PASS " << s.name << " (" << res.cases << " cases)\n";
        } else {
            std::cout << "FAIL " << s.name << ": " << res.failure << "\n";
            ++failed;
        }
    }
    return failed ? exit_error : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact string search over packed texts"};
    app.require_subcommand(1);

    SearchArgs sa;
    auto* search_cmd = app.add_subcommand("search", "Report every occurrence of PATTERN in FILE");
    search_cmd->add_option("args", sa.positional, "PATTERN FILE, or FILE with --pattern-file")->required();
    search_cmd->add_option("-f,--pattern-file", sa.pattern_file, "Read the pattern from a file");
    search_cmd->add_option("--alphabet", sa.alphabet, "byte, dna, or custom:<mapping file>")->capture_default_str();
    search_cmd->add_option("--budget-log2", sa.budget_log2, "Table budget as log2 of entries")->capture_default_str();
    search_cmd->add_option("--r", sa.r, "Force segment width r (even)");
    search_cmd->add_option("--format", sa.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    search_cmd->add_flag("--start-offsets", sa.start_offsets, "Print 0-based start offsets instead of 1-based ends");
    search_cmd->add_flag("--verify", sa.verify, "Cross-check against a naive scan");
    search_cmd->add_flag("--keep-newlines", sa.keep_newlines, "In dna mode, do not strip newlines");
    search_cmd->add_option("--table-cache", sa.table_cache, "Load and save the lookup table at this path");

    BenchArgs ba;
    auto* bench_cmd = app.add_subcommand("bench", "Compare engines on generated inputs; CSV on stdout");
    bench_cmd->add_option("--sigma", ba.sigma)->check(CLI::Range(2u, 65536u))->capture_default_str();
    bench_cmd->add_option("--n", ba.n)->capture_default_str();
    bench_cmd->add_option("--m", ba.m)->capture_default_str();
    bench_cmd->add_option("--seed", ba.seed)->capture_default_str();
    bench_cmd->add_option("--trials", ba.trials)->capture_default_str();
    bench_cmd->add_option("--generator", ba.generator, "random or periodic")->capture_default_str();
    bench_cmd->add_option("--budget-log2", ba.budget_log2)->capture_default_str();
    bench_cmd->add_option("--r", ba.r, "Force segment width r (even)");

    std::string inject;
    auto* selftest_cmd = app.add_subcommand("selftest", "Run the exhaustive small-instance suites");
    selftest_cmd->add_option("--inject-fault", inject, "Corrupt one check in the named suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_error;
    }

    try {
        if (*search_cmd) return cmd_search(sa);
        if (*bench_cmd) return cmd_bench(ba);
        if (*selftest_cmd) return cmd_selftest(inject);
    } catch (const std::exception& e) {
        std::cerr << "pksm: error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}
