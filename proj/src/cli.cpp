#include "nmlab/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "nmlab/errors.hpp"
#include "nmlab/nipm.hpp"
#include "nmlab/nmx.hpp"
#include "nmlab/pamp.hpp"
#include "nmlab/prob.hpp"
#include "nmlab/suite.hpp"

namespace nmlab {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "nmlab.report/1";

// Bad flags or unreadable files; maps to exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool has(const RunConfig& c, const std::string& k) { return c.options.count(k) > 0; }

const std::string& need(const RunConfig& c, const std::string& k) {
    auto it = c.options.find(k);
    if (it == c.options.end()) throw UsageError(c.command + ": --" + k + " is required");
    return it->second;
}

template <class T>
T number(const RunConfig& c, const std::string& k, T fallback) {
    if (!has(c, k)) return fallback;
    const std::string& s = c.options.at(k);
    std::istringstream is(s);
    T v{};
    if (!(is >> v) || !is.eof()) throw UsageError("--" + k + ": cannot read '" + s + "' as a number");
    return v;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json read_json(const std::string& path) {
    const std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') ++line, col = 1;
            else ++col;
        }
        throw UsageError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
}

BitString read_bits(const std::string& path, bool hex) {
    std::string s;
    for (char ch : read_text(path))
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    return hex ? BitString::parse_hex(s) : BitString::parse_binary(s);
}

json constants() {
    return json{{"domain_cap_bits", N_MAX},
                {"extractor_family", "poly-hash-lhl"},
                {"field_modulus", "least irreducible polynomial per degree"},
                {"rng", "counter-based splitmix64, one recorded seed"}};
}

// ---------------------------------------------------------------- commands

RunResult plan_nipm_cmd(const RunConfig& c) {
    NipmRequest q;
    q.L = number<std::size_t>(c, "L", 0);
    q.ell = number<std::size_t>(c, "ell", 0);
    q.m = number<std::size_t>(c, "m", 0);
    if (!q.L || !q.ell || !q.m) throw UsageError("params plan-nipm: --L, --ell and --m are required");
    q.t = number<std::size_t>(c, "t", q.t);
    q.eps = number<double>(c, "eps", q.eps);
    q.d_def = number<std::size_t>(c, "d-def", q.d_def);
    q.c = number<double>(c, "c", q.c);
    q.c_prime = number<double>(c, "c-prime", q.c_prime);
    q.c_seed = number<double>(c, "c-seed", q.c_seed);
    q.floor = number<unsigned>(c, "floor", q.floor);
    const NipmParams p = plan_nipm(q);
    RunResult r;
    r.stdout_text = schedule_table(p);
    r.report = json{{"params", p}, {"pass", true}};
    if (has(c, "out")) std::ofstream(c.options.at("out")) << json(p).dump(2) << '\n';
    return r;
}

RunResult plan_nmext_cmd(const RunConfig& c) {
    NmRequest q;
    q.n = number<std::size_t>(c, "n", 0);
    q.k = number<double>(c, "k", 0);
    if (!q.n || q.k <= 0) throw UsageError("params plan-nmext: --n and --k are required");
    q.eps_out = number<double>(c, "eps", q.eps_out);
    q.t = number<std::size_t>(c, "t", q.t);
    if (has(c, "mode")) q.mode = parse_merger_mode(c.options.at("mode"));
    q.C = number<double>(c, "C", q.C);
    q.c_adv = number<double>(c, "c-adv", q.c_adv);
    q.C_adv = number<double>(c, "C-adv", q.C_adv);
    q.C_ff = number<double>(c, "C-ff", q.C_ff);
    q.delta = number<double>(c, "delta", q.delta);
    q.c = number<double>(c, "c", q.c);
    q.c_seed = number<double>(c, "c-seed", q.c_seed);
    q.floor = number<unsigned>(c, "floor", q.floor);
    const NmExtParams p = plan_params(q);
    RunResult r;
    r.stdout_text = nmext_table(p);
    r.report = json{{"params", p}, {"pass", true}};
    if (has(c, "out")) std::ofstream(c.options.at("out")) << json(p).dump(2) << '\n';
    return r;
}

RunResult preset_cmd(const RunConfig& c) {
    const std::string& name = need(c, "name");
    json j;
    if (name == "nmext-micro") j = desk_nmext(nmx_micro_spec());
    else if (name == "pa") j = pamp_default_spec();
    else if (name == "multisource") j = MultiSpec{};
    else throw UsageError("params preset: unknown preset '" + name + "' (nmext-micro, pa, multisource)");
    RunResult r;
    r.stdout_text = j.dump(2) + "\n";
    if (has(c, "out")) std::ofstream(c.options.at("out")) << r.stdout_text;
    return r;
}

RunResult nmext_eval_cmd(const RunConfig& c) {
    if (c.params_path.empty()) throw UsageError("nmext eval: --params is required");
    const bool hex = has(c, "hex");
    const NmExtParams p = nmext_from_json(read_json(c.params_path));
    const BitString x = read_bits(need(c, "x-file"), hex), y = read_bits(need(c, "y-file"), hex);
    const BitString z = t_nm_ext(x, y, p);
    RunResult r;
    const std::string text = hex && z.size() % 4 == 0 ? z.to_hex() : z.to_binary();
    r.stdout_text = text + "\n";
    r.report = json{{"output", text}, {"m", z.size()}, {"pass", true}};
    return r;
}

RunResult verify_suite_cmd(const RunConfig& c) {
    const std::string& module = need(c, "module");
    json rep;
    if (module == "sext") {
        SextSuiteConfig s;
        s.seed = c.seed;
        if (c.trials) s.sources = c.trials;
        rep = sext_suite(s);
    } else if (module == "nipm" || module == "ipm") {
        MergerSuiteConfig s;
        s.seed = c.seed;
        s.tampered = module == "nipm";
        s.shared = module == "ipm";
        s.instances = c.trials ? c.trials : (module == "nipm" ? 7 : 4);
        rep = merger_suite(s);
    } else if (module == "cbreak") {
        CbreakSuiteConfig s;
        s.seed = c.seed;
        if (c.trials) s.adv_sources = c.trials;
        rep = cbreak_suite(s);
    } else if (module == "nmx") {
        NmxSuiteConfig s;
        s.seed = c.seed;
        if (c.trials) s.trials = c.trials;
        rep = nmx_suite(s);
    } else {
        throw UsageError("verify suite: unknown module '" + module + "' (sext, nipm, ipm, cbreak, nmx)");
    }
    RunResult r;
    r.report = rep;
    r.stdout_text = std::string(rep.at("pass").get<bool>() ? "PASS" : "FAIL") + " verify suite " + module + "\n";
    return r;
}

Adversary load_adversary(const std::string& spec, const PampParams& p) {
    if (spec.size() > 5 && spec.compare(spec.size() - 5, 5, ".json") == 0) return table_adversary(read_json(spec), p);
    return named_adversary(spec);
}

RunResult pa_simulate_cmd(const RunConfig& c) {
    const PampSpec spec = c.params_path.empty() ? pamp_default_spec() : read_json(c.params_path).get<PampSpec>();
    const PampParams p = build_pamp(spec);
    const Adversary adv = load_adversary(need(c, "adversary"), p);
    const SubcubeSource src = make_subcube(p.n, static_cast<std::size_t>(p.k), spec.source_seed);
    std::vector<Transcript> keep;
    const bool dump = has(c, "transcripts");
    json rep = pamp_run(p, src, adv, c.trials ? c.trials : 1000, c.seed, dump ? &keep : nullptr);
    if (dump) {
        std::ofstream out(c.options.at("transcripts"));
        if (!out) throw UsageError("cannot write " + c.options.at("transcripts"));
        for (const auto& t : keep) out << t.to_json().dump() << '\n';
    }
    rep["params"] = spec;
    rep["protocol"] = p;
    RunResult r;
    r.report = rep;
    const auto& s = rep.at("report");
    std::ostringstream os;
    os << (rep.at("pass").get<bool>() ? "PASS" : "FAIL") << " pa simulate " << adv.name << ": trials=" << s.at("trials")
       << " accept_rate=" << s.at("accept_rate") << " success_rate=" << s.at("success_rate") << '\n';
    r.stdout_text = os.str();
    return r;
}

RunResult multisource_cmd(const RunConfig& c) {
    const MultiSpec spec = c.params_path.empty() ? MultiSpec{} : read_json(c.params_path).get<MultiSpec>();
    RunResult r;
    r.report = multi_suite(spec, c.trials ? c.trials : 2000, c.seed);
    const auto& s = r.report.at("report");
    std::ostringstream os;
    os << (r.report.at("pass").get<bool>() ? "PASS" : "FAIL") << " multisource run: bias=" << s.at("bias")
       << " exact=" << s.at("exact_bias") << " ci99=" << s.at("ci99") << '\n';
    r.stdout_text = os.str();
    return r;
}

void dump_fixtures(const json& rep, std::ostream& err) {
    std::vector<const json*> stack{&rep};
    while (!stack.empty()) {
        const json* j = stack.back();
        stack.pop_back();
        if (!j->is_object()) continue;
        for (auto it = j->begin(); it != j->end(); ++it) {
            if ((it.key() == "fixture" || it.key() == "fixtures") && !it.value().empty()) err << it.value().dump() << '\n';
            else if (it.value().is_object()) stack.push_back(&it.value());
        }
    }
}

}  // namespace

json RunConfig::to_json() const {
    return json{{"command", command}, {"params", params_path}, {"seed", seed},       {"trials", trials},
                {"output", output_path}, {"format", format},   {"options", options}};
}

RunResult execute(const RunConfig& c) {
    if (c.format != "json" && c.format != "csv") throw UsageError("--format must be json or csv");
    RunResult r;
    if (c.command == "params plan-nipm") r = plan_nipm_cmd(c);
    else if (c.command == "params plan-nmext") r = plan_nmext_cmd(c);
    else if (c.command == "params preset") r = preset_cmd(c);
    else if (c.command == "nmext eval") r = nmext_eval_cmd(c);
    else if (c.command == "verify suite") r = verify_suite_cmd(c);
    else if (c.command == "pa simulate") r = pa_simulate_cmd(c);
    else if (c.command == "multisource run") r = multisource_cmd(c);
    else throw UsageError("unknown command '" + c.command + "'");
    if (!r.report.is_null()) {
        const bool pass = r.report.value("pass", true);
        r.status = pass ? kExitOk : kExitFail;
        r.report = json{{"schema", kSchema}, {"config", c.to_json()}, {"seed", c.seed},   {"constants", constants()},
                        {"result", r.report}, {"pass", pass}};
    }
    return r;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"nmlab: non-malleable extractor toolkit"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string seed_text = "1";
    std::map<std::string, std::string> store;
    std::vector<std::pair<CLI::Option*, std::string>> flags;

    auto common = [&](CLI::App* sub, bool params, bool trials) {
        if (params) sub->add_option("--params", cfg.params_path, "parameter file (JSON)");
        if (trials) sub->add_option("--trials", cfg.trials, "trial or instance count");
        sub->add_option("--seed", seed_text, "64-bit randomness seed, recorded in the report");
        sub->add_option("--report", cfg.output_path, "write the JSON (or CSV) report here");
        sub->add_option("--format", cfg.format, "report format: json or csv");
    };
    auto opt = [&](CLI::App* sub, const std::string& name, const std::string& help) {
        flags.emplace_back(sub->add_option("--" + name, store[name], help), name);
    };
    auto flag = [&](CLI::App* sub, const std::string& name, const std::string& help) {
        flags.emplace_back(sub->add_flag("--" + name, help), name);
    };

    auto* params = app.add_subcommand("params", "parameter planners")->require_subcommand(1);
    auto* pn = params->add_subcommand("plan-nipm", "plan a recursive merger schedule");
    for (const char* k : {"L", "ell", "t", "m", "eps", "d-def", "c", "c-prime", "c-seed", "floor", "out"}) opt(pn, k, k);
    common(pn, false, false);
    auto* px = params->add_subcommand("plan-nmext", "plan the non-malleable extractor");
    for (const char* k : {"n", "k", "eps", "t", "mode", "C", "c-adv", "C-adv", "C-ff", "delta", "c", "c-seed", "floor", "out"})
        opt(px, k, k);
    common(px, false, false);
    auto* pp = params->add_subcommand("preset", "print a shipped parameter file");
    opt(pp, "name", "nmext-micro, pa or multisource");
    opt(pp, "out", "also write it here");
    common(pp, false, false);

    auto* ne = app.add_subcommand("nmext", "evaluate the extractor")->require_subcommand(1);
    auto* nev = ne->add_subcommand("eval", "nm_ext(x, y) for x and y read from files");
    opt(nev, "x-file", "source bits");
    opt(nev, "y-file", "seed bits");
    flag(nev, "hex", "files hold hex digits instead of 0/1");
    common(nev, true, false);

    auto* ve = app.add_subcommand("verify", "oracle suites")->require_subcommand(1);
    auto* vs = ve->add_subcommand("suite", "run one module's suite on shipped defaults");
    opt(vs, "module", "sext, nipm, ipm, cbreak or nmx");
    common(vs, false, true);

    auto* pa = app.add_subcommand("pa", "privacy amplification")->require_subcommand(1);
    auto* ps = pa->add_subcommand("simulate", "run the two-round protocol against one adversary");
    opt(ps, "adversary", "passive, flip1, flip2, replace, random or a table .json");
    opt(ps, "transcripts", "dump transcripts as JSON lines");
    common(ps, true, true);

    auto* ms = app.add_subcommand("multisource", "multi-source extraction")->require_subcommand(1);
    auto* mr = ms->add_subcommand("run", "majority over the reduced bits");
    common(mr, true, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    for (auto* top : app.get_subcommands())
        for (auto* sub : top->get_subcommands()) cfg.command = top->get_name() + " " + sub->get_name();
    for (const auto& [o, name] : flags)
        if (o->count() > 0) cfg.options[name] = store[name];

    try {
        std::size_t used = 0;
        cfg.seed = std::stoull(seed_text, &used, 0);
        if (used != seed_text.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        err << "error: --seed: cannot read '" << seed_text << "' as a 64-bit integer\n";
        return kExitUsage;
    }

    try {
        RunResult r = execute(cfg);
        out << r.stdout_text;
        if (!r.report.is_null() && !cfg.output_path.empty()) {
            std::ofstream f(cfg.output_path);
            if (!f) throw UsageError("cannot write " + cfg.output_path);
            const json& res = r.report.at("result");
            if (cfg.format == "csv") f << rows_to_csv(res.contains("rows") ? res.at("rows") : json::array({res}));
            else f << r.report.dump(2) << '\n';
        }
        if (r.status == kExitFail) dump_fixtures(r.report, err);
        return r.status;
    } catch (const ParameterError& e) {
        err << "error: constraint " << e.what() << '\n';
    } catch (const json::exception& e) {
        err << "error: params: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return kExitUsage;
}

}  // namespace nmlab
