#include "ugw/cli.hpp"

#include "ugw/bounds.hpp"
#include "ugw/corpus.hpp"
#include "ugw/gw.hpp"
#include "ugw/io.hpp"
#include "ugw/mds.hpp"
#include "ugw/phylo.hpp"
#include "ugw/synth.hpp"
#include "ugw/transport.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>

namespace ugw::cli {

namespace {

namespace fs = std::filesystem;

double parse_order(const std::string& text) {
    if (text == "inf" || text == "Inf" || text == "infinity") return kInf;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !(v >= 1.0))
        throw std::invalid_argument("order must be a number >= 1 or 'inf', got '" + text + "'");
    return v;
}

Json typed_value(const std::string& text) {
    if (text == "true") return true;
    if (text == "false") return false;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (!text.empty() && ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(v)) {
        long long i = 0;
        const auto [iptr, iec] = std::from_chars(text.data(), text.data() + text.size(), i);
        if (iec == std::errc() && iptr == text.data() + text.size()) return i;
        return v;
    }
    return text;
}

std::string config_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
}

// Options that change how a run executes but not what it computes; they
// stay out of the logged config so outputs are identical across them.
bool execution_only(const std::string& name) {
    return name == "threads" || name == "out" || name == "config" || name == "help";
}

/// Inline JSON when the argument starts like JSON, otherwise a file path.
Json json_argument(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && (arg[first] == '[' || arg[first] == '{')) return parse_json(arg);
    return parse_json(read_file(arg));
}

Vector vector_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("mass vector must be a JSON array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ParseError("mass vector entries must be numbers");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

std::vector<fs::path> sorted_files(const std::string& dir, const std::vector<std::string>& extensions) {
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (extensions.empty() || std::find(extensions.begin(), extensions.end(), ext) != extensions.end())
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

struct Globals {
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string config;
    std::string out;
    std::string format = "json";
};

struct FwOptions {
    std::size_t restarts = FwConfig{}.restarts;
    std::size_t iterations = FwConfig{}.iterations;
    std::size_t hitrun_steps = FwConfig{}.hitrun_steps;
    double tol = FwConfig{}.tol_stationarity;
    std::string step_rule = "exact";

    void add_to(CLI::App* sub) {
        sub->add_option("--restarts", restarts, "Frank-Wolfe restarts (first from the product coupling)");
        sub->add_option("--iterations,--iters", iterations, "Frank-Wolfe iterations per restart");
        sub->add_option("--hitrun-steps", hitrun_steps, "hit-and-run jumps between emitted starting couplings");
        sub->add_option("--tol", tol, "stop when the Frank-Wolfe gap falls below this value");
        sub->add_option("--step-rule", step_rule, "exact (line search) or harmonic (2/(k+2))")
            ->check(CLI::IsMember({"exact", "harmonic"}));
    }

    FwConfig config(std::uint64_t seed, unsigned threads) const {
        FwConfig c;
        c.restarts = restarts;
        c.iterations = iterations;
        c.hitrun_steps = hitrun_steps;
        c.tol_stationarity = tol;
        c.step_rule = step_rule == "harmonic" ? StepRule::harmonic : StepRule::exact_line_search;
        c.seed = seed;
        c.threads = threads;
        return c;
    }
};

class Cli {
public:
    Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    int run(const std::vector<std::string>& args);

private:
    void build();
    void apply_config_file(CLI::App* sub);
    Json resolved_config(CLI::App* sub) const;
    void emit_json(Json body);
    void emit_text(const std::string& text);
    bool csv() const { return globals_.format == "csv"; }

    std::ostream& out_;
    std::ostream& err_;
    CLI::App app_{"Ultrametric Gromov-Wasserstein distances, lower bounds and tree-shape tools", "ugw"};
    Globals globals_;
    std::map<CLI::App*, std::function<int()>> handlers_;
    Json config_;

    // Subcommand parameters.
    std::string input_, input2_, kind_ = "auto", newick_, measure_ = "uniform", which_ = "all";
    std::string p_text_ = "1", q_text_ = "1", ground_ = "ultrametric", space_arg_, alpha_, beta_;
    std::string dir_, newick_dir_, matrix_in_;
    std::vector<std::string> inputs_;
    bool unit_edges_ = false, all_trees_ = false, treegram_ = false, classical_ = false, skip_invalid_ = false;
    bool exact_ = false;
    std::size_t k_ = 1, samples_per_block_ = GenSpec{}.samples_per_block, subsample_ = GenSpec{}.subsample;
    std::size_t max_points_ = 7, dim_ = 2;
    double t_ = 0.0;
    FwOptions fw_;
};

void Cli::build() {
    app_.option_defaults()->always_capture_default();
    app_.require_subcommand(1);
    app_.fallthrough();
    app_.add_option("--seed", globals_.seed, "seed of the SplitMix64 generator");
    app_.add_option("--threads", globals_.threads, "worker threads (0 = machine parallelism)");
    app_.add_option("--config", globals_.config, "JSON object of option values; flags override it");
    app_.add_option("--out", globals_.out, "output path (default stdout)");
    app_.add_option("--format", globals_.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* validate_cmd = app_.add_subcommand("validate", "check a space for the ultrametric conditions");
    validate_cmd->add_option("input", input_, "space JSON")->required();
    validate_cmd->add_option("--kind", kind_, "auto (from the file), ultrametric or ultra-dissimilarity");
    handlers_[validate_cmd] = [this] {
        const Json j = parse_json(read_file(input_));
        const UmSpace space = space_from_json(j);
        std::string kind = kind_;
        if (kind == "auto") kind = j.contains("kind") ? j.at("kind").get<std::string>() : "ultrametric";
        const ValidationReport report = validate(space, parse_space_kind(kind));
        Json body;
        body["ok"] = report.ok;
        body["kind"] = to_string(parse_space_kind(kind));
        body["violation_count"] = report.total;
        Json list = Json::array();
        for (const auto& v : report.violations)
            list.push_back(Json{{"kind", v.kind}, {"indices", v.indices}, {"detail", v.detail}});
        body["violations"] = std::move(list);
        emit_json(std::move(body));
        return report.ok ? kOk : kInvalid;
    };

    auto* ingest = app_.add_subcommand("ingest", "convert Newick trees to ultra-dissimilarity spaces");
    ingest->add_option("--newick", newick_, "Newick file")->required();
    ingest->add_flag("--unit-edges", unit_edges_, "set every edge length to 1");
    ingest->add_option("--measure", measure_, "uniform or length-weighted")
        ->check(CLI::IsMember({"uniform", "length-weighted"}));
    ingest->add_flag("--all", all_trees_, "convert every tree of a multi-tree file");
    ingest->add_flag("--treegram", treegram_, "emit the treegram instead of the space");
    handlers_[ingest] = [this] {
        const auto trees = parse_newick_all(read_file(newick_));
        const TipMeasure m = measure_ == "uniform" ? TipMeasure::uniform : TipMeasure::length_weighted;
        auto convert = [&](const PhyloTree& tree) {
            const UmSpace space = tree_shape_space(tree, unit_edges_, m);
            return treegram_ ? dendrogram_to_json(treegram(space))
                             : space_to_json(space, SpaceKind::ultra_dissimilarity);
        };
        if (!all_trees_) {
            emit_json(convert(trees.front()));
            return kOk;
        }
        Json list = Json::array();
        for (const auto& tree : trees) list.push_back(convert(tree));
        emit_json(Json{{"spaces", std::move(list)}});
        return kOk;
    };

    auto* gen = app_.add_subcommand("gen", "sample a random ultrametric measure space");
    gen->add_option("--k", k_, "number of mixture components");
    gen->add_option("--samples-per-block", samples_per_block_, "points drawn per component");
    gen->add_option("--subsample", subsample_, "points kept in the output space");
    handlers_[gen] = [this] {
        const UmSpace space = gen_ultrametric({k_, samples_per_block_, subsample_, globals_.seed});
        emit_json(space_to_json(space));
        return kOk;
    };

    auto* perturb_cmd = app_.add_subcommand("perturb", "perturb a space below level t");
    perturb_cmd->add_option("input", input_, "space JSON")->required();
    perturb_cmd->add_option("--t", t_, "level")->required();
    handlers_[perturb_cmd] = [this] {
        emit_json(space_to_json(perturb(load_space(input_), t_, globals_.seed)));
        return kOk;
    };

    auto* quotient_cmd = app_.add_subcommand("quotient", "weighted quotient at level t");
    quotient_cmd->add_option("input", input_, "space JSON")->required();
    quotient_cmd->add_option("--t", t_, "level")->required();
    handlers_[quotient_cmd] = [this] {
        const UmSpace space = load_space(input_);
        require_valid(space, SpaceKind::ultra_dissimilarity, "quotient");
        const QuotientSpace q = quotient(space, t_);
        Json blocks = Json::array();
        for (const auto& block : q.blocks) {
            Json ids = Json::array();
            for (std::size_t i : block) ids.push_back(space.ids()[i]);
            blocks.push_back(std::move(ids));
        }
        emit_json(Json{{"level", q.level}, {"blocks", std::move(blocks)}, {"space", space_to_json(q.space)}});
        return kOk;
    };

    auto* wass = app_.add_subcommand("wasserstein", "Wasserstein distance on an ultrametric or the half-line");
    wass->add_option("--ground", ground_, "ultrametric, halfline (Lambda_inf) or quantile (Lambda_q)")
        ->check(CLI::IsMember({"ultrametric", "halfline", "quantile"}));
    wass->add_option("--space", space_arg_, "space JSON (ultrametric ground)");
    wass->add_option("--alpha", alpha_, "mass vector or {\"x\",\"m\"} measure; inline JSON or file")->required();
    wass->add_option("--beta", beta_, "mass vector or {\"x\",\"m\"} measure; inline JSON or file")->required();
    wass->add_option("--p", p_text_, "order, a number >= 1 or inf");
    wass->add_option("--q", q_text_, "exponent of Lambda_q for the quantile ground");
    wass->add_flag("--exact", exact_, "also solve the transport problem exactly");
    handlers_[wass] = [this] {
        const double p = parse_order(p_text_);
        Json body;
        body["ground"] = ground_;
        if (ground_ == "ultrametric") {
            if (space_arg_.empty()) throw std::invalid_argument("--space is required for the ultrametric ground");
            const UmSpace space = load_space(space_arg_);
            const Vector a = vector_from_json(json_argument(alpha_));
            const Vector b = vector_from_json(json_argument(beta_));
            body["value"] = w_ultrametric(space, a, b, p);
            if (exact_) {
                if (is_inf(p)) {
                    body["exact"] = exact_ot(space.u(), a, b, OtMode::max).value;
                } else {
                    const Matrix cost = space.u().unaryExpr([p](double v) { return std::pow(v, p); });
                    body["exact"] = std::pow(exact_ot(cost, a, b).value, 1.0 / p);
                }
            }
        } else {
            const ScalarMeasure a = measure_from_json(json_argument(alpha_));
            const ScalarMeasure b = measure_from_json(json_argument(beta_));
            body["value"] = ground_ == "halfline" ? w_halfline(a, b, p) : w_quantile(a, b, p, parse_order(q_text_));
        }
        emit_json(std::move(body));
        return kOk;
    };

    auto* ugw_cmd = app_.add_subcommand("ugw", "Frank-Wolfe upper bound on uGW_p (or dGW_p with --classical)");
    ugw_cmd->add_option("x", input_, "first space JSON")->required();
    ugw_cmd->add_option("y", input2_, "second space JSON")->required();
    ugw_cmd->add_option("--p", p_text_, "finite order >= 1");
    ugw_cmd->add_flag("--classical", classical_, "use |a - b| and the leading 1/2 (dGW_p)");
    fw_.add_to(ugw_cmd);
    handlers_[ugw_cmd] = [this] {
        const FwConfig config = fw_.config(globals_.seed, globals_.threads);
        emit_json(result_to_json(ugw_fw(load_space(input_), load_space(input2_), parse_order(p_text_), config,
                                        classical_ ? CostKind::classical : CostKind::ultra)));
        return kOk;
    };

    auto* inf_cmd = app_.add_subcommand("ugw-inf", "exact uGW_inf by the weighted quotient sweep");
    inf_cmd->add_option("x", input_, "first space JSON")->required();
    inf_cmd->add_option("y", input2_, "second space JSON")->required();
    handlers_[inf_cmd] = [this] {
        emit_json(result_to_json(ugw_inf_exact(load_space(input_), load_space(input2_))));
        return kOk;
    };

    auto* ugh_cmd = app_.add_subcommand("ugh", "exact ultrametric Gromov-Hausdorff distance");
    ugh_cmd->add_option("x", input_, "first space JSON")->required();
    ugh_cmd->add_option("y", input2_, "second space JSON")->required();
    handlers_[ugh_cmd] = [this] {
        emit_json(result_to_json(ugh_exact(load_space(input_), load_space(input2_))));
        return kOk;
    };

    auto* sturm_cmd = app_.add_subcommand("usturm", "Sturm's ultrametric GW distance by enumeration (small spaces)");
    sturm_cmd->add_option("x", input_, "first space JSON")->required();
    sturm_cmd->add_option("y", input2_, "second space JSON")->required();
    sturm_cmd->add_option("--p", p_text_, "order, a number >= 1 or inf");
    sturm_cmd->add_option("--max-points,--max-n", max_points_, "refuse larger spaces");
    handlers_[sturm_cmd] = [this] {
        emit_json(result_to_json(
            usturm_bruteforce(load_space(input_), load_space(input2_), parse_order(p_text_), max_points_)));
        return kOk;
    };

    auto* bounds_cmd = app_.add_subcommand("bounds", "polynomial-time lower bounds");
    bounds_cmd->add_option("x", input_, "first space JSON")->required();
    bounds_cmd->add_option("y", input2_, "second space JSON")->required();
    bounds_cmd->add_option("--p", p_text_, "order, a number >= 1 or inf");
    bounds_cmd->add_option("--which", which_, "all, or a comma-separated subset of uflb,uslb,utlb,flb,slb,tlb");
    handlers_[bounds_cmd] = [this] {
        const std::vector<std::string> known{"uflb", "uslb", "utlb", "flb", "slb", "tlb"};
        std::vector<std::string> wanted;
        if (which_ == "all") {
            wanted = known;
        } else {
            std::string item;
            for (std::size_t k = 0; k <= which_.size(); ++k) {
                if (k == which_.size() || which_[k] == ',') {
                    if (std::find(known.begin(), known.end(), item) == known.end())
                        throw std::invalid_argument("unknown bound '" + item + "'");
                    wanted.push_back(item);
                    item.clear();
                } else {
                    item += which_[k];
                }
            }
        }
        const UmSpace x = load_space(input_), y = load_space(input2_);
        const double p = parse_order(p_text_);
        Json body;
        for (const auto& name : wanted) body[name] = pair_value(x, y, parse_method(name), p, {}, globals_.threads);
        emit_json(std::move(body));
        return kOk;
    };

    auto* matrix_cmd = app_.add_subcommand("matrix", "pairwise matrix of a method over a corpus");
    matrix_cmd->add_option("spaces", inputs_, "space JSON files");
    matrix_cmd->add_option("--dir", dir_, "directory of space JSON files (sorted by name)");
    matrix_cmd->add_option("--newick-dir", newick_dir_, "directory of Newick files (sorted by name)");
    matrix_cmd->add_flag("--unit-edges", unit_edges_, "set every edge length to 1 (Newick input)");
    matrix_cmd->add_option("--which,--method", which_, "ugw-inf, ugh, ugw-fw, uslb, utlb, uflb, slb, tlb or flb")
        ->check(CLI::IsMember({"ugw-inf", "ugh", "ugw-fw", "uslb", "utlb", "uflb", "slb", "tlb", "flb"}));
    matrix_cmd->add_option("--p", p_text_, "order, a number >= 1 or inf");
    matrix_cmd->add_flag("--skip-invalid", skip_invalid_, "drop invalid spaces instead of aborting");
    fw_.add_to(matrix_cmd);
    handlers_[matrix_cmd] = [this] {
        std::vector<CorpusEntry> corpus;
        auto add_space_file = [&](const fs::path& path) {
            corpus.push_back({path.filename().string(), path.stem().string(), load_space(path.string())});
        };
        for (const auto& f : inputs_) add_space_file(f);
        if (!dir_.empty())
            for (const auto& f : sorted_files(dir_, {".json"})) add_space_file(f);
        if (!newick_dir_.empty()) {
            for (const auto& f : sorted_files(newick_dir_, {})) {
                const auto trees = parse_newick_all(read_file(f.string()));
                for (std::size_t k = 0; k < trees.size(); ++k) {
                    const std::string suffix = trees.size() > 1 ? "#" + std::to_string(k) : "";
                    try {
                        corpus.push_back({f.filename().string() + suffix, f.stem().string() + suffix,
                                          tree_shape_space(trees[k], unit_edges_)});
                    } catch (const ValidationError& e) {
                        if (!skip_invalid_) throw ValidationError(f.filename().string() + suffix + ": " + e.what());
                        err_ << "warning: skipping " << f.filename().string() << suffix << ": " << e.what() << "\n";
                    }
                }
            }
        }
        if (which_ == "all") throw std::invalid_argument("matrix needs --which");
        MatrixConfig config;
        config.method = parse_method(which_);
        config.p = parse_order(p_text_);
        config.fw = fw_.config(globals_.seed, 1);
        config.threads = globals_.threads;
        config.skip_invalid = skip_invalid_;
        const CorpusMatrix result = corpus_matrix(corpus, config);
        for (const auto& s : result.skipped) err_ << "warning: skipping " << s << "\n";
        if (csv()) {
            emit_text(write_matrix_csv(result.matrix, "config: " + config_.dump()));
            return kOk;
        }
        emit_json(Json{{"ids", result.matrix.ids},
                       {"matrix", matrix_to_json(result.matrix.values)},
                       {"skipped", result.skipped}});
        return kOk;
    };

    auto* mds_cmd = app_.add_subcommand("mds", "classical multidimensional scaling of a distance matrix");
    mds_cmd->add_option("input", matrix_in_, "matrix as CSV (from matrix --format csv) or JSON")->required();
    mds_cmd->add_option("--dim", dim_, "output dimension");
    handlers_[mds_cmd] = [this] {
        const std::string text = read_file(matrix_in_);
        LabelledMatrix m;
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && text[first] == '{') {
            const Json j = parse_json(text);
            m.values = matrix_from_json(j.at("matrix"));
            m.ids = j.at("ids").get<std::vector<std::string>>();
        } else {
            m = read_matrix_csv(text);
        }
        const MdsResult r = classical_mds(m.values, dim_);
        for (const auto& w : r.warnings) err_ << "warning: " << w << "\n";
        if (csv()) {
            std::vector<std::string> header{"id"};
            for (std::size_t c = 0; c < dim_; ++c) header.push_back("x" + std::to_string(c + 1));
            emit_text(write_table_csv(header, m.ids, r.coordinates, "config: " + config_.dump()));
            return kOk;
        }
        emit_json(Json{{"ids", m.ids},
                       {"coordinates", matrix_to_json(r.coordinates)},
                       {"eigenvalues", std::vector<double>(r.eigenvalues.data(),
                                                           r.eigenvalues.data() + r.eigenvalues.size())},
                       {"warnings", r.warnings}});
        return kOk;
    };
}

void Cli::apply_config_file(CLI::App* sub) {
    if (globals_.config.empty()) return;
    const Json j = parse_json(read_file(globals_.config));
    if (!j.is_object()) throw ParseError("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        std::string name = key;
        std::replace(name.begin(), name.end(), '_', '-');
        CLI::Option* opt = sub->get_option_no_throw("--" + name);
        if (!opt) opt = app_.get_option_no_throw("--" + name);
        if (!opt) opt = sub->get_option_no_throw(name);  // positionals
        if (!opt) throw ValidationError("unknown config key '" + key + "' for " + sub->get_name());
        if (name == "config") throw ValidationError("config files cannot nest");
        if (opt->count() > 0) continue;  // the command line wins
        if (value.is_array()) {
            for (const auto& v : value) opt->add_result(config_text(v));
        } else {
            opt->add_result(config_text(value));
        }
        opt->run_callback();
    }
}

Json Cli::resolved_config(CLI::App* sub) const {
    Json config;
    config["command"] = sub->get_name();
    auto record = [&](const CLI::Option* opt) {
        const std::string name = opt->get_single_name();
        if (execution_only(name)) return;
        const bool flag = opt->get_expected_max() == 0;
        std::vector<std::string> values = opt->results();
        if (values.empty() && !opt->get_default_str().empty()) values = {opt->get_default_str()};
        if (flag) {
            config[name] = !values.empty() && values.back() != "false" && values.back() != "0";
            return;
        }
        if (opt->get_expected_max() > 1) {
            Json list = Json::array();
            if (opt->count() > 0)
                for (const auto& v : values) list.push_back(typed_value(v));
            config[name] = std::move(list);
        } else if (values.empty()) {
            config[name] = nullptr;
        } else {
            config[name] = typed_value(values.back());
        }
    };
    for (const CLI::Option* opt : app_.get_options()) record(opt);
    for (const CLI::Option* opt : sub->get_options()) record(opt);
    return config;
}

void Cli::emit_json(Json body) {
    body["config"] = config_;
    emit_text(body.dump(2) + "\n");
}

void Cli::emit_text(const std::string& text) {
    if (globals_.out.empty() || globals_.out == "-") {
        out_ << text;
        out_.flush();
    } else {
        write_output(globals_.out, text);
    }
}

int Cli::run(const std::vector<std::string>& args) {
    try {
        build();
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app_.parse(std::move(reversed));
        } catch (const CLI::CallForHelp&) {
            out_ << app_.help();
            return kOk;
        } catch (const CLI::CallForAllHelp&) {
            out_ << app_.help("", CLI::AppFormatMode::All);
            return kOk;
        } catch (const CLI::ParseError& e) {
            err_ << "error: " << e.what() << "\n";
            return kInvalid;
        }
        CLI::App* sub = app_.get_subcommands().front();
        apply_config_file(sub);
        config_ = resolved_config(sub);
        return handlers_.at(sub)();
    } catch (const ugw::ParseError& e) {
        err_ << "parse error: " << e.what() << "\n";
        return kParseFailure;
    } catch (const ValidationError& e) {
        err_ << "validation error: " << e.what() << "\n";
        return kInvalid;
    } catch (const RefusalError& e) {
        err_ << "refused: " << e.what() << "\n";
        return kRefused;
    } catch (const CLI::Error& e) {
        err_ << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::invalid_argument& e) {
        err_ << "invalid argument: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        err_ << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Cli cli(out, err);
    return cli.run(args);
}

}  // namespace ugw::cli
