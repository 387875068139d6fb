#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tel/tel.h"

namespace tel::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A failed C API call, or a failed check such as verification.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LedgerDeleter {
    void operator()(tel_ledger* l) const { tel_ledger_free(l); }
};
struct SchemaDeleter {
    void operator()(tel_schema* s) const { tel_schema_free(s); }
};
using Ledger = std::unique_ptr<tel_ledger, LedgerDeleter>;
using Schema = std::unique_ptr<tel_schema, SchemaDeleter>;

void check(tel_status status) {
    if (status != TEL_OK) throw DomainError(tel_last_error());
}

std::string take(char* s) {
    std::string out(s ? s : "");
    tel_string_free(s);
    return out;
}

json take_json(char* s) { return json::parse(take(s)); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write " + path);
    out << content;
    if (!out.flush()) throw DomainError("write failed for " + path);
}

json read_json_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw DomainError(path + ": " + e.what());
    }
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

struct Options {
    std::string command;
    std::string format = "json";
    std::vector<std::string> ledgers;
    std::vector<std::string> owners;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string method;
    double min_support = 0.05;
    double min_confidence = 0.6;
    std::optional<std::size_t> k;
    double eps = 0.5;
    std::size_t min_pts = 5;
    std::optional<std::size_t> trees;
    std::optional<std::size_t> subsample;
    std::optional<double> threshold;
    std::optional<double> test_fraction;
    std::optional<double> horizon;
    std::string input;
    std::string mapping;
    std::string party;
    std::string record;
    std::string rules;
    std::string schema;
    std::string features;
    std::string target;
    std::string matrix;
    std::string transcript;
    std::string predicate = "net_balance_zero";
    std::optional<std::int64_t> limit;
    std::string at;
};

class Runner {
public:
    Runner(Options o, std::ostream& out) : o_(std::move(o)), out_(out) {}

    int run() {
        const auto start = std::chrono::steady_clock::now();
        check_output_path();
        const std::string& c = o_.command;
        int code = kExitOk;
        if (c == "init") code = init();
        else if (c == "record") code = record();
        else if (c == "verify") code = verify();
        else if (c == "ingest") code = ingest();
        else if (c == "reconcile") code = reconcile();
        else if (c == "encode") code = encode();
        else if (c == "train") code = train();
        else if (c == "detect") code = detect();
        else if (c == "cluster") code = cluster();
        else if (c == "mine") code = mine();
        else if (c == "forecast") code = forecast();
        else if (c == "audit-mpc") code = audit();
        else if (c == "attest") code = attest();
        const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);

        json report{{"command", c}, {"config", config_}, {"inputs", inputs_}, {"result", result_}};
        report["timing"] = {{"elapsed_ms", elapsed.count()}};
        if (o_.format == "text") {
            write_text(report);
        } else {
            out_ << report.dump(2) << '\n';
        }
        return code;
    }

private:
    // -------------------------------------------------------------- helpers

    void check_output_path() {
        if (o_.out.empty()) return;
        std::vector<std::string> in = o_.ledgers;
        for (const auto* p : {&o_.input, &o_.mapping, &o_.record, &o_.rules, &o_.schema, &o_.features,
                              &o_.transcript}) {
            if (!p->empty()) in.push_back(*p);
        }
        if (!o_.matrix.empty()) in.push_back(o_.matrix);
        const fs::path target = fs::weakly_canonical(o_.out);
        for (const auto& p : in) {
            if (fs::weakly_canonical(p) == target) throw UsageError("--out must differ from every input path");
        }
        if (!o_.matrix.empty() && fs::weakly_canonical(o_.matrix) == target) {
            throw UsageError("--matrix must differ from --out");
        }
    }

    void note_input(const std::string& path) {
        char* hex = nullptr;
        check(tel_sha256_file(path.c_str(), &hex));
        inputs_.push_back({{"path", path}, {"sha256", take(hex)}});
    }

    void require_out() {
        if (o_.out.empty()) throw UsageError(o_.command + " needs --out");
    }

    std::uint64_t require_seed() {
        if (!o_.seed) throw UsageError(o_.command + " needs --seed");
        config_["seed"] = *o_.seed;
        return *o_.seed;
    }

    std::string owner_for(std::size_t i) const {
        if (i < o_.owners.size()) return o_.owners[i];
        return stem_of(o_.ledgers[i]);
    }

    Ledger load_ledger(std::size_t i) {
        note_input(o_.ledgers[i]);
        tel_ledger* l = nullptr;
        check(tel_ledger_load(o_.ledgers[i].c_str(), owner_for(i).c_str(), &l));
        return Ledger(l);
    }

    Ledger single_ledger() {
        if (o_.ledgers.size() != 1) throw UsageError(o_.command + " needs exactly one --ledger");
        config_["ledger"] = o_.ledgers[0];
        return load_ledger(0);
    }

    Ledger optional_ledger(const std::string& fallback_owner) {
        if (o_.ledgers.size() > 1) throw UsageError(o_.command + " takes at most one --ledger");
        if (o_.ledgers.empty()) {
            tel_ledger* l = nullptr;
            check(tel_ledger_create(fallback_owner.c_str(), &l));
            return Ledger(l);
        }
        config_["ledger"] = o_.ledgers[0];
        return load_ledger(0);
    }

    void save(const tel_ledger* l, const std::string& path) { check(tel_ledger_save(l, path.c_str())); }

    json verify_json(const tel_ledger* l) {
        char* s = nullptr;
        check(tel_ledger_verify(l, &s));
        return take_json(s);
    }

    std::size_t size_of(const tel_ledger* l) {
        std::size_t n = 0;
        check(tel_ledger_size(l, &n));
        return n;
    }

    // A fitted schema from --schema, or one fitted on the ledger from
    // --features/--target (default roles otherwise).
    Schema schema_for(const tel_ledger* l) {
        tel_schema* s = nullptr;
        if (!o_.schema.empty()) {
            if (!o_.features.empty() || !o_.target.empty()) {
                throw UsageError("--schema cannot be combined with --features or --target");
            }
            note_input(o_.schema);
            config_["schema"] = o_.schema;
            json doc = read_json_file(o_.schema);
            if (doc.contains("schema") && doc.contains("model")) doc = doc["schema"];  // a model file
            check(tel_schema_from_json(doc.dump().c_str(), &s));
            return Schema(s);
        }
        json cfg = json::object();
        if (!o_.features.empty()) {
            note_input(o_.features);
            config_["features"] = o_.features;
            cfg = read_json_file(o_.features);
        }
        if (!o_.target.empty()) {
            cfg["target"] = o_.target;
            config_["target"] = o_.target;
        }
        check(tel_schema_fit(l, cfg.dump().c_str(), &s));
        return Schema(s);
    }

    std::string method_or(const std::string& fallback, std::initializer_list<const char*> allowed) {
        const std::string m = o_.method.empty() ? fallback : o_.method;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return m == a; })) {
            throw UsageError("--method " + m + " is not valid for " + o_.command);
        }
        config_["method"] = m;
        return m;
    }

    // ------------------------------------------------------------- commands

    int init() {
        require_out();
        if (fs::exists(o_.out)) throw DomainError(o_.out + " already exists");
        write_file(o_.out, "");
        config_["out"] = o_.out;
        result_ = {{"path", o_.out}, {"records", 0}};
        return kExitOk;
    }

    int record() {
        require_out();
        if (o_.record.empty() && o_.rules.empty()) throw UsageError("record needs --record or --rules");
        Ledger l = optional_ledger(o_.owners.empty() ? "shared" : o_.owners[0]);
        config_["out"] = o_.out;
        std::size_t appended = 0;
        if (!o_.record.empty()) {
            note_input(o_.record);
            config_["record"] = o_.record;
            for (const auto& doc : record_documents(read_file(o_.record))) {
                check(tel_ledger_append_json(l.get(), doc.c_str(), nullptr));
                ++appended;
            }
        }
        json settled = json::array();
        if (!o_.rules.empty()) {
            note_input(o_.rules);
            config_["rules"] = o_.rules;
            char* s = nullptr;
            check(tel_settle(l.get(), read_file(o_.rules).c_str(), &s));
            for (const auto& r : take_json(s)) settled.push_back(r["third"]["reference_key"]);
        }
        save(l.get(), o_.out);
        result_ = {{"appended", appended}, {"settlements", settled}, {"size", size_of(l.get())}};
        return kExitOk;
    }

    // One JSON object, an array of objects, or JSON lines.
    static std::vector<std::string> record_documents(const std::string& text) {
        std::vector<std::string> docs;
        try {
            const json j = json::parse(text);
            if (j.is_array()) {
                for (const auto& e : j) docs.push_back(e.dump());
            } else {
                docs.push_back(j.dump());
            }
            return docs;
        } catch (const json::exception&) {
        }
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) docs.push_back(line);
        }
        return docs;
    }

    int verify() {
        Ledger l = single_ledger();
        result_ = verify_json(l.get());
        result_["size"] = size_of(l.get());
        return result_["ok"].get<bool>() ? kExitOk : kExitDomainFailure;
    }

    int ingest() {
        require_out();
        if (o_.input.empty()) throw UsageError("ingest needs --input");
        const std::string owner = !o_.party.empty() ? o_.party : (o_.owners.empty() ? "shared" : o_.owners[0]);
        Ledger l = optional_ledger(owner);
        note_input(o_.input);
        config_["input"] = o_.input;
        config_["out"] = o_.out;
        std::string options;
        if (!o_.mapping.empty()) {
            note_input(o_.mapping);
            config_["mapping"] = o_.mapping;
            options = read_file(o_.mapping);
        }
        char* s = nullptr;
        check(tel_ingest_file(l.get(), o_.input.c_str(), options.empty() ? nullptr : options.c_str(), &s));
        result_ = {{"ingest", take_json(s)}};
        if (!o_.party.empty()) {
            config_["party"] = o_.party;
            tel_ledger* view = nullptr;
            check(tel_ledger_party_view(l.get(), o_.party.c_str(), &view));
            l.reset(view);
        }
        save(l.get(), o_.out);
        result_["size"] = size_of(l.get());
        return kExitOk;
    }

    int reconcile() {
        if (o_.ledgers.size() != 2) throw UsageError("reconcile needs exactly two --ledger paths");
        config_["ledgers"] = o_.ledgers;
        Ledger a = load_ledger(0);
        Ledger b = load_ledger(1);
        char* s = nullptr;
        check(tel_reconcile(a.get(), b.get(), &s));
        result_ = take_json(s);
        if (!o_.out.empty()) {
            config_["out"] = o_.out;
            write_file(o_.out, result_.dump(2) + "\n");
        }
        const json& summary = result_["summary"];
        const bool clean = summary["amount_mismatch"] == 0 && summary["metadata_divergence"] == 0 &&
                           summary["unmatched"] == 0;
        return clean ? kExitOk : kExitDomainFailure;
    }

    int encode() {
        Ledger l = single_ledger();
        Schema schema = schema_for(l.get());
        char* s = nullptr;
        check(tel_schema_to_json(schema.get(), &s));
        const json schema_doc = take_json(s);
        check(tel_encode(l.get(), schema.get(), &s));
        const json matrix = take_json(s);
        if (!o_.out.empty()) {
            config_["out"] = o_.out;
            write_file(o_.out, schema_doc.dump(2) + "\n");
        }
        if (!o_.matrix.empty()) {
            config_["matrix"] = o_.matrix;
            write_file(o_.matrix, matrix.dump() + "\n");
        }
        result_ = {{"columns", matrix["columns"]},
                   {"width", matrix["columns"].size()},
                   {"rows", matrix["rows"].size()},
                   {"has_target", !matrix["target"].is_null()},
                   {"dropped_constant", schema_doc.value("dropped_constant", json::array())}};
        return kExitOk;
    }

    int train() {
        Ledger l = single_ledger();
        const std::string method = method_or("logistic", {"logistic", "tree"});
        json options{{"method", method}, {"seed", require_seed()}};
        if (o_.test_fraction) {
            options["test_fraction"] = *o_.test_fraction;
            config_["test_fraction"] = *o_.test_fraction;
        }
        Schema schema = schema_for(l.get());
        char* s = nullptr;
        check(tel_train(l.get(), schema.get(), options.dump().c_str(), &s));
        result_ = take_json(s);
        if (!o_.out.empty()) {
            config_["out"] = o_.out;
            check(tel_schema_to_json(schema.get(), &s));
            write_file(o_.out, json{{"schema", take_json(s)}, {"model", result_["model"]}}.dump(2) + "\n");
        }
        return kExitOk;
    }

    int detect() {
        Ledger l = single_ledger();
        const std::string method = method_or("iforest", {"iforest", "lof"});
        json options{{"method", method}};
        if (method == "iforest") {
            options["seed"] = require_seed();
            if (o_.trees) options["trees"] = *o_.trees;
            if (o_.subsample) options["subsample"] = *o_.subsample;
        } else {
            if (o_.k) options["k"] = *o_.k;
        }
        if (o_.threshold) options["threshold"] = *o_.threshold;
        config_["options"] = options;
        Schema schema = schema_for(l.get());
        char* s = nullptr;
        check(tel_detect(l.get(), schema.get(), options.dump().c_str(), &s));
        result_ = take_json(s);
        if (!o_.out.empty()) {
            config_["out"] = o_.out;
            write_file(o_.out, result_.dump(2) + "\n");
        }
        return kExitOk;
    }

    int cluster() {
        Ledger l = single_ledger();
        const std::string method = method_or("kmeans", {"kmeans", "dbscan"});
        json options{{"method", method}};
        if (method == "kmeans") {
            options["seed"] = require_seed();
            options["k"] = o_.k.value_or(2);
        } else {
            options["eps"] = o_.eps;
            options["min_pts"] = o_.min_pts;
        }
        config_["options"] = options;
        Schema schema = schema_for(l.get());
        char* s = nullptr;
        check(tel_cluster(l.get(), schema.get(), options.dump().c_str(), &s));
        result_ = take_json(s);
        return kExitOk;
    }

    int mine() {
        Ledger l = single_ledger();
        const std::string method = method_or("apriori", {"apriori", "eclat"});
        const json options{{"method", method}, {"min_support", o_.min_support}, {"min_confidence", o_.min_confidence}};
        config_["options"] = options;
        char* s = nullptr;
        check(tel_mine(l.get(), options.dump().c_str(), &s));
        result_ = take_json(s);
        if (!o_.out.empty()) {
            config_["out"] = o_.out;
            write_file(o_.out, result_["rules"].dump(2) + "\n");
        }
        return kExitOk;
    }

    int forecast() {
        Ledger l = single_ledger();
        json options = json::object();
        if (o_.horizon) options["horizon"] = *o_.horizon;
        config_["options"] = options;
        char* s = nullptr;
        check(tel_forecast(l.get(), options.dump().c_str(), &s));
        result_ = take_json(s);
        return kExitOk;
    }

    int audit() {
        if (o_.ledgers.size() < 2) throw UsageError("audit-mpc needs at least two --ledger paths");
        if (!o_.owners.empty() && o_.owners.size() != o_.ledgers.size()) {
            throw UsageError("give one --owner per --ledger, or none");
        }
        const std::uint64_t seed = require_seed();
        std::string predicate = o_.predicate;
        if (o_.limit) {
            if (predicate != "aggregate_below_threshold") {
                throw UsageError("--limit only applies to aggregate_below_threshold");
            }
            predicate += "(" + std::to_string(*o_.limit) + ")";
        }
        config_["ledgers"] = o_.ledgers;
        config_["predicate"] = predicate;
        std::vector<Ledger> chains;
        std::vector<const tel_ledger*> raw;
        std::vector<std::string> owners;
        for (std::size_t i = 0; i < o_.ledgers.size(); ++i) {
            chains.push_back(load_ledger(i));
            raw.push_back(chains.back().get());
            owners.push_back(owner_for(i));
        }
        config_["owners"] = owners;
        char* s = nullptr;
        check(tel_audit_mpc(raw.data(), raw.size(), predicate.c_str(), seed, &s));
        const json transcript = take_json(s);
        check(tel_transcript_hash(transcript.dump().c_str(), &s));
        result_ = {{"transcript", transcript}, {"transcript_hash", take(s)}, {"verdict", transcript["verdict"]}};
        if (!o_.out.empty()) {
            config_["out"] = o_.out;
            write_file(o_.out, transcript.dump(2) + "\n");
        }
        return transcript["verdict"] == "pass" ? kExitOk : kExitDomainFailure;
    }

    int attest() {
        require_out();
        if (o_.transcript.empty()) throw UsageError("attest needs --transcript");
        Ledger l = single_ledger();
        note_input(o_.transcript);
        config_["transcript"] = o_.transcript;
        config_["out"] = o_.out;
        if (!o_.at.empty()) config_["at"] = o_.at;
        char* s = nullptr;
        const std::string transcript = read_file(o_.transcript);
        check(tel_attest(l.get(), transcript.c_str(), o_.at.empty() ? nullptr : o_.at.c_str(), &s));
        const json record = take_json(s);
        save(l.get(), o_.out);
        const json verification = verify_json(l.get());
        result_ = {{"record", record}, {"size", size_of(l.get())}, {"verification", verification}};
        return verification["ok"].get<bool>() ? kExitOk : kExitDomainFailure;
    }

    // ----------------------------------------------------------- text format

    void write_text(const json& report) {
        const json& r = report["result"];
        out_ << "command: " << o_.command << '\n';
        if (config_.contains("seed")) out_ << "seed: " << config_["seed"] << '\n';
        for (const auto& in : inputs_) out_ << "input: " << in["path"].get<std::string>() << " sha256=" << in["sha256"].get<std::string>() << '\n';
        const std::string& c = o_.command;
        if (c == "verify") {
            out_ << "records: " << r["size"] << '\n';
            if (r["ok"].get<bool>()) {
                out_ << "status: ok\n";
            } else {
                out_ << "status: FAILED at index " << r["failing_index"] << " (" << r["reason"].get<std::string>() << ")\n";
            }
        } else if (c == "audit-mpc") {
            out_ << "parties: " << r["transcript"]["parties"].size() << '\n';
            out_ << "predicate: " << r["transcript"]["predicate"].get<std::string>() << '\n';
            for (const auto& v : r["transcript"]["opened_values"]) {
                out_ << "opened " << v["name"].get<std::string>() << ": " << v["signed_value"] << '\n';
            }
            out_ << "transcript_hash: " << r["transcript_hash"].get<std::string>() << '\n';
            out_ << "verdict: " << r["verdict"].get<std::string>() << '\n';
        } else if (c == "reconcile") {
            for (const auto& [k, v] : r["summary"].items()) out_ << k << ": " << v << '\n';
        } else if (c == "detect") {
            out_ << "method: " << r["method"].get<std::string>() << '\n';
            out_ << "flagged: " << r["flagged_count"] << " of " << r["scores"].size() << '\n';
            for (const auto& k : r["flagged_keys"]) out_ << "  " << k.get<std::string>() << '\n';
        } else if (c == "forecast") {
            out_ << "slope: " << r["slope"] << "\nintercept: " << r["intercept"] << "\nprediction at t=" << r["horizon"]
                 << ": " << r["prediction"] << '\n';
        } else if (c == "attest") {
            out_ << "attested: " << r["record"]["third"]["reference_key"].get<std::string>() << '\n';
            out_ << "chain verifies: " << (r["verification"]["ok"].get<bool>() ? "yes" : "no") << '\n';
        } else if (c == "mine") {
            out_ << "itemsets: " << r["itemsets"].size() << "\nrules: " << r["rules"].size() << '\n';
        } else if (c == "cluster") {
            out_ << "clusters: " << r["clusters"] << "\nsilhouette: " << r["silhouette"] << '\n';
        } else if (c == "train") {
            out_ << "train: " << r["train_metrics"].dump() << '\n';
            if (!r["test_metrics"].is_null()) out_ << "test: " << r["test_metrics"].dump() << '\n';
        } else if (c == "ingest") {
            out_ << "accepted: " << r["ingest"]["accepted"] << "\nrejected: " << r["ingest"]["rejected"].size() << '\n';
            for (const auto& row : r["ingest"]["rejected"]) {
                out_ << "  line " << row["line"] << ": " << row["reason"].get<std::string>() << '\n';
            }
        } else {
            for (const auto& [k, v] : r.items()) out_ << k << ": " << v.dump() << '\n';
        }
        out_ << "elapsed_ms: " << report["timing"]["elapsed_ms"] << '\n';
    }

    Options o_;
    std::ostream& out_;
    json config_ = json::object();
    json inputs_ = json::array();
    json result_ = json::object();
};

void add_ledger(CLI::App* sub, Options& o, bool many) {
    auto* opt = sub->add_option("--ledger", o.ledgers, many ? "Ledger JSONL path (repeat per party)" : "Ledger JSONL path");
    if (!many) opt->expected(0, 1);
}

void add_features(CLI::App* sub, Options& o) {
    sub->add_option("--schema", o.schema, "Fitted schema JSON (from encode or train)");
    sub->add_option("--features", o.features, "Feature config JSON: {defaults, roles, target}");
    sub->add_option("--target", o.target, "Label field, or tag:<name>");
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Triple-entry ledger toolkit", "tel"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--out", o.out, "Output path; must differ from every input");
    app.add_option("--seed", o.seed, "Seed for stochastic steps");

    auto* init = app.add_subcommand("init", "Create an empty ledger file");
    (void)init;

    auto* record = app.add_subcommand("record", "Append records and optional settlement rules");
    add_ledger(record, o, false);
    record->add_option("--record", o.record, "Record JSON object, array or JSON lines");
    record->add_option("--rules", o.rules, "Settlement rules JSON");
    record->add_option("--owner", o.owners, "Owner of a new chain");

    auto* verify = app.add_subcommand("verify", "Check hashes, links and invariants");
    add_ledger(verify, o, false);

    auto* ingest = app.add_subcommand("ingest", "Import CSV or JSONL rows into a ledger");
    add_ledger(ingest, o, false);
    ingest->add_option("--input", o.input, "CSV or JSONL source")->required();
    ingest->add_option("--mapping", o.mapping, "Ingest options JSON: {mapping, delimiter, default_currency, tag_separator}");
    ingest->add_option("--party", o.party, "Keep only records naming this party");
    ingest->add_option("--owner", o.owners, "Owner of a new chain");

    auto* reconcile = app.add_subcommand("reconcile", "Compare two party ledgers by reference key");
    add_ledger(reconcile, o, true);

    auto* encode = app.add_subcommand("encode", "Fit a feature schema and encode the ledger");
    add_ledger(encode, o, false);
    add_features(encode, o);
    encode->add_option("--matrix", o.matrix, "Write the encoded matrix JSON here");

    auto* train = app.add_subcommand("train", "Train a classifier on a labelled ledger");
    add_ledger(train, o, false);
    add_features(train, o);
    train->add_option("--method", o.method)->check(CLI::IsMember({"logistic", "tree"}));
    train->add_option("--test-fraction", o.test_fraction, "Held-out share of rows");

    auto* detect = app.add_subcommand("detect", "Score records for anomalies");
    add_ledger(detect, o, false);
    add_features(detect, o);
    detect->add_option("--method", o.method)->check(CLI::IsMember({"iforest", "lof"}));
    detect->add_option("--trees", o.trees);
    detect->add_option("--subsample", o.subsample);
    detect->add_option("--k", o.k, "LOF neighbourhood size");
    detect->add_option("--threshold", o.threshold, "Flag scores at or above this");

    auto* cluster = app.add_subcommand("cluster", "Cluster encoded records");
    add_ledger(cluster, o, false);
    add_features(cluster, o);
    cluster->add_option("--method", o.method)->check(CLI::IsMember({"kmeans", "dbscan"}));
    cluster->add_option("--k", o.k, "Number of clusters");
    cluster->add_option("--eps", o.eps, "DBSCAN radius");
    cluster->add_option("--min-pts", o.min_pts, "DBSCAN core threshold");

    auto* mine = app.add_subcommand("mine", "Frequent itemsets and association rules");
    add_ledger(mine, o, false);
    mine->add_option("--method", o.method)->check(CLI::IsMember({"apriori", "eclat"}));
    mine->add_option("--min-support", o.min_support);
    mine->add_option("--min-confidence", o.min_confidence);

    auto* forecast = app.add_subcommand("forecast", "Linear trend of daily totals");
    add_ledger(forecast, o, false);
    forecast->add_option("--horizon", o.horizon, "Day index to predict");

    auto* audit = app.add_subcommand("audit-mpc", "Simulated multi-party compliance audit");
    add_ledger(audit, o, true);
    audit->add_option("--owner", o.owners, "Party owning each --ledger, in order (default: file stem)");
    audit->add_option("--predicate", o.predicate)
        ->check(CLI::IsMember({"net_balance_zero", "aggregate_below_threshold"}));
    audit->add_option("--limit", o.limit, "Limit for aggregate_below_threshold");

    auto* attest = app.add_subcommand("attest", "Record an audit verdict on a ledger");
    add_ledger(attest, o, false);
    attest->add_option("--owner", o.owners, "Party owning the ledger (default: file stem)");
    attest->add_option("--transcript", o.transcript, "Transcript JSON from audit-mpc")->required();
    attest->add_option("--at", o.at, "Attestation timestamp (RFC 3339)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }
    o.command = app.get_subcommands().front()->get_name();

    try {
        return Runner(std::move(o), out).run();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomainFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomainFailure;
    }
}

}  // namespace tel::cli
