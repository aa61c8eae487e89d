#include "dcop/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace dcop {

namespace {

struct Token {
    std::string text;
    int col = 0;  // 1-based byte offset
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        out.push_back(Token{line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

class Parser {
public:
    explicit Parser(std::istream& in) : in_(in) {}

    DcopInstance run() {
        std::string raw;
        while (std::getline(in_, raw)) {
            ++line_no_;
            std::string line = raw;
            if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

            bool indented = line[0] == ' ' || line[0] == '\t';
            std::vector<Token> toks = tokenize(line);
            if (indented) {
                table_row(toks);
            } else {
                directive(toks);
            }
        }
        flush_table();
        if (!saw_header_) throw SyntaxError(1, 1, "missing 'dcop 1' header");
        inst_.finalize();
        for (std::size_t a = 0; a < inst_.num_agents(); ++a)
            if (inst_.variables_of(static_cast<AgentIndex>(a)).empty())
                throw SemanticError("agent " + inst_.agent_name(static_cast<AgentIndex>(a)) +
                                    " owns no variables");
        return std::move(inst_);
    }

private:
    std::int64_t parse_i64(const Token& t) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || p != t.text.data() + t.text.size())
            throw SyntaxError(line_no_, t.col, "expected integer, got '" + t.text + "'");
        return v;
    }

    Value parse_value(const Token& t) {
        std::int64_t v = parse_i64(t);
        if (v < std::numeric_limits<Value>::min() || v > std::numeric_limits<Value>::max())
            throw SyntaxError(line_no_, t.col, "value out of range: " + t.text);
        return static_cast<Value>(v);
    }

    VarIndex resolve_var(const Token& t) {
        auto idx = inst_.find_variable(t.text);
        if (!idx) throw SemanticError("line " + std::to_string(line_no_) + ": unknown variable " + t.text);
        return *idx;
    }

    void expect_count(const std::vector<Token>& toks, std::size_t n, const char* shape) {
        if (toks.size() != n)
            throw SyntaxError(line_no_, toks[0].col, std::string("expected '") + shape + "'");
    }

    void directive(const std::vector<Token>& toks) {
        flush_table();
        const std::string& head = toks[0].text;
        if (!saw_header_) {
            if (head != "dcop") throw SyntaxError(line_no_, toks[0].col, "expected 'dcop 1' header");
            expect_count(toks, 2, "dcop 1");
            if (toks[1].text != "1")
                throw SyntaxError(line_no_, toks[1].col, "unsupported format version '" + toks[1].text + "'");
            saw_header_ = true;
            return;
        }
        if (head == "dcop") throw SyntaxError(line_no_, toks[0].col, "duplicate header");
        if (head == "name") {
            std::string n;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                if (i > 1) n += ' ';
                n += toks[i].text;
            }
            inst_.set_name(n);
            return;
        }
        if (head == "agent") {
            expect_count(toks, 2, "agent <id>");
            inst_.add_agent(toks[1].text);
            return;
        }
        if (head == "var") {
            expect_count(toks, 5, "var <id> <agent> <low> <high>");
            auto owner = inst_.find_agent(toks[2].text);
            if (!owner)
                throw SemanticError("line " + std::to_string(line_no_) + ": unknown agent " + toks[2].text);
            inst_.add_variable(toks[1].text, *owner, parse_value(toks[3]), parse_value(toks[4]));
            return;
        }
        if (head == "con") {
            if (toks.size() < 3) throw SyntaxError(line_no_, toks[0].col, "truncated constraint");
            if (toks[2].text == "table") {
                con_table(toks);
            } else if (toks[2].text == "rule") {
                con_rule(toks);
            } else {
                throw SyntaxError(line_no_, toks[2].col, "expected 'table' or 'rule'");
            }
            return;
        }
        throw SyntaxError(line_no_, toks[0].col, "unknown directive '" + head + "'");
    }

    void con_table(const std::vector<Token>& toks) {
        if (toks.size() < 5) throw SyntaxError(line_no_, toks[0].col, "table constraint needs a default and a scope");
        OpenTable t;
        t.name = toks[1].text;
        if (toks[3].text == "0") {
            t.default_neg_inf = false;
        } else if (toks[3].text == "neginf") {
            t.default_neg_inf = true;
        } else {
            throw SyntaxError(line_no_, toks[3].col, "table default must be '0' or 'neginf'");
        }
        for (std::size_t i = 4; i < toks.size(); ++i) t.scope.push_back(resolve_var(toks[i]));
        open_ = std::move(t);
    }

    void con_rule(const std::vector<Token>& toks) {
        std::vector<VarIndex> scope;
        std::vector<std::int64_t> coeffs;
        std::size_t i = 3;
        bool expect_term = true;
        std::int64_t sign = 1;
        std::optional<RelOp> op;
        while (i < toks.size()) {
            const Token& t = toks[i];
            if (expect_term) {
                auto star = t.text.find('*');
                if (star == std::string::npos || star == 0 || star + 1 == t.text.size())
                    throw SyntaxError(line_no_, t.col, "expected <coeff>*<var>, got '" + t.text + "'");
                Token coeff_tok{t.text.substr(0, star), t.col};
                std::int64_t c = parse_i64(coeff_tok);
                if (sign == -1) {
                    if (c == std::numeric_limits<std::int64_t>::min())
                        throw SyntaxError(line_no_, t.col, "coefficient out of range");
                    c = -c;
                }
                coeffs.push_back(c);
                scope.push_back(resolve_var(Token{t.text.substr(star + 1), t.col + static_cast<int>(star) + 1}));
                expect_term = false;
                ++i;
                continue;
            }
            if (t.text == "+" || t.text == "-") {
                sign = t.text == "+" ? 1 : -1;
                expect_term = true;
                ++i;
                continue;
            }
            op = parse_rel_op(t.text);
            if (!op) throw SyntaxError(line_no_, t.col, "expected '+', '-' or a relational operator");
            ++i;
            break;
        }
        if (scope.empty() || expect_term || !op)
            throw SyntaxError(line_no_, toks.back().col, "truncated rule constraint");
        if (i >= toks.size()) throw SyntaxError(line_no_, toks.back().col, "rule is missing its bound");
        std::int64_t bound = parse_i64(toks[i]);
        ++i;
        std::int64_t satisfied = 0;
        if (i < toks.size()) {
            if (toks[i].text != "util" || i + 1 >= toks.size())
                throw SyntaxError(line_no_, toks[i].col, "expected 'util <utility>'");
            satisfied = parse_i64(toks[i + 1]);
            i += 2;
        }
        if (i != toks.size()) throw SyntaxError(line_no_, toks[i].col, "trailing tokens after rule");
        inst_.add_rule_constraint(toks[1].text, std::move(scope), std::move(coeffs), *op, bound, satisfied);
    }

    void table_row(const std::vector<Token>& toks) {
        if (!open_) throw SyntaxError(line_no_, toks[0].col, "table row outside a table constraint");
        if (toks.size() < 2) throw SyntaxError(line_no_, toks[0].col, "table row needs a utility and a tuple");
        std::int64_t util = parse_i64(toks[0]);
        std::vector<Value> tuple;
        for (std::size_t i = 1; i < toks.size(); ++i) tuple.push_back(parse_value(toks[i]));
        if (tuple.size() != open_->scope.size())
            throw SyntaxError(line_no_, toks[0].col, "row arity does not match the constraint scope");
        open_->rows.emplace_back(std::move(tuple), util);
    }

    void flush_table() {
        if (!open_) return;
        OpenTable t = std::move(*open_);
        open_.reset();
        inst_.add_table_constraint(std::move(t.name), std::move(t.scope), t.default_neg_inf, std::move(t.rows));
    }

    struct OpenTable {
        std::string name;
        std::vector<VarIndex> scope;
        bool default_neg_inf = false;
        std::vector<std::pair<std::vector<Value>, std::int64_t>> rows;
    };

    std::istream& in_;
    DcopInstance inst_;
    std::optional<OpenTable> open_;
    int line_no_ = 0;
    bool saw_header_ = false;
};

}  // namespace

DcopInstance parse_instance(std::istream& in) { return Parser(in).run(); }

DcopInstance parse_instance_string(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_instance(in);
}

DcopInstance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return parse_instance(in);
}

std::string serialize_instance(const DcopInstance& inst) {
    if (!inst.finalized()) throw Error("serialize_instance: instance not finalized");
    std::ostringstream os;
    os << "dcop 1\n";
    if (!inst.name().empty()) os << "name " << inst.name() << "\n";

    for (std::size_t r = 0; r < inst.num_agents(); ++r)
        os << "agent " << inst.agent_name(inst.agent_by_rank(static_cast<int>(r))) << "\n";

    for (std::size_t r = 0; r < inst.num_variables(); ++r) {
        const Variable& v = inst.variable(inst.var_by_rank(static_cast<int>(r)));
        os << "var " << v.name << " " << inst.agent_name(v.owner) << " " << v.low << " " << v.high << "\n";
    }

    std::vector<const Constraint*> cons;
    for (const Constraint& c : inst.constraints()) cons.push_back(&c);
    std::sort(cons.begin(), cons.end(), [](const Constraint* a, const Constraint* b) { return a->name < b->name; });

    for (const Constraint* c : cons) {
        if (c->is_table()) {
            const TableBody& t = c->table();
            os << "con " << c->name << " table " << (t.default_neg_inf ? "neginf" : "0");
            for (VarIndex v : c->scope) os << " " << inst.variable(v).name;
            os << "\n";
            for (const auto& [tuple, util] : t.rows) {
                os << "  " << util;
                for (Value v : tuple) os << " " << v;
                os << "\n";
            }
        } else {
            const RuleBody& r = c->rule();
            os << "con " << c->name << " rule ";
            for (std::size_t i = 0; i < c->scope.size(); ++i) {
                std::int64_t coeff = r.coeffs[i];
                if (i == 0) {
                    os << coeff;
                } else if (coeff < 0 && coeff != std::numeric_limits<std::int64_t>::min()) {
                    os << " - " << -coeff;
                } else {
                    os << " + " << coeff;
                }
                os << "*" << inst.variable(c->scope[i]).name;
            }
            os << " " << rel_op_token(r.op) << " " << r.bound;
            if (r.satisfied_utility != 0) os << " util " << r.satisfied_utility;
            os << "\n";
        }
    }
    return os.str();
}

void save_instance(const DcopInstance& inst, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << serialize_instance(inst);
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace dcop
