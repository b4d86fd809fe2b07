#include "tdgan/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "tdgan/errors.hpp"

namespace tdgan {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

double parse_real(const std::string& v, size_t line, const std::string& key) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ParseError(line, "key '" + key + "': expected a number, got '" + v + "'");
    }
}

uint64_t parse_count(const std::string& v, size_t line, const std::string& key) {
    try {
        size_t pos = 0;
        long long x = std::stoll(v, &pos);
        if (pos != v.size() || x < 0) throw std::invalid_argument("bad");
        return static_cast<uint64_t>(x);
    } catch (const std::exception&) {
        throw ParseError(line, "key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    }
}

std::vector<double> parse_real_list(const std::string& v, size_t line, const std::string& key) {
    std::vector<double> out;
    for (const auto& piece : split(v, ',')) out.push_back(parse_real(trim(piece), line, key));
    if (out.empty()) throw ParseError(line, "key '" + key + "': empty list");
    return out;
}

std::vector<size_t> parse_count_list(const std::string& v, size_t line, const std::string& key) {
    std::vector<size_t> out;
    for (const auto& piece : split(v, ',')) out.push_back(parse_count(trim(piece), line, key));
    if (out.empty()) throw ParseError(line, "key '" + key + "': empty list");
    return out;
}

// one `k = v` pair; throws on anything else
std::pair<std::string, std::string> parse_kv(const std::string& s, size_t line) {
    size_t eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value', got '" + trim(s) + "'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError(line, "missing key before '='");
    return {key, value};
}

struct RawComponent {
    double weight;
    std::vector<double> mu;
    std::vector<double> var;
};

}  // namespace

Scenario parse_scenario(const std::string& text) {
    Scenario s;
    std::map<LabelId, std::vector<RawComponent>> raw_labels;
    struct PendingCenter {
        size_t task;
        std::string name;
        std::map<LabelId, uint64_t> counts;
    };
    std::vector<PendingCenter> pending_centers;

    bool have_scenario_section = false;
    bool have_vocab = false, have_dim = false;
    enum class Section { None, Scenario, Label, Task };
    Section section = Section::None;
    LabelId cur_label = 0;
    TaskSpec* cur_task = nullptr;
    size_t task_counter = 0;
    bool cur_task_has_iterations = false;

    std::istringstream in(text);
    std::string raw;
    size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            std::string header = trim(line.substr(1, line.size() - 2));
            auto words = split(header, ' ');
            if (words.size() == 1 && words[0] == "scenario") {
                if (have_scenario_section) throw ParseError(line_no, "duplicate [scenario] section");
                have_scenario_section = true;
                section = Section::Scenario;
            } else if (words.size() == 2 && words[0] == "label") {
                cur_label = parse_count(trim(words[1]), line_no, "label");
                if (raw_labels.count(cur_label)) throw ParseError(line_no, "duplicate [label " + words[1] + "] section");
                raw_labels[cur_label] = {};
                section = Section::Label;
            } else if (words.size() == 2 && words[0] == "task") {
                uint64_t t = parse_count(trim(words[1]), line_no, "task");
                if (cur_task && !cur_task_has_iterations)
                    throw ConfigError("task " + std::to_string(task_counter) + ": missing key 'iterations'");
                ++task_counter;
                if (t != task_counter)
                    throw ParseError(line_no, "tasks must be numbered consecutively from 1; expected [task " +
                                                  std::to_string(task_counter) + "]");
                s.tasks.emplace_back();
                cur_task = &s.tasks.back();
                cur_task_has_iterations = false;
                section = Section::Task;
            } else {
                throw ParseError(line_no, "unknown section '" + header + "'");
            }
            continue;
        }

        switch (section) {
            case Section::None:
                throw ParseError(line_no, "content before any section header");

            case Section::Scenario: {
                auto [key, value] = parse_kv(line, line_no);
                if (key == "vocab_size") {
                    s.vocab = parse_count(value, line_no, key);
                    have_vocab = true;
                } else if (key == "data_dim") {
                    s.data_dim = parse_count(value, line_no, key);
                    have_dim = true;
                } else if (key == "seed") {
                    s.seed = parse_count(value, line_no, key);
                } else if (key == "noise_dim") {
                    s.hyper.noise_dim = parse_count(value, line_no, key);
                } else if (key == "lambda") {
                    s.hyper.lambda = parse_real(value, line_no, key);
                } else if (key == "lr") {
                    s.hyper.g_adam.lr = parse_real(value, line_no, key);
                    s.hyper.d_adam.lr = s.hyper.g_adam.lr;
                } else if (key == "g_lr") {
                    s.hyper.g_adam.lr = parse_real(value, line_no, key);
                } else if (key == "d_lr") {
                    s.hyper.d_adam.lr = parse_real(value, line_no, key);
                } else if (key == "beta1") {
                    s.hyper.g_adam.beta1 = parse_real(value, line_no, key);
                    s.hyper.d_adam.beta1 = s.hyper.g_adam.beta1;
                } else if (key == "beta2") {
                    s.hyper.g_adam.beta2 = parse_real(value, line_no, key);
                    s.hyper.d_adam.beta2 = s.hyper.g_adam.beta2;
                } else if (key == "eps") {
                    s.hyper.g_adam.eps = parse_real(value, line_no, key);
                    s.hyper.d_adam.eps = s.hyper.g_adam.eps;
                } else if (key == "m") {
                    s.hyper.m = parse_count(value, line_no, key);
                } else if (key == "n") {
                    s.hyper.n = parse_count(value, line_no, key);
                } else if (key == "d_iters") {
                    s.hyper.d_iters = parse_count(value, line_no, key);
                } else if (key == "g_hidden") {
                    s.g_hidden = parse_count_list(value, line_no, key);
                } else if (key == "d_hidden") {
                    s.d_hidden = parse_count_list(value, line_no, key);
                } else if (key == "lr_schedule" || key == "d_lr_schedule") {
                    LrSchedule sched;
                    if (value == "constant")
                        sched = LrSchedule::Constant;
                    else if (value == "linear_half")
                        sched = LrSchedule::LinearHalf;
                    else if (value == "linear")
                        sched = LrSchedule::Linear;
                    else
                        throw ConfigError("key '" + key + "': unknown value '" + value + "'");
                    if (key == "lr_schedule")
                        s.hyper.lr_schedule = sched;
                    else
                        s.hyper.d_lr_schedule = sched;
                } else if (key == "nonsaturating") {
                    if (value == "true" || value == "1")
                        s.hyper.nonsaturating = true;
                    else if (value == "false" || value == "0")
                        s.hyper.nonsaturating = false;
                    else
                        throw ConfigError("key 'nonsaturating': expected true/false");
                } else {
                    throw ConfigError("unknown key '" + key + "' in [scenario]");
                }
                break;
            }

            case Section::Label: {
                auto fields = split(line, ';');
                auto [key0, w] = parse_kv(fields[0], line_no);
                if (key0 != "component")
                    throw ConfigError("unknown key '" + key0 + "' in [label " + std::to_string(cur_label) + "]");
                RawComponent comp;
                comp.weight = parse_real(w, line_no, "component");
                bool have_mu = false, have_var = false;
                for (size_t i = 1; i < fields.size(); ++i) {
                    auto [k, v] = parse_kv(fields[i], line_no);
                    if (k == "mu") {
                        comp.mu = parse_real_list(v, line_no, k);
                        have_mu = true;
                    } else if (k == "var") {
                        comp.var = parse_real_list(v, line_no, k);
                        have_var = true;
                    } else {
                        throw ConfigError("unknown key '" + k + "' on a component line");
                    }
                }
                if (!have_mu || !have_var) throw ConfigError("component line needs both 'mu' and 'var'");
                raw_labels[cur_label].push_back(std::move(comp));
                break;
            }

            case Section::Task: {
                auto fields = split(line, ';');
                auto [key0, v0] = parse_kv(fields[0], line_no);
                if (key0 == "center") {
                    std::string name = v0;
                    if (name.empty()) throw ConfigError("key 'center': empty center name");
                    uint64_t n = 0;
                    bool have_n = false;
                    std::map<LabelId, uint64_t> counts;
                    bool have_labels = false;
                    for (size_t i = 1; i < fields.size(); ++i) {
                        auto [k, v] = parse_kv(fields[i], line_no);
                        if (k == "n") {
                            n = parse_count(v, line_no, k);
                            have_n = true;
                        } else if (k == "labels") {
                            for (const auto& pair : split(v, ',')) {
                                auto bits = split(pair, ':');
                                if (bits.size() != 2)
                                    throw ParseError(line_no, "key 'labels': expected <id>:<count> pairs");
                                LabelId y = parse_count(trim(bits[0]), line_no, "labels");
                                uint64_t c = parse_count(trim(bits[1]), line_no, "labels");
                                counts[y] += c;
                            }
                            have_labels = true;
                        } else {
                            throw ConfigError("unknown key '" + k + "' on a center line");
                        }
                    }
                    if (!have_n || !have_labels) throw ConfigError("center '" + name + "': needs 'n' and 'labels'");
                    uint64_t total = 0;
                    for (const auto& [y, c] : counts) total += c;
                    if (total != n)
                        throw ConfigError("center '" + name + "': key 'n' is " + std::to_string(n) +
                                          " but label counts sum to " + std::to_string(total));
                    // dataset objects are attached after the truth is built
                    pending_centers.push_back({task_counter, name, counts});
                } else if (key0 == "iterations") {
                    cur_task->iterations = parse_count(v0, line_no, key0);
                    cur_task_has_iterations = true;
                } else if (key0 == "lambda") {
                    cur_task->lambda = parse_real(v0, line_no, key0);
                } else if (key0 == "m") {
                    cur_task->m = parse_count(v0, line_no, key0);
                } else if (key0 == "n") {
                    cur_task->n = parse_count(v0, line_no, key0);
                } else if (key0 == "d_iters") {
                    cur_task->d_iters = parse_count(v0, line_no, key0);
                } else {
                    throw ConfigError("unknown key '" + key0 + "' in [task " + std::to_string(task_counter) + "]");
                }
                break;
            }
        }
    }

    if (!have_scenario_section) throw ConfigError("missing [scenario] section");
    if (!have_vocab) throw ConfigError("missing key 'vocab_size'");
    if (!have_dim) throw ConfigError("missing key 'data_dim'");
    if (cur_task && !cur_task_has_iterations)
        throw ConfigError("task " + std::to_string(task_counter) + ": missing key 'iterations'");

    // Assemble the ground truth, then the centers that reference it.
    std::vector<std::vector<CondGaussianMixture::Component>> per_label(s.vocab);
    for (const auto& [y, comps] : raw_labels) {
        if (y >= s.vocab) throw ConfigError("label " + std::to_string(y) + " is outside vocab_size");
        for (const auto& rc : comps) {
            if (rc.mu.size() != s.data_dim || rc.var.size() != s.data_dim)
                throw ConfigError("label " + std::to_string(y) + ": 'mu'/'var' length must equal data_dim");
            per_label[y].push_back({rc.weight, rc.mu, rc.var});
        }
    }
    // Undefined labels get a standard-normal placeholder only if unused;
    // used-but-undefined labels are rejected below.
    std::vector<bool> defined(s.vocab, false);
    for (const auto& [y, comps] : raw_labels) defined[y] = !comps.empty();
    for (size_t y = 0; y < s.vocab; ++y) {
        if (!defined[y]) per_label[y].push_back({1.0, std::vector<double>(s.data_dim, 0.0),
                                                 std::vector<double>(s.data_dim, 1.0)});
    }
    s.truth = std::make_shared<CondGaussianMixture>(s.data_dim, std::move(per_label));

    for (const auto& pc : pending_centers) {
        for (const auto& [y, c] : pc.counts) {
            if (y >= s.vocab) throw ConfigError("center '" + pc.name + "': label " + std::to_string(y) +
                                                " is outside vocab_size");
            if (!defined[y] && c > 0)
                throw ConfigError("center '" + pc.name + "': label " + std::to_string(y) + " has no [label] section");
        }
        s.tasks[pc.task - 1].centers.emplace_back(pc.name, s.truth, pc.counts);
    }

    s.validate();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

namespace {

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "[scenario]\n";
    out << "vocab_size = " << s.vocab << "\n";
    out << "data_dim = " << s.data_dim << "\n";
    out << "seed = " << s.seed << "\n";
    out << "noise_dim = " << s.hyper.noise_dim << "\n";
    out << "lambda = " << fmt_real(s.hyper.lambda) << "\n";
    out << "g_lr = " << fmt_real(s.hyper.g_adam.lr) << "\n";
    out << "d_lr = " << fmt_real(s.hyper.d_adam.lr) << "\n";
    out << "beta1 = " << fmt_real(s.hyper.g_adam.beta1) << "\n";
    out << "beta2 = " << fmt_real(s.hyper.g_adam.beta2) << "\n";
    out << "eps = " << fmt_real(s.hyper.g_adam.eps) << "\n";
    out << "m = " << s.hyper.m << "\n";
    out << "n = " << s.hyper.n << "\n";
    out << "d_iters = " << s.hyper.d_iters << "\n";
    out << "g_hidden = ";
    for (size_t i = 0; i < s.g_hidden.size(); ++i) out << (i ? "," : "") << s.g_hidden[i];
    out << "\nd_hidden = ";
    for (size_t i = 0; i < s.d_hidden.size(); ++i) out << (i ? "," : "") << s.d_hidden[i];
    auto sched_name = [](LrSchedule sched) {
        switch (sched) {
            case LrSchedule::Constant: return "constant";
            case LrSchedule::LinearHalf: return "linear_half";
            case LrSchedule::Linear: return "linear";
        }
        return "constant";
    };
    out << "\nlr_schedule = " << sched_name(s.hyper.lr_schedule) << "\n";
    if (s.hyper.d_lr_schedule) out << "d_lr_schedule = " << sched_name(*s.hyper.d_lr_schedule) << "\n";
    out << "nonsaturating = " << (s.hyper.nonsaturating ? "true" : "false") << "\n";

    for (size_t y = 0; y < s.vocab; ++y) {
        out << "\n[label " << y << "]\n";
        for (const auto& c : s.truth->components(y)) {
            out << "component = " << fmt_real(c.weight) << "; mu = ";
            for (size_t d = 0; d < c.mean.size(); ++d) out << (d ? "," : "") << fmt_real(c.mean[d]);
            out << "; var = ";
            for (size_t d = 0; d < c.var.size(); ++d) out << (d ? "," : "") << fmt_real(c.var[d]);
            out << "\n";
        }
    }

    for (size_t t = 0; t < s.tasks.size(); ++t) {
        const TaskSpec& task = s.tasks[t];
        out << "\n[task " << (t + 1) << "]\n";
        out << "iterations = " << task.iterations << "\n";
        if (task.lambda) out << "lambda = " << fmt_real(*task.lambda) << "\n";
        if (task.m) out << "m = " << *task.m << "\n";
        if (task.n) out << "n = " << *task.n << "\n";
        if (task.d_iters) out << "d_iters = " << *task.d_iters << "\n";
        for (const auto& c : task.centers) {
            out << "center = " << c.center_id() << "; n = " << c.size() << "; labels = ";
            bool first = true;
            for (const auto& [y, cnt] : c.label_counts()) {
                if (cnt == 0) continue;
                out << (first ? "" : ",") << y << ":" << cnt;
                first = false;
            }
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace tdgan
