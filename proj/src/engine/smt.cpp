#include "dfv/engine/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <sstream>

extern char** environ;

namespace dfv::engine {

std::string SExpr::to_string() const
{
    if (is_atom) return atom;
    std::string s = "(";
    for (std::size_t i = 0; i < list.size(); ++i) s += (i ? " " : "") + list[i].to_string();
    return s + ")";
}

namespace {

void skip_ws(const std::string& t, std::size_t& i)
{
    while (i < t.size()) {
        if (std::isspace(static_cast<unsigned char>(t[i]))) {
            ++i;
        } else if (t[i] == ';') {
            while (i < t.size() && t[i] != '\n') ++i;
        } else {
            break;
        }
    }
}

SExpr parse_at(const std::string& t, std::size_t& i)
{
    skip_ws(t, i);
    if (i >= t.size()) throw std::invalid_argument("unexpected end of s-expression");
    SExpr e;
    if (t[i] == '(') {
        e.is_atom = false;
        ++i;
        for (;;) {
            skip_ws(t, i);
            if (i >= t.size()) throw std::invalid_argument("unbalanced s-expression");
            if (t[i] == ')') {
                ++i;
                return e;
            }
            e.list.push_back(parse_at(t, i));
        }
    }
    if (t[i] == ')') throw std::invalid_argument("unexpected ')'");
    if (t[i] == '|') {
        std::size_t j = t.find('|', i + 1);
        if (j == std::string::npos) throw std::invalid_argument("unterminated quoted symbol");
        e.atom = t.substr(i + 1, j - i - 1);
        i = j + 1;
        return e;
    }
    if (t[i] == '"') {
        std::size_t j = i + 1;
        while (j < t.size()) {
            if (t[j] == '"') {
                if (j + 1 < t.size() && t[j + 1] == '"') {
                    j += 2;
                    continue;
                }
                break;
            }
            ++j;
        }
        if (j >= t.size()) throw std::invalid_argument("unterminated string");
        e.atom = t.substr(i, j - i + 1);
        i = j + 1;
        return e;
    }
    std::size_t j = i;
    while (j < t.size() && !std::isspace(static_cast<unsigned char>(t[j])) && t[j] != '(' && t[j] != ')') ++j;
    e.atom = t.substr(i, j - i);
    i = j;
    return e;
}

Rational smt_number(const SExpr& e)
{
    if (e.is_atom) return Rational::parse(e.atom);
    if (e.list.size() == 2 && e.list[0].is_atom && e.list[0].atom == "-") return -smt_number(e.list[1]);
    if (e.list.size() == 3 && e.list[0].is_atom && e.list[0].atom == "/") {
        return smt_number(e.list[1]) / smt_number(e.list[2]);
    }
    throw std::invalid_argument("unsupported value term " + e.to_string());
}

}  // namespace

SExpr parse_sexpr(const std::string& text)
{
    std::size_t i = 0;
    SExpr e = parse_at(text, i);
    skip_ws(text, i);
    if (i != text.size()) throw std::invalid_argument("trailing text after s-expression");
    return e;
}

Value parse_smt_value(const SExpr& e, Type t)
{
    if (t == Type::Bool) {
        if (e.is_atom && (e.atom == "true" || e.atom == "false")) return Value::boolean(e.atom == "true");
        throw std::invalid_argument("expected a boolean, got " + e.to_string());
    }
    Rational r = smt_number(e);
    return t == Type::Int ? Value::integer(r) : Value::real(r);
}

std::vector<std::string> split_command(const std::string& cmd)
{
    std::vector<std::string> out;
    std::istringstream in(cmd);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::vector<std::string> default_solver_command()
{
    if (const char* s = std::getenv("SOLVER_CMD"); s && *s) return split_command(s);
    return {"z3", "-in", "-smt2"};
}

class Solver::Process {
public:
    explicit Process(const std::vector<std::string>& argv)
    {
        static std::once_flag once;
        std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
        if (argv.empty()) throw SolverError("empty solver command");
        int in_pipe[2];
        int out_pipe[2];
        if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0) {
            throw SolverError(std::string("pipe: ") + std::strerror(errno));
        }
        posix_spawn_file_actions_t fa;
        posix_spawn_file_actions_init(&fa);
        posix_spawn_file_actions_adddup2(&fa, in_pipe[0], 0);
        posix_spawn_file_actions_adddup2(&fa, out_pipe[1], 1);
        posix_spawn_file_actions_addopen(&fa, 2, "/dev/null", O_WRONLY, 0);
        std::vector<char*> args;
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        int rc = posix_spawnp(&pid_, args[0], &fa, nullptr, args.data(), environ);
        posix_spawn_file_actions_destroy(&fa);
        ::close(in_pipe[0]);
        ::close(out_pipe[1]);
        to_ = in_pipe[1];
        from_ = out_pipe[0];
        if (rc != 0) {
            pid_ = -1;
            throw SolverError("cannot launch solver '" + argv[0] + "': " + std::strerror(rc));
        }
    }

    ~Process()
    {
        if (to_ >= 0) ::close(to_);
        if (from_ >= 0) ::close(from_);
        if (pid_ > 0) {
            ::kill(pid_, SIGKILL);
            int st = 0;
            ::waitpid(pid_, &st, 0);
        }
    }

    void write(const std::string& s)
    {
        std::size_t off = 0;
        while (off < s.size()) {
            ssize_t n = ::write(to_, s.data() + off, s.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw SolverError("solver closed its input");
            }
            off += static_cast<std::size_t>(n);
        }
    }

    // One complete response: an atom line or a balanced s-expression.
    std::string read(Clock::time_point deadline)
    {
        std::string out;
        int depth = 0;
        bool started = false;
        bool quoted = false;
        bool in_string = false;
        for (;;) {
            while (pos_ < buf_.size()) {
                char c = buf_[pos_++];
                bool ws = std::isspace(static_cast<unsigned char>(c)) != 0;
                if (!started) {
                    if (ws) continue;
                    started = true;
                }
                if (!in_string && !quoted && ws && out.front() != '(') return out;  // atom ends
                out += c;
                if (in_string) {
                    if (c == '"') in_string = false;
                    continue;
                }
                if (quoted) {
                    if (c == '|') quoted = false;
                    continue;
                }
                if (c == '"') {
                    in_string = true;
                } else if (c == '|') {
                    quoted = true;
                } else if (c == '(') {
                    ++depth;
                } else if (c == ')') {
                    if (--depth == 0) return out;
                }
            }
            buf_.clear();
            pos_ = 0;
            auto now = Clock::now();
            if (now >= deadline) throw SolverTimeout("solver timed out");
            auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
            pollfd pfd{from_, POLLIN, 0};
            int pr = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(ms + 1, 1 << 30)));
            if (pr < 0) {
                if (errno == EINTR) continue;
                throw SolverError("poll failed");
            }
            if (pr == 0) throw SolverTimeout("solver timed out");
            char tmp[4096];
            ssize_t n = ::read(from_, tmp, sizeof tmp);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw SolverError("reading from solver failed");
            }
            if (n == 0) {
                if (started && depth == 0) return out;
                throw SolverError("solver exited unexpectedly" + (out.empty() ? std::string() : ": " + out));
            }
            buf_.assign(tmp, static_cast<std::size_t>(n));
        }
    }

private:
    pid_t pid_ = -1;
    int to_ = -1;
    int from_ = -1;
    std::string buf_;
    std::size_t pos_ = 0;
};

Solver::Solver(std::vector<std::string> command, std::string logic, Clock::time_point deadline, bool incremental)
    : command_(std::move(command)), logic_(std::move(logic)), deadline_(deadline), incremental_(incremental)
{
    frames_.emplace_back();
}

Solver::~Solver() = default;

void Solver::ensure_process()
{
    if (proc_) return;
    proc_ = std::make_unique<Process>(command_);
    std::string pre = "(set-option :produce-models true)\n(set-logic " + logic_ + ")\n";
    if (incremental_) {
        for (std::size_t f = 0; f < frames_.size(); ++f) {
            if (f) pre += "(push 1)\n";
            for (const auto& c : frames_[f]) pre += c + "\n";
        }
    }
    proc_->write(pre);
}

void Solver::command(const std::string& text)
{
    frames_.back().push_back(text);
    model_ready_ = false;
    if (incremental_ && proc_) proc_->write(text + "\n");
}

void Solver::push()
{
    frames_.emplace_back();
    model_ready_ = false;
    if (incremental_ && proc_) proc_->write("(push 1)\n");
}

void Solver::pop()
{
    if (frames_.size() <= 1) throw std::logic_error("pop without push");
    frames_.pop_back();
    model_ready_ = false;
    if (incremental_ && proc_) proc_->write("(pop 1)\n");
}

std::string Solver::read_response()
{
    std::string r = proc_->read(deadline_);
    if (r.rfind("(error", 0) == 0) throw SolverError("solver reported " + r);
    return r;
}

Solver::Result Solver::check()
{
    if (Clock::now() >= deadline_) throw SolverTimeout("solver timed out");
    if (!incremental_) {
        proc_.reset();
        ensure_process();
        std::string script;
        for (const auto& f : frames_) {
            for (const auto& c : f) script += c + "\n";
        }
        proc_->write(script);
    } else {
        ensure_process();
    }
    proc_->write("(check-sat)\n");
    std::string r;
    try {
        r = read_response();
    } catch (const SolverTimeout&) {
        proc_.reset();
        throw;
    }
    if (r == "sat") {
        model_ready_ = true;
        return Result::Sat;
    }
    model_ready_ = false;
    if (r == "unsat") return Result::Unsat;
    if (r == "unknown") return Result::Unknown;
    proc_.reset();
    throw SolverError("unexpected solver response '" + r + "'");
}

std::vector<SExpr> Solver::get_values(const std::vector<std::string>& terms)
{
    if (!model_ready_ || !proc_) throw std::logic_error("get_values without a sat model");
    if (terms.empty()) return {};
    std::string q = "(get-value (";
    for (const auto& t : terms) q += t + " ";
    q += "))\n";
    proc_->write(q);
    SExpr e;
    try {
        e = parse_sexpr(read_response());
    } catch (const std::invalid_argument& ex) {
        throw SolverError(std::string("malformed model: ") + ex.what());
    }
    if (e.is_atom || e.list.size() != terms.size()) throw SolverError("model does not match the query");
    std::vector<SExpr> out;
    for (auto& pair : e.list) {
        if (pair.is_atom || pair.list.size() != 2) throw SolverError("malformed model entry " + pair.to_string());
        out.push_back(pair.list[1]);
    }
    return out;
}

}  // namespace dfv::engine
