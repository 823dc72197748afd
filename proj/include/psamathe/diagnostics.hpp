#pragma once

#include <string>
#include <vector>

namespace psa {

struct Span {
    int line = 0; // 1-based; 0 means "unknown"
    int col = 0;
    int len = 0;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    std::string code; // empty for plain parse errors
    std::string message;
    Span span;
    Severity severity = Severity::Error;
};

// Collects positioned diagnostics for one source. `source` is the display
// name (basename), kept stable so golden files do not depend on paths.
class DiagnosticBag {
public:
    explicit DiagnosticBag(std::string source = "<input>") : source_(std::move(source)) {}

    void error(Span span, std::string message) {
        diags_.push_back({"", std::move(message), span, Severity::Error});
    }
    void error(Span span, std::string code, std::string message) {
        diags_.push_back({std::move(code), std::move(message), span, Severity::Error});
    }

    bool has_errors() const {
        for (const auto& d : diags_)
            if (d.severity == Severity::Error) return true;
        return false;
    }

    const std::vector<Diagnostic>& all() const { return diags_; }
    const std::string& source() const { return source_; }

    std::string render_line(const Diagnostic& d) const {
        std::string out = source_ + ":" + std::to_string(d.span.line) + ":" +
                          std::to_string(d.span.col) + ": " +
                          (d.severity == Severity::Error ? "error" : "warning");
        if (!d.code.empty()) out += "[" + d.code + "]";
        out += ": " + d.message;
        return out;
    }

    std::string render() const {
        std::string out;
        for (const auto& d : diags_) out += render_line(d) + "\n";
        return out;
    }

private:
    std::string source_;
    std::vector<Diagnostic> diags_;
};

} // namespace psa
