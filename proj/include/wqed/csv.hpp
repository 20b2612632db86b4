#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Small CSV writer: a `# config:` metadata block, a header row, then data
// rows with floats at 9 significant digits.

namespace wqed {

inline std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : path_(path) {
        if (path == "-") {
            out_ = stdout;
        } else {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open output path: " + path);
        }
    }

    void config_line(const std::string& kv) { meta_.push_back(kv); }

    void header(const std::vector<std::string>& cols) {
        std::ostringstream os;
        os << "# config:";
        write_line(os.str());
        for (const auto& m : meta_) write_line("#   " + m);
        std::string h;
        for (size_t i = 0; i < cols.size(); ++i) h += (i ? "," : "") + cols[i];
        write_line(h);
    }

    void row(const std::vector<std::string>& cells) {
        std::string r;
        for (size_t i = 0; i < cells.size(); ++i) r += (i ? "," : "") + cells[i];
        write_line(r);
    }

    void comment(const std::string& text) { write_line("# " + text); }

  private:
    void write_line(const std::string& s) {
        if (out_) {
            std::fputs((s + "\n").c_str(), out_);
        } else {
            file_ << s << "\n";
        }
    }

    std::string path_;
    std::ofstream file_;
    std::FILE* out_ = nullptr;
    std::vector<std::string> meta_;
};

}  // namespace wqed
