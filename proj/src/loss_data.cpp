#include "oprisk/loss_data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "oprisk/format.hpp"

namespace oprisk {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(trim(current));
    return fields;
}

template <typename T>
bool parse_number(const std::string& text, T& value) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc{} && ptr == end;
}

} // namespace

std::vector<LossEvent> read_loss_events(std::istream& in, const ObservationWindow& window) {
    OPRISK_REQUIRE(window.years >= 1, "observation window must span at least one year");
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> problems;
    std::vector<LossEvent> events;

    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
            line.erase(0, 3);
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() != 3 || fields[0] != "cell_id" || fields[1] != "year" ||
                fields[2] != "amount") {
                throw ValidationError("line " + std::to_string(line_no) +
                                      ": expected header 'cell_id,year,amount'");
            }
            continue;
        }
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (fields.size() != 3) {
            problems.push_back(where + "expected 3 fields, found " + std::to_string(fields.size()));
            continue;
        }
        LossEvent e;
        e.cell_id = fields[0];
        if (e.cell_id.empty()) {
            problems.push_back(where + "empty cell_id");
            continue;
        }
        if (!parse_number(fields[1], e.year)) {
            problems.push_back(where + "invalid year '" + fields[1] + "'");
            continue;
        }
        if (!parse_number(fields[2], e.amount) || !std::isfinite(e.amount)) {
            problems.push_back(where + "invalid amount '" + fields[2] + "'");
            continue;
        }
        if (e.amount <= 0.0) {
            problems.push_back(where + "amount must be positive, got " + fields[2]);
            continue;
        }
        if (window.first_year) {
            const int lo = *window.first_year;
            const int hi = lo + window.years - 1;
            if (e.year < lo || e.year > hi) {
                problems.push_back(where + "year " + fields[1] + " outside window " +
                                   std::to_string(lo) + "-" + std::to_string(hi));
                continue;
            }
        }
        events.push_back(std::move(e));
    }

    if (!header_seen) throw ValidationError("loss data is empty");
    if (!problems.empty()) {
        std::string msg = std::to_string(problems.size()) + " malformed row(s):";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ValidationError(msg);
    }
    if (events.empty()) throw ValidationError("loss data has a header but no events");
    return events;
}

std::vector<LossEvent> read_loss_events(const std::filesystem::path& path,
                                        const ObservationWindow& window) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open loss data file " + path.string());
    return read_loss_events(in, window);
}

void write_loss_events(std::ostream& out, const std::vector<LossEvent>& events) {
    out << "cell_id,year,amount\n";
    for (const LossEvent& e : events)
        out << e.cell_id << ',' << e.year << ',' << format_real(e.amount) << '\n';
}

} // namespace oprisk
