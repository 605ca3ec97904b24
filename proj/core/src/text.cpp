#include "arct/text.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "arct/error.hpp"

namespace arct::text {

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

[[noreturn]] void bad_timestamp(const std::string& s) {
    throw Error("malformed ISO-8601 UTC timestamp: '" + s + "'");
}

} // namespace

double parse_iso8601_utc(const std::string& s) {
    // YYYY-MM-DDTHH:MM:SS[.fff]Z
    if (s.size() < 20 || s.back() != 'Z') bad_timestamp(s);
    if (s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':')
        bad_timestamp(s);
    const std::string ymd[3] = {s.substr(0, 4), s.substr(5, 2), s.substr(8, 2)};
    const std::string hms[3] = {s.substr(11, 2), s.substr(14, 2), s.substr(17, 2)};
    for (const auto& p : ymd)
        if (!all_digits(p)) bad_timestamp(s);
    for (const auto& p : hms)
        if (!all_digits(p)) bad_timestamp(s);

    double frac = 0.0;
    if (s.size() > 20) {
        if (s[19] != '.') bad_timestamp(s);
        const std::string f = s.substr(20, s.size() - 21);
        if (!all_digits(f)) bad_timestamp(s);
        frac = std::stod("0." + f);
    }

    std::tm tm{};
    tm.tm_year = std::stoi(ymd[0]) - 1900;
    tm.tm_mon = std::stoi(ymd[1]) - 1;
    tm.tm_mday = std::stoi(ymd[2]);
    tm.tm_hour = std::stoi(hms[0]);
    tm.tm_min = std::stoi(hms[1]);
    tm.tm_sec = std::stoi(hms[2]);
    if (tm.tm_mon < 0 || tm.tm_mon > 11 || tm.tm_mday < 1 || tm.tm_mday > 31 ||
        tm.tm_hour > 23 || tm.tm_min > 59 || tm.tm_sec > 60)
        bad_timestamp(s);

    const time_t t = timegm(&tm);
    return static_cast<double>(t) + frac;
}

std::string format_iso8601_utc(double epoch_seconds) {
    const time_t whole = static_cast<time_t>(std::floor(epoch_seconds));
    const double frac = epoch_seconds - static_cast<double>(whole);
    std::tm tm{};
    gmtime_r(&whole, &tm);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    std::string out(buf);
    if (frac > 1e-9) {
        std::snprintf(buf, sizeof(buf), "%03d", static_cast<int>(std::lround(frac * 1000)));
        out += ".";
        out += buf;
    }
    out += "Z";
    return out;
}

} // namespace arct::text
