#include "pensionlab/date.hpp"

#include <cstdio>

#include "pensionlab/errors.hpp"

namespace pensionlab {

namespace {

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int dm[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && leap(y) ? 29 : dm[m - 1];
}

}  // namespace

bool is_valid(const Date& d) {
    return d.month >= 1 && d.month <= 12 && d.day >= 1 && d.day <= days_in_month(d.year, d.month);
}

Date parse_date(const std::string& s) {
    Date d;
    char tail = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
        std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &d.year, &d.month, &d.day, &tail) != 3 ||
        !is_valid(d))
        throw ValidationError("date", "expected a calendar date YYYY-MM-DD, got '" + s + "'");
    return d;
}

std::string to_string(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

// Howard Hinnant's civil calendar algorithms.
long days_from_civil(const Date& d) {
    int y = d.year - (d.month <= 2);
    long era = (y >= 0 ? y : y - 399) / 400;
    long yoe = y - era * 400;
    long doy = (153 * (d.month + (d.month > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
    long doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

Date civil_from_days(long z) {
    z += 719468;
    long era = (z >= 0 ? z : z - 146096) / 146097;
    long doe = z - era * 146097;
    long yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    long y = yoe + era * 400;
    long doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    long mp = (5 * doy + 2) / 153;
    int d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    int m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    return {static_cast<int>(y + (m <= 2)), m, d};
}

Date add_months(const Date& d, int months) {
    long idx = static_cast<long>(d.year) * 12 + (d.month - 1) + months;
    long y = idx >= 0 ? idx / 12 : (idx - 11) / 12;
    int m = static_cast<int>(idx - y * 12) + 1;
    int dd = std::min(d.day, days_in_month(static_cast<int>(y), m));
    return {static_cast<int>(y), m, dd};
}

double age_at(const Date& dob, const Date& at) {
    int months = (at.year - dob.year) * 12 + (at.month - dob.month);
    Date anchor = add_months(dob, months);
    if (days_from_civil(anchor) > days_from_civil(at)) anchor = add_months(dob, --months);
    Date next = add_months(dob, months + 1);
    double frac = double(days_from_civil(at) - days_from_civil(anchor)) /
                  double(days_from_civil(next) - days_from_civil(anchor));
    return (months + frac) / 12.0;
}

}  // namespace pensionlab
