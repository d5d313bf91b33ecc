#include "dfv/rational.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace dfv {

namespace {

using i128 = __int128;

constexpr i128 kMax = std::numeric_limits<std::int64_t>::max();
constexpr i128 kMin = -kMax;  // keep -num representable

bool fits(i128 v) { return v >= kMin && v <= kMax; }

i128 gcd128(i128 a, i128 b)
{
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

mpz_class mpz_from(i128 v)
{
    bool neg = v < 0;
    unsigned __int128 mag = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
    mpz_class hi(static_cast<unsigned long>(mag >> 64));
    mpz_class lo(static_cast<unsigned long>(mag & 0xFFFFFFFFFFFFFFFFULL));
    mpz_class z = (hi << 64) + lo;
    return neg ? mpz_class(-z) : z;
}

bool mpz_to_i64(const mpz_class& z, std::int64_t& out)
{
    if (z > mpz_class(static_cast<long>(std::numeric_limits<long>::max()))
        || z < mpz_class(-static_cast<long>(std::numeric_limits<long>::max()))) {
        return false;
    }
    static_assert(sizeof(long) == sizeof(std::int64_t));
    out = z.get_si();
    return true;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d)
{
    if (d == 0) throw std::domain_error("rational with zero denominator");
    normalize_small();
}

Rational::Rational(const mpq_class& q)
{
    mpq_class c = q;
    c.canonicalize();
    set_big(std::move(c));
}

void Rational::normalize_small()
{
    i128 n = num_;
    i128 d = den_;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    if (fits(n) && fits(d)) {
        num_ = static_cast<std::int64_t>(n);
        den_ = static_cast<std::int64_t>(d);
        big_.reset();
    } else {
        set_big(mpq_class(mpz_from(n), mpz_from(d)));
    }
}

void Rational::set_big(mpq_class q)
{
    std::int64_t n = 0;
    std::int64_t d = 1;
    if (mpz_to_i64(q.get_num(), n) && mpz_to_i64(q.get_den(), d)) {
        num_ = n;
        den_ = d;
        big_.reset();
        return;
    }
    big_ = std::make_shared<const mpq_class>(std::move(q));
    num_ = 0;
    den_ = 1;
}

mpq_class Rational::to_mpq() const
{
    if (big_) return *big_;
    return mpq_class(mpz_from(num_), mpz_from(den_));
}

Rational Rational::parse(std::string_view text)
{
    std::string s(text);
    if (s.empty()) throw std::invalid_argument("empty number");
    bool neg = false;
    std::size_t pos = 0;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        pos = 1;
    }
    std::string body = s.substr(pos);
    if (body.empty()) throw std::invalid_argument("malformed number '" + s + "'");
    mpq_class q;
    auto slash = body.find('/');
    auto dot = body.find('.');
    auto all_digits = [](const std::string& t) {
        return !t.empty() && t.find_first_not_of("0123456789") == std::string::npos;
    };
    if (slash != std::string::npos) {
        std::string a = body.substr(0, slash);
        std::string b = body.substr(slash + 1);
        if (!all_digits(a) || !all_digits(b)) throw std::invalid_argument("malformed number '" + s + "'");
        mpz_class den(b, 10);
        if (den == 0) throw std::domain_error("zero denominator in '" + s + "'");
        q = mpq_class(mpz_class(a, 10), den);
    } else if (dot != std::string::npos) {
        std::string ip = body.substr(0, dot);
        std::string fp = body.substr(dot + 1);
        if (ip.empty()) ip = "0";
        if (fp.empty()) fp = "0";
        if (!all_digits(ip) || !all_digits(fp)) throw std::invalid_argument("malformed number '" + s + "'");
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
        q = mpq_class(mpz_class(ip + fp, 10), den);
    } else {
        if (!all_digits(body)) throw std::invalid_argument("malformed number '" + s + "'");
        q = mpq_class(mpz_class(body, 10));
    }
    q.canonicalize();
    if (neg) q = -q;
    return Rational(q);
}

bool Rational::is_integer() const
{
    if (big_) return big_->get_den() == 1;
    return den_ == 1;
}

int Rational::sign() const
{
    if (big_) return sgn(*big_);
    return (num_ > 0) - (num_ < 0);
}

std::string Rational::numerator_str() const
{
    if (big_) return big_->get_num().get_str();
    return std::to_string(num_);
}

std::string Rational::denominator_str() const
{
    if (big_) return big_->get_den().get_str();
    return std::to_string(den_);
}

std::string Rational::to_string() const
{
    if (is_integer()) return numerator_str();
    return numerator_str() + "/" + denominator_str();
}

bool Rational::has_finite_decimal() const
{
    mpz_class d = big_ ? mpz_class(big_->get_den()) : mpz_from(den_);
    while (mpz_divisible_ui_p(d.get_mpz_t(), 2)) d /= 2;
    while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) d /= 5;
    return d == 1;
}

std::string Rational::to_decimal(bool real_style) const
{
    if (is_integer()) return numerator_str() + (real_style ? ".0" : "");
    if (!has_finite_decimal()) return to_string();
    mpq_class q = to_mpq();
    bool neg = sgn(q) < 0;
    if (neg) q = -q;
    mpz_class num = q.get_num();
    mpz_class den = q.get_den();
    mpz_class ip = num / den;
    mpz_class rem = num % den;
    std::string frac;
    while (rem != 0) {
        rem *= 10;
        mpz_class digit = rem / den;
        rem = rem % den;
        frac += digit.get_str();
    }
    return (neg ? "-" : "") + ip.get_str() + "." + frac;
}

double Rational::to_double() const
{
    if (big_) return big_->get_d();
    return static_cast<double>(num_) / static_cast<double>(den_);
}

Rational Rational::operator-() const
{
    if (big_) return Rational(mpq_class(-*big_));
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Rational operator+(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) {
        if (a.den_ == 1 && b.den_ == 1) {
            i128 s = static_cast<i128>(a.num_) + b.num_;
            if (fits(s)) return Rational(static_cast<std::int64_t>(s));
        } else {
            i128 n = static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_;
            i128 d = static_cast<i128>(a.den_) * b.den_;
            i128 g = gcd128(n, d);
            if (g > 1) {
                n /= g;
                d /= g;
            }
            if (fits(n) && fits(d)) {
                Rational r;
                r.num_ = static_cast<std::int64_t>(n);
                r.den_ = static_cast<std::int64_t>(d);
                return r;
            }
        }
    }
    return Rational(mpq_class(a.to_mpq() + b.to_mpq()));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) {
        i128 n = static_cast<i128>(a.num_) * b.num_;
        i128 d = static_cast<i128>(a.den_) * b.den_;
        if (d != 1) {
            i128 g = gcd128(n, d);
            if (g > 1) {
                n /= g;
                d /= g;
            }
        }
        if (fits(n) && fits(d)) {
            Rational r;
            r.num_ = static_cast<std::int64_t>(n);
            r.den_ = static_cast<std::int64_t>(d);
            return r;
        }
    }
    return Rational(mpq_class(a.to_mpq() * b.to_mpq()));
}

Rational operator/(const Rational& a, const Rational& b)
{
    if (b.is_zero()) throw std::domain_error("division by zero");
    if (!a.big_ && !b.big_) {
        i128 n = static_cast<i128>(a.num_) * b.den_;
        i128 d = static_cast<i128>(a.den_) * b.num_;
        if (d < 0) {
            n = -n;
            d = -d;
        }
        i128 g = gcd128(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        if (fits(n) && fits(d)) {
            Rational r;
            r.num_ = static_cast<std::int64_t>(n);
            r.den_ = static_cast<std::int64_t>(d);
            return r;
        }
    }
    return Rational(mpq_class(a.to_mpq() / b.to_mpq()));
}

Rational Rational::euclid_div(const Rational& a, const Rational& b)
{
    if (b.is_zero()) throw std::domain_error("division by zero");
    mpz_class x = a.to_mpq().get_num();
    mpz_class y = b.to_mpq().get_num();
    mpz_class q;
    mpz_class r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
    if (r < 0) {
        // floor division leaves r with the sign of y; shift to r >= 0
        r -= y;
        q += 1;
    }
    return Rational(mpq_class(q));
}

bool operator==(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
    return a.to_mpq() == b.to_mpq();
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) {
        i128 l = static_cast<i128>(a.num_) * b.den_;
        i128 r = static_cast<i128>(b.num_) * a.den_;
        return l <=> r;
    }
    int c = cmp(a.to_mpq(), b.to_mpq());
    return c <=> 0;
}

std::size_t Rational::hash() const
{
    if (big_) return std::hash<std::string>{}(to_string());
    return std::hash<std::int64_t>{}(num_) * 31u + std::hash<std::int64_t>{}(den_);
}

}  // namespace dfv
