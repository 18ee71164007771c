#include <cmath>
#include <numbers>

#include "huefuse/metrics.hpp"

namespace huefuse {
namespace {

constexpr double kPi = std::numbers::pi;

double deg(double rad) { return rad * 180.0 / kPi; }
double rad(double d) { return d * kPi / 180.0; }

double hue_angle(double b, double a) {
    if (a == 0.0 && b == 0.0) return 0.0;
    double h = deg(std::atan2(b, a));
    return h < 0.0 ? h + 360.0 : h;
}

}  // namespace

Ciede2000 ciede2000(const Lab& p, const Lab& q) {
    const double c1 = std::hypot(p.a, p.b);
    const double c2 = std::hypot(q.a, q.b);
    const double c_bar = 0.5 * (c1 + c2);
    const double c_bar7 = std::pow(c_bar, 7.0);
    const double g = 0.5 * (1.0 - std::sqrt(c_bar7 / (c_bar7 + std::pow(25.0, 7.0))));

    const double a1p = (1.0 + g) * p.a;
    const double a2p = (1.0 + g) * q.a;
    const double c1p = std::hypot(a1p, p.b);
    const double c2p = std::hypot(a2p, q.b);
    const double h1p = hue_angle(p.b, a1p);
    const double h2p = hue_angle(q.b, a2p);

    const double dlp = q.l - p.l;
    const double dcp = c2p - c1p;
    double dhp = 0.0;
    if (c1p * c2p != 0.0) {
        dhp = h2p - h1p;
        if (dhp > 180.0)
            dhp -= 360.0;
        else if (dhp < -180.0)
            dhp += 360.0;
    }
    const double dH = 2.0 * std::sqrt(c1p * c2p) * std::sin(rad(dhp / 2.0));

    const double l_bar = 0.5 * (p.l + q.l);
    const double cp_bar = 0.5 * (c1p + c2p);
    double hp_bar = h1p + h2p;
    if (c1p * c2p != 0.0) {
        if (std::abs(h1p - h2p) <= 180.0)
            hp_bar *= 0.5;
        else if (h1p + h2p < 360.0)
            hp_bar = 0.5 * (hp_bar + 360.0);
        else
            hp_bar = 0.5 * (hp_bar - 360.0);
    }

    const double t = 1.0 - 0.17 * std::cos(rad(hp_bar - 30.0)) + 0.24 * std::cos(rad(2.0 * hp_bar)) +
                     0.32 * std::cos(rad(3.0 * hp_bar + 6.0)) - 0.20 * std::cos(rad(4.0 * hp_bar - 63.0));
    const double d_theta = 30.0 * std::exp(-((hp_bar - 275.0) / 25.0) * ((hp_bar - 275.0) / 25.0));
    const double cp_bar7 = std::pow(cp_bar, 7.0);
    const double rc = 2.0 * std::sqrt(cp_bar7 / (cp_bar7 + std::pow(25.0, 7.0)));
    const double l50 = (l_bar - 50.0) * (l_bar - 50.0);
    const double sl = 1.0 + 0.015 * l50 / std::sqrt(20.0 + l50);
    const double sc = 1.0 + 0.045 * cp_bar;
    const double sh = 1.0 + 0.015 * cp_bar * t;
    const double rt = -std::sin(rad(2.0 * d_theta)) * rc;

    Ciede2000 r;
    r.dl = dlp / sl;
    r.dc = dcp / sc;
    r.dh = dH / sh;
    r.de = std::sqrt(r.dl * r.dl + r.dc * r.dc + r.dh * r.dh + rt * r.dc * r.dh);
    return r;
}

}  // namespace huefuse
