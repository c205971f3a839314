// Test-only quadrature oracles, independent of the adaptive Gauss-Kronrod
// engine: composite fixed-order Gauss-Legendre over unit blocks of log z,
// summed until the blocks are negligible.

#ifndef EVT_TESTS_ORACLES_HPP
#define EVT_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>

namespace evt_test {

inline double gl8_panel(const std::function<double(double)>& f, double a, double b) {
    static const double nodes[4] = {0.1834346424956498, 0.5255324099163290,
                                    0.7966664774136267, 0.9602898564975363};
    static const double weights[4] = {0.3626837833783620, 0.3137066458778873,
                                      0.2223810344533745, 0.1012285362903763};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (int j = 0; j < 4; ++j)
        acc += weights[j] * (f(c - h * nodes[j]) + f(c + h * nodes[j]));
    return acc * h;
}

inline double gl8_composite(const std::function<double(double)>& f, double a, double b,
                            int panels) {
    double acc = 0.0;
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) acc += gl8_panel(f, a + i * h, a + (i + 1) * h);
    return acc;
}

// sum of unit log-z blocks in direction dir until blocks vanish
inline double sum_blocks(const std::function<double(double)>& h, int dir) {
    double total = 0.0;
    int tiny_streak = 0;
    for (int j = 0; j < 400; ++j) {
        const double a = dir > 0 ? j : -j - 1.0;
        const double block = gl8_composite(h, a, a + 1.0, 32);
        total += block;
        if (std::fabs(block) <= 1e-18 * (std::fabs(total) + 1e-300))
            ++tiny_streak;
        else
            tiny_streak = 0;
        if (tiny_streak >= 3) break;
    }
    return total;
}

// int_1^inf g(z) z^-2 dz
inline double oracle_tail_integral(const std::function<double(double)>& g) {
    return sum_blocks([&g](double w) { return g(std::exp(w)) * std::exp(-w); }, +1);
}

// int_0^inf g(z) e^{-1/z} z^-2 dz
inline double oracle_bm_integral(const std::function<double(double)>& g) {
    auto h = [&g](double w) {
        const double z = std::exp(w);
        return g(z) * std::exp(-1.0 / z) * std::exp(-w);
    };
    return sum_blocks(h, +1) + sum_blocks(h, -1);
}

} // namespace evt_test

#endif
