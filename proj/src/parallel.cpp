#include "chanfront/parallel.hpp"

#include <atomic>
#include <thread>

namespace chanfront::par {

namespace {
std::atomic<int> g_max_threads{0}; // 0 = hardware default
}

void set_max_threads(int n) { g_max_threads.store(n > 0 ? n : 0); }

int max_threads() {
    int n = g_max_threads.load();
    if (n > 0) return n;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
#endif
}

double fixed_order_sum(const std::vector<double>& v) {
    // Recursive pairwise reduction; the tree depends only on v.size().
    struct Rec {
        static double sum(const double* p, std::size_t n) {
            if (n <= 8) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += p[i];
                return s;
            }
            std::size_t h = n / 2;
            return sum(p, h) + sum(p + h, n - h);
        }
    };
    return v.empty() ? 0.0 : Rec::sum(v.data(), v.size());
}

} // namespace chanfront::par
