#include "dbnt/kernels.hpp"

#include "dbnt/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace dbnt::kern {

namespace {

std::atomic<const KernelTable*> g_active{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_table() == nullptr) return false;
#if defined(__GNUC__) || defined(__clang__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
#else
    return false;
#endif
}

const KernelTable* table_for(Backend b) {
    switch (b) {
    case Backend::scalar:
        return &scalar_table();
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
        if (avx2_available()) return avx2_table();
#endif
        return nullptr;
    }
    return nullptr;
}

void init_once() {
    if (g_active.load(std::memory_order_acquire) != nullptr) return;
    Backend b = avx2_available() ? Backend::avx2 : Backend::scalar;
    if (const char* env = std::getenv("DBNT_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) {
            b = Backend::scalar;
        } else if (std::strcmp(env, "avx2") == 0 && avx2_available()) {
            b = Backend::avx2;
        }
    }
    g_backend.store(b, std::memory_order_relaxed);
    g_active.store(table_for(b), std::memory_order_release);
}

} // namespace

const KernelTable& active() {
    init_once();
    return *g_active.load(std::memory_order_acquire);
}

Backend active_backend() {
    init_once();
    return g_backend.load(std::memory_order_relaxed);
}

void select_backend(Backend b) {
    const KernelTable* t = table_for(b);
    if (t == nullptr) throw config_error("kernel backend not available: " + backend_name(b));
    g_backend.store(b, std::memory_order_relaxed);
    g_active.store(t, std::memory_order_release);
}

std::string backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

} // namespace dbnt::kern
