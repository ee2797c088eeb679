#include <cstdlib>
#include <string>

#include "ambistop/error.hpp"
#include "ambistop/kernels.hpp"

namespace ambistop {

void PathBatch::resize(std::uint64_t first_path, std::size_t count, std::size_t n_checkpoints)
{
    first = first_path;
    status.assign(count, 0);
    tau.assign(count, 0.0);
    log_x.assign(count, 0.0);
    z.assign(count, 0.0);
    chk_log_x.assign(count * n_checkpoints, 0.0);
    chk_z.assign(count * n_checkpoints, 0.0);
    steps = 0;
    flagged_steps = 0;
}

const char* simd_level_name(SimdLevel level)
{
    return level == SimdLevel::Avx2 ? "avx2" : "scalar";
}

bool simd_level_available(SimdLevel level)
{
    if (level == SimdLevel::Scalar)
        return true;
#if defined(AMBISTOP_BUILD_AVX2)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

SimdLevel active_simd_level()
{
    const char* env = std::getenv("AMBISTOP_SIMD");
    const std::string want = env ? env : "auto";
    if (want == "scalar")
        return SimdLevel::Scalar;
    if (want != "auto" && want != "avx2")
        fail(ErrorCode::ConfigError, "AMBISTOP_SIMD must be scalar, avx2 or auto");
    return simd_level_available(SimdLevel::Avx2) ? SimdLevel::Avx2 : SimdLevel::Scalar;
}

#if !defined(AMBISTOP_BUILD_AVX2)
void run_paths_avx2(const PathParams& p, PathBatch& out)
{
    run_paths_scalar(p, out);
}
#endif

void run_paths(const PathParams& p, PathBatch& out, SimdLevel level)
{
    if (level == SimdLevel::Avx2 && simd_level_available(SimdLevel::Avx2))
        run_paths_avx2(p, out);
    else
        run_paths_scalar(p, out);
}

}  // namespace ambistop
