#include <immintrin.h>

#include <cmath>

#include "ambistop/kernels.hpp"
#include "kernel_math.hpp"

namespace ambistop {

using namespace kernel;

namespace {

constexpr int kWidth = 4;
// Two independent lane groups interleave their step chains.
constexpr int kGroups = 2;
constexpr int kLanes = kWidth * kGroups;
// Vectors of normals drawn per batch.
constexpr int kDraws = kBlocks * kGroups;

__m256i mask32() { return _mm256_set1_epi64x(0xffffffffll); }

// Exact conversion of values below 2^52 held in 64-bit lanes.
__m256d to_double(__m256i v)
{
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000ll);
    return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, magic)), _mm256_set1_pd(4503599627370496.0));
}

// Helpers work on N independent vectors in lockstep so that their latency
// chains interleave.
template <int N>
void philox(__m256i x[N][4], std::uint64_t seed)
{
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    const __m256i m0 = _mm256_set1_epi64x(kPhiloxM0);
    const __m256i m1 = _mm256_set1_epi64x(kPhiloxM1);
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k0 += kPhiloxW0;
            k1 += kPhiloxW1;
        }
        const __m256i vk0 = _mm256_set1_epi64x(k0);
        const __m256i vk1 = _mm256_set1_epi64x(k1);
        for (int b = 0; b < N; ++b) {
            const __m256i p0 = _mm256_mul_epu32(x[b][0], m0);
            const __m256i p1 = _mm256_mul_epu32(x[b][2], m1);
            const __m256i y0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), x[b][1]), vk0);
            const __m256i y2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), x[b][3]), vk1);
            x[b][0] = y0;
            x[b][1] = _mm256_and_si256(p1, mask32());
            x[b][2] = y2;
            x[b][3] = _mm256_and_si256(p0, mask32());
        }
    }
}

__m256d uniform(__m256i a, __m256i b, double offset)
{
    const __m256d hi = to_double(_mm256_srli_epi64(a, 5));
    const __m256d lo = to_double(_mm256_srli_epi64(b, 6));
    const __m256d s = _mm256_add_pd(_mm256_mul_pd(hi, _mm256_set1_pd(kTwo26)), lo);
    const __m256d t = offset != 0.0 ? _mm256_add_pd(s, _mm256_set1_pd(offset)) : s;
    return _mm256_mul_pd(t, _mm256_set1_pd(kTwoM53));
}

template <int N>
void vlog(__m256d x[N])
{
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d e[N], s[N], s2[N], p[N];
    for (int b = 0; b < N; ++b) {
        const __m256i bits = _mm256_castpd_si256(x[b]);
        e[b] = _mm256_sub_pd(to_double(_mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7ff))),
                             _mm256_set1_pd(1023.0));
        __m256d m = _mm256_castsi256_pd(_mm256_or_si256(
            _mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffll)), _mm256_set1_epi64x(0x3ff0000000000000ll)));
        const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
        m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
        e[b] = _mm256_blendv_pd(e[b], _mm256_add_pd(e[b], one), big);
        s[b] = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
        s2[b] = _mm256_mul_pd(s[b], s[b]);
        p[b] = _mm256_set1_pd(log_coef(kLogTerms - 1));
    }
    for (int k = kLogTerms - 2; k >= 0; --k) {
        const __m256d ck = _mm256_set1_pd(log_coef(k));
        for (int b = 0; b < N; ++b)
            p[b] = _mm256_add_pd(_mm256_mul_pd(p[b], s2[b]), ck);
    }
    for (int b = 0; b < N; ++b) {
        const __m256d hi = _mm256_mul_pd(e[b], _mm256_set1_pd(kLn2Hi));
        const __m256d lo = _mm256_mul_pd(e[b], _mm256_set1_pd(kLn2Lo));
        x[b] = _mm256_add_pd(hi, _mm256_add_pd(lo, _mm256_mul_pd(_mm256_add_pd(s[b], s[b]), p[b])));
    }
}

template <int N>
void vsincos(const __m256d u[N], __m256d s[N], __m256d c[N])
{
    __m256d q[N], big[N], x[N], x2[N], sp[N], cp[N];
    for (int b = 0; b < N; ++b) {
        const __m256d v = _mm256_mul_pd(u[b], _mm256_set1_pd(4.0));
        q[b] = _mm256_floor_pd(v);
        const __m256d f = _mm256_sub_pd(v, q[b]);
        big[b] = _mm256_cmp_pd(f, _mm256_set1_pd(0.5), _CMP_GT_OQ);
        const __m256d g = _mm256_blendv_pd(f, _mm256_sub_pd(_mm256_set1_pd(1.0), f), big[b]);
        x[b] = _mm256_mul_pd(g, _mm256_set1_pd(kHalfPi));
        x2[b] = _mm256_mul_pd(x[b], x[b]);
        sp[b] = _mm256_set1_pd(sin_coef(kTrigTerms - 1));
        cp[b] = _mm256_set1_pd(cos_coef(kTrigTerms - 1));
    }
    for (int k = kTrigTerms - 2; k >= 0; --k) {
        const __m256d sk = _mm256_set1_pd(sin_coef(k));
        const __m256d ck = _mm256_set1_pd(cos_coef(k));
        for (int b = 0; b < N; ++b) {
            sp[b] = _mm256_add_pd(_mm256_mul_pd(sp[b], x2[b]), sk);
            cp[b] = _mm256_add_pd(_mm256_mul_pd(cp[b], x2[b]), ck);
        }
    }
    const __m256d sign = _mm256_set1_pd(-0.0);
    for (int b = 0; b < N; ++b) {
        const __m256d spx = _mm256_mul_pd(x[b], sp[b]);
        const __m256d c0 = _mm256_blendv_pd(cp[b], spx, big[b]);
        const __m256d s0 = _mm256_blendv_pd(spx, cp[b], big[b]);
        const __m256d q1 = _mm256_cmp_pd(q[b], _mm256_set1_pd(1.0), _CMP_EQ_OQ);
        const __m256d q2 = _mm256_cmp_pd(q[b], _mm256_set1_pd(2.0), _CMP_EQ_OQ);
        const __m256d q3 = _mm256_cmp_pd(q[b], _mm256_set1_pd(3.0), _CMP_EQ_OQ);
        const __m256d odd = _mm256_or_pd(q1, q3);
        const __m256d cc = _mm256_blendv_pd(c0, s0, odd);
        const __m256d ss = _mm256_blendv_pd(s0, c0, odd);
        c[b] = _mm256_xor_pd(cc, _mm256_and_pd(sign, _mm256_or_pd(q1, q2)));
        s[b] = _mm256_xor_pd(ss, _mm256_and_pd(sign, _mm256_or_pd(q2, q3)));
    }
}

}  // namespace

void run_paths_avx2(const PathParams& p, PathBatch& out)
{
    const StepConsts k = step_consts(p);
    const std::size_t n = out.status.size();
    const std::size_t nchk = p.checkpoints.size();
    const double max_steps = static_cast<double>(p.max_steps);

    alignas(32) double lx[kLanes], z[kLanes], step[kLanes], alive[kLanes], next_chk[kLanes];
    alignas(32) double o_tau[kLanes], o_lx[kLanes], o_z[kLanes], o_status[kLanes];
    std::size_t slot[kLanes];
    std::size_t chk_idx[kLanes];
    bool active[kLanes];
    std::size_t issued = 0;
    int n_active = 0;

    auto refill = [&](int l) {
        if (issued < n) {
            slot[l] = issued++;
            lx[l] = p.log_x0;
            z[l] = p.z0;
            step[l] = 0.0;
            alive[l] = 1.0;
            chk_idx[l] = 0;
            next_chk[l] = nchk ? static_cast<double>(p.checkpoints[0]) : -1.0;
            if (!active[l])
                ++n_active;
            active[l] = true;
        } else {
            alive[l] = 0.0;
            step[l] = 0.0;
            lx[l] = p.log_x0;
            z[l] = p.z0;
            next_chk[l] = -1.0;
            slot[l] = 0;
            if (active[l])
                --n_active;
            active[l] = false;
        }
    };
    for (int l = 0; l < kLanes; ++l) {
        active[l] = false;
        refill(l);
    }

    const __m256d v_sw = _mm256_set1_pd(p.switch_z);
    const __m256d v_thlo = _mm256_set1_pd(p.theta_lo);
    const __m256d v_thhi = _mm256_set1_pd(p.theta_hi);
    const __m256d v_mux = _mm256_set1_pd(k.mux);
    const __m256d v_muz = _mm256_set1_pd(k.muz);
    const __m256d v_sig = _mm256_set1_pd(k.sig);
    const __m256d v_dt = _mm256_set1_pd(k.dt);
    const __m256d v_sqdt = _mm256_set1_pd(k.sqdt);
    const __m256d v_lo = _mm256_set1_pd(p.band_lo);
    const __m256d v_hi = _mm256_set1_pd(p.band_hi);
    const __m256d v_max = _mm256_set1_pd(max_steps);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffll));
    __m256d v_steps = _mm256_setzero_pd();
    __m256d v_flagged = _mm256_setzero_pd();

    while (n_active > 0) {
        // Draw d covers group d % kGroups, block d / kGroups.
        alignas(32) std::uint64_t c[kDraws][4][kWidth];
        for (int l = 0; l < kLanes; ++l) {
            const int g = l / kWidth, w = l % kWidth;
            const std::uint64_t block0 = static_cast<std::uint64_t>(step[l]) / 2;
            const std::uint64_t path = out.first + slot[l];
            for (int b = 0; b < kBlocks; ++b) {
                const std::uint64_t block = block0 + b;
                const int d = b * kGroups + g;
                c[d][0][w] = static_cast<std::uint32_t>(block);
                c[d][1][w] = static_cast<std::uint32_t>(block >> 32);
                c[d][2][w] = static_cast<std::uint32_t>(path);
                c[d][3][w] = static_cast<std::uint32_t>(path >> 32);
            }
        }
        __m256i wv[kDraws][4];
        for (int d = 0; d < kDraws; ++d)
            for (int i = 0; i < 4; ++i)
                wv[d][i] = _mm256_load_si256(reinterpret_cast<const __m256i*>(c[d][i]));
        philox<kDraws>(wv, p.seed);
        __m256d lg[kDraws], u2[kDraws], sn[kDraws], cs[kDraws];
        for (int d = 0; d < kDraws; ++d) {
            lg[d] = uniform(wv[d][0], wv[d][1], 1.0);
            u2[d] = uniform(wv[d][2], wv[d][3], 0.0);
        }
        vlog<kDraws>(lg);
        vsincos<kDraws>(u2, sn, cs);
        // nrm[j][g]: normal for step j of the batch in group g.
        __m256d nrm[kSteps][kGroups];
        for (int d = 0; d < kDraws; ++d) {
            const __m256d rad = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(-2.0), lg[d]));
            nrm[2 * (d / kGroups)][d % kGroups] = _mm256_mul_pd(rad, cs[d]);
            nrm[2 * (d / kGroups) + 1][d % kGroups] = _mm256_mul_pd(rad, sn[d]);
        }

        __m256d v_lx[kGroups], v_z[kGroups], v_step[kGroups], v_alive[kGroups];
        __m256d v_tau[kGroups], v_olx[kGroups], v_oz[kGroups], v_ost[kGroups];
        for (int g = 0; g < kGroups; ++g) {
            v_lx[g] = _mm256_load_pd(lx + g * kWidth);
            v_z[g] = _mm256_load_pd(z + g * kWidth);
            v_step[g] = _mm256_load_pd(step + g * kWidth);
            v_alive[g] = _mm256_cmp_pd(_mm256_load_pd(alive + g * kWidth), half, _CMP_GT_OQ);
            v_tau[g] = v_olx[g] = v_oz[g] = v_ost[g] = _mm256_setzero_pd();
        }
        for (int j = 0; j < kSteps; ++j) {
            __m256d live[kGroups];
            int any = 0;
            for (int g = 0; g < kGroups; ++g) {
                live[g] = _mm256_and_pd(v_alive[g], _mm256_cmp_pd(v_step[g], v_max, _CMP_LT_OQ));
                any |= _mm256_movemask_pd(live[g]);
            }
            if (any == 0)
                break;
            for (int g = 0; g < kGroups; ++g) {
                const __m256d z0 = v_z[g];
                const __m256d lx0 = v_lx[g];
                const __m256d th = _mm256_blendv_pd(v_thhi, v_thlo, _mm256_cmp_pd(z0, v_sw, _CMP_LE_OQ));
                const __m256d dw = _mm256_mul_pd(v_sqdt, nrm[j][g]);
                const __m256d sth = _mm256_mul_pd(v_sig, th);
                const __m256d lxn = _mm256_add_pd(
                    lx0, _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(v_mux, sth), v_dt), _mm256_mul_pd(v_sig, dw)));
                const __m256d drift = _mm256_sub_pd(one, _mm256_mul_pd(_mm256_sub_pd(v_muz, sth), z0));
                const __m256d zn = _mm256_add_pd(
                    z0, _mm256_sub_pd(_mm256_mul_pd(drift, v_dt), _mm256_mul_pd(_mm256_mul_pd(v_sig, z0), dw)));
                const __m256d flag = _mm256_cmp_pd(_mm256_mul_pd(_mm256_and_pd(drift, absmask), v_dt),
                                                   _mm256_mul_pd(half, z0), _CMP_GT_OQ);
                v_flagged = _mm256_add_pd(v_flagged, _mm256_and_pd(one, _mm256_and_pd(flag, live[g])));
                v_steps = _mm256_add_pd(v_steps, _mm256_and_pd(one, live[g]));
                const __m256d hit_lo = _mm256_and_pd(live[g], _mm256_cmp_pd(zn, v_lo, _CMP_LE_OQ));
                const __m256d hit_hi =
                    _mm256_andnot_pd(hit_lo, _mm256_and_pd(live[g], _mm256_cmp_pd(zn, v_hi, _CMP_GE_OQ)));
                const __m256d hit = _mm256_or_pd(hit_lo, hit_hi);
                if (_mm256_movemask_pd(hit)) {
                    const __m256d bnd = _mm256_blendv_pd(v_hi, v_lo, hit_lo);
                    const __m256d f = _mm256_div_pd(_mm256_sub_pd(bnd, z0), _mm256_sub_pd(zn, z0));
                    v_tau[g] = _mm256_blendv_pd(v_tau[g], _mm256_mul_pd(_mm256_add_pd(v_step[g], f), v_dt), hit);
                    v_olx[g] = _mm256_blendv_pd(v_olx[g], _mm256_add_pd(lx0, _mm256_mul_pd(f, _mm256_sub_pd(lxn, lx0))),
                                                hit);
                    v_oz[g] = _mm256_blendv_pd(v_oz[g], bnd, hit);
                    v_ost[g] = _mm256_blendv_pd(v_ost[g], _mm256_blendv_pd(_mm256_set1_pd(2.0), one, hit_lo), hit);
                    v_alive[g] = _mm256_andnot_pd(hit, v_alive[g]);
                }
                const __m256d cont = _mm256_andnot_pd(hit, live[g]);
                v_lx[g] = _mm256_blendv_pd(lx0, lxn, cont);
                v_z[g] = _mm256_blendv_pd(z0, zn, cont);
                v_step[g] = _mm256_add_pd(v_step[g], _mm256_and_pd(one, cont));
                if (nchk) {
                    const __m256d at = _mm256_and_pd(
                        cont, _mm256_cmp_pd(v_step[g], _mm256_load_pd(next_chk + g * kWidth), _CMP_EQ_OQ));
                    const int mask = _mm256_movemask_pd(at);
                    if (mask) {
                        alignas(32) double tl[kWidth], tz[kWidth];
                        _mm256_store_pd(tl, v_lx[g]);
                        _mm256_store_pd(tz, v_z[g]);
                        for (int w = 0; w < kWidth; ++w) {
                            if (!(mask >> w & 1))
                                continue;
                            const int l = g * kWidth + w;
                            const std::size_t idx = slot[l] * nchk + chk_idx[l];
                            out.chk_log_x[idx] = tl[w];
                            out.chk_z[idx] = tz[w];
                            ++chk_idx[l];
                            next_chk[l] =
                                chk_idx[l] < nchk ? static_cast<double>(p.checkpoints[chk_idx[l]]) : -1.0;
                        }
                    }
                }
            }
        }
        for (int g = 0; g < kGroups; ++g) {
            _mm256_store_pd(lx + g * kWidth, v_lx[g]);
            _mm256_store_pd(z + g * kWidth, v_z[g]);
            _mm256_store_pd(step + g * kWidth, v_step[g]);
            _mm256_store_pd(alive + g * kWidth, _mm256_and_pd(one, v_alive[g]));
            _mm256_store_pd(o_tau + g * kWidth, v_tau[g]);
            _mm256_store_pd(o_lx + g * kWidth, v_olx[g]);
            _mm256_store_pd(o_z + g * kWidth, v_oz[g]);
            _mm256_store_pd(o_status + g * kWidth, v_ost[g]);
        }
        for (int l = 0; l < kLanes; ++l) {
            if (!active[l])
                continue;
            const std::size_t i = slot[l];
            if (alive[l] == 0.0) {
                out.tau[i] = o_tau[l];
                out.log_x[i] = o_lx[l];
                out.z[i] = o_z[l];
                out.status[i] = static_cast<std::uint8_t>(o_status[l]);
            } else if (step[l] >= max_steps) {
                out.tau[i] = step[l] * k.dt;
                out.log_x[i] = lx[l];
                out.z[i] = z[l];
                out.status[i] = static_cast<std::uint8_t>(PathStatus::Running);
            } else {
                continue;
            }
            refill(l);
        }
    }

    alignas(32) double s[kWidth], f[kWidth];
    _mm256_store_pd(s, v_steps);
    _mm256_store_pd(f, v_flagged);
    out.steps = static_cast<std::uint64_t>(s[0] + s[1] + s[2] + s[3]);
    out.flagged_steps = static_cast<std::uint64_t>(f[0] + f[1] + f[2] + f[3]);
}

}  // namespace ambistop
