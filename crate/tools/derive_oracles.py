"""Straight-line evaluation of the closed-form reference values.

Shares no code with the Rust crate. Output is pasted into
crates/core/tests/common/mod.rs; rerun and diff when a formula changes.
"""

from mpmath import mp, mpf, cos, exp, pi, sqrt

mp.dps = 50

EPS = mpf("1e-6")
ALPHA = mpf("0.7")
SPEED_REF = mpf("0.5")
T_REACT, A_MAX, A_MIN = mpf("0.5"), mpf("3.5"), mpf("4")
BETA = mpf("0.7")


def orientation(theta_deg):
    return (1 - cos(mpf(theta_deg) * pi / mpf("101.25") + pi / 10)) / 2


def directional(dp, v):
    dp, v = mpf(dp), mpf(v)
    if dp * v >= 0:
        return mpf(0)
    return exp(-abs(dp) / (abs(v) + EPS))


def speed(v_ego, v_limit, lanes):
    v_ego, v_limit = mpf(v_ego), mpf(v_limit)
    return 1 / (1 + exp(-(5 * (v_ego - v_limit) / v_limit + mpf("1.5") * lanes - 2)))


def spatial(*fs):
    out = mpf(1)
    for f in fs:
        out *= 1 - mpf(f)
    return 1 - out


def cri(f_sp, f_max, f_speed):
    return (ALPHA * f_sp + (1 - ALPHA) * f_max) * exp(f_speed - SPEED_REF) / exp(SPEED_REF)


def rss(v, vf):
    v, vf = mpf(v), mpf(vf)
    d = v * T_REACT + A_MAX * T_REACT**2 / 2 + ((v + T_REACT * A_MAX) ** 2 - vf**2) / (2 * A_MIN)
    return max(d, mpf(0))


def fused(r):
    x = sum(ri * cos(k * pi / 4) for k, ri in enumerate(r))
    y = sum(ri * mp.sin(k * pi / 4) for k, ri in enumerate(r))
    return BETA * sqrt(x * x + y * y) + (1 - BETA) * max(r)


def main():
    f_or0 = orientation(0)
    f_lon = directional(10, -5)
    # stationary object 10 m ahead, ego at 5 m/s; v_limit 6.25 gives ratio 0.8
    f_speed_ex = speed(5, "6.25", 1)
    f_sp_ex = spatial(f_lon, 0, f_or0)
    values = {
        "ORIENTATION_0": f_or0,
        "ORIENTATION_91_125": orientation("91.125"),
        "ORIENTATION_45": orientation(45),
        "DIRECTIONAL_10_M5": directional(10, -5),
        "DIRECTIONAL_HALF": directional("0.5", "-0.5"),
        "SPEED_AT_LIMIT_2_LANES": speed(10, 10, 2),
        "SPEED_0_8_1_LANE": speed(8, 10, 1),
        "SPEED_1_2_3_LANES": speed(12, 10, 3),
        "FUSE_HALVES": spatial("0.5", "0.5", "0.5"),
        "OBJECT_CRI_EXAMPLE": cri(mpf("0.875"), mpf("0.5"), speed(10, 10, 2)),
        "ASSESS_EXAMPLE": cri(f_sp_ex, max(f_lon, f_or0), f_speed_ex),
        "RSS_20_15": rss(20, 15),
        "RSS_0_0": rss(0, 0),
        "RSS_0_30": rss(0, 30),
        "FUSED_ORTHOGONAL": fused([mpf("0.6"), 0, mpf("0.6"), 0, 0, 0, 0, 0]),
    }
    for k, v in values.items():
        print(f"pub const {k}: f64 = {mp.nstr(v, 17, min_fixed=-30, max_fixed=30)};")


if __name__ == "__main__":
    main()
