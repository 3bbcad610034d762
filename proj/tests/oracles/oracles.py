"""Independent numpy reference values frozen into the unit tests.

Run: python3 tests/oracles/oracles.py
"""
import numpy as np

M32 = 0xFFFFFFFF


def philox4x32_10(ctr, key):
    c = list(ctr)
    k0, k1 = key
    for r in range(10):
        p0 = 0xD2511F53 * c[0]
        p1 = 0xCD9E8D57 * c[2]
        c = [((p1 >> 32) ^ c[1] ^ k0) & M32, p1 & M32,
             ((p0 >> 32) ^ c[3] ^ k1) & M32, p0 & M32]
        k0 = (k0 + 0x9E3779B9) & M32
        k1 = (k1 + 0xBB67AE85) & M32
    return c


def m1_coef(i, n):
    return 0.6 * np.cos(2 * np.pi * max(i, 1) / n)


def probes(n):
    return sorted({-(-n // 4), -(-n // 2), -(-3 * n // 4), n})


def theta_m1(k, n):
    # x_p - x_p' = prod_{t=p-k+1}^{p} a(t) (e - e'), so theta = sqrt(2) |prod|.
    best = 0.0
    for p in probes(n):
        prod = 1.0
        for t in range(p - k + 1, p + 1):
            prod *= m1_coef(t, n)
        best = max(best, abs(prod))
    return np.sqrt(2.0) * best


def simulate_m1(n, d, rng, burn=200):
    x = np.zeros(d)
    out = np.empty((n, d))
    for t in range(1 - burn, n + 1):
        x = m1_coef(t, n) * x + rng.standard_normal(d)
        if t >= 1:
            out[t - 1] = x
    return out


def simulate_eps(n, rng, burn=200):
    e = 0.0
    out = np.empty(n)
    for t in range(1 - burn, n + 1):
        u = max(t, 1) / n
        e = (14 * u * u * (1 - u) ** 2 - 0.5) * e + rng.standard_normal()
        if t >= 1:
            out[t - 1] = e
    return out


def main():
    print("philox KAT")
    for ctr, key in [((0, 0, 0, 0), (0, 0)),
                     ((M32,) * 4, (M32, M32)),
                     ((0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344),
                      (0xA4093822, 0x299F31D0))]:
        print(" ", " ".join(f"{v:08x}" for v in philox4x32_10(ctr, key)))

    n = 500
    print("theta M1 n=500:", [round(float(theta_m1(k, n)), 6) for k in range(6)])
    print("theta ratios:", [round(float(theta_m1(k, n) / theta_m1(k - 1, n)), 4) for k in (1, 2, 3)])
    c20 = sum(theta_m1(k, n) for k in range(21))
    c40 = sum(theta_m1(k, n) for k in range(41))
    print("cumulative 0..20 / 0..40:", c20, c40, c20 / c40)

    rng = np.random.default_rng(12345)
    acf, var = [], []
    for _ in range(1000):
        x = simulate_m1(500, 1, rng)[:, 0]
        mid = x[166:333] - x[166:333].mean()
        acf.append((mid[1:] * mid[:-1]).sum() / (mid * mid).sum())
        var.append(simulate_eps(500, rng).var(ddof=1))
    print("M1 middle-third lag-1 acf range:", min(acf), max(acf), np.median(acf))
    print("error variance range:", min(var), max(var))

    d = 5
    betas = []
    for _ in range(2000):
        X = simulate_m1(n, d, rng)
        y = X.sum(axis=1) + simulate_eps(n, rng)
        betas.append(np.linalg.lstsq(X, y, rcond=None)[0])
    sd = np.std(np.array(betas), axis=0, ddof=1)
    print("M1 regression sd(beta_hat_j):", np.round(sd, 5))


if __name__ == "__main__":
    main()
