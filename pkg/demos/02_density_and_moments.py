"""Densities, quantiles, and closed-form moments.

The family has an explicit log density, a CDF through the regularized
incomplete gamma function, and quantiles by inverting it. For power-law
generators T(x) = C*x**(-s), raw moments E[Y^q] are a ratio of gamma
functions; the demo checks them against Monte Carlo.
"""

import numpy as np

from gamgen import (
    FamilyParams,
    RngStream,
    cdf,
    log_pdf,
    make_generator,
    moment_exists,
    moment_power_law,
    quantile,
    sample,
)

g = make_generator("nakagami")
params = FamilyParams(2.5, 0.7)

# quantile and cdf are inverses
print("u -> quantile -> cdf round trip:")
for u in (0.05, 0.25, 0.5, 0.75, 0.99):
    y = quantile(u, params, g)
    print(f"  u={u:4.2f}  y={y:8.5f}  cdf(y)={cdf(y, params, g):8.6f}")
print()

# the density integrates to one (trapezoid over a wide quantile range)
lo, hi = quantile(1e-9, params, g), quantile(1.0 - 1e-9, params, g)
grid = np.linspace(lo, hi, 20_001)
mass = np.trapezoid(np.exp(log_pdf(grid, params, g)), grid)
print(f"numeric mass of the pdf: {mass:.8f}")
print()

# closed-form moments for a power-law generator
pl = g.family_class
print(f"T(x) = {pl.C:g} * x**({-pl.s:g}) for {g.name}")
y = sample(1_000_000, params, g, RngStream(123, 0))
print(f"{'q':>4s} {'analytic':>12s} {'monte carlo':>12s}")
for q in (1.0, 2.0, 3.0, -1.0):
    if moment_exists(q, g, mu=params.mu).exists:
        analytic = moment_power_law(q, params, pl.C, pl.s)
        print(f"{q:4.1f} {analytic:12.6f} {(y ** q).mean():12.6f}")
    else:
        print(f"{q:4.1f} {'(does not exist)':>12s}")
print()

# the power extension stretches the family: Y = X**(1/p)
ext = FamilyParams(2.5, 0.7, power=2.0)
y2 = sample(200_000, ext, g, RngStream(124, 0))
print(f"power=2: sample mean {y2.mean():.5f}, "
      f"squared-sample mean T {g.value(y2 ** 2).mean():.5f} "
      f"(1/sigma = {1 / params.sigma:.5f})")
