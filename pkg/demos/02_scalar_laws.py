"""The scalar Kummer and Gamma laws.

K(alpha, beta, gamma) has density proportional to
x**(alpha-1) (1+x)**-(alpha+beta) exp(-gamma x). beta may be negative.
"""

import math

import numpy as np

from treekummer.scalar import (
    KummerParams,
    kummer_cdf,
    kummer_envelope,
    kummer_norm_const,
    kummer_norm_const_hyperu,
    kummer_sample,
)
from treekummer.stats import ks_test

rng = np.random.default_rng(2026)

# The normalising constant comes from adaptive quadrature. Gamma(a) U(a, 1-b, g)
# via mpmath serves only as a cross-check.
for p in (KummerParams(1, 0, 1), KummerParams(0.4, 2.5, 0.7), KummerParams(3, -5, 1.5)):
    nd = kummer_norm_const(p)
    print(f"{p}: quadrature {nd.norm_const:.15g}, hypergeometric {kummer_norm_const_hyperu(p):.15g}")

# With beta = -1 and alpha = 1 the law is exponential; the median is ln 2 / gamma.
print("K(1,-1,1) cdf at ln 2:", kummer_cdf(KummerParams(1, -1, 1), math.log(2)))

# Sampling is rejection from the best Gamma proposal in a small family.
# The printed acceptance probability is exact, not estimated.
for p in (KummerParams(1, 0, 1), KummerParams(5, 3, 0.3), KummerParams(0.5, -3, 2)):
    env = kummer_envelope(p)
    draws = kummer_sample(p, rng, 20_000)
    rep = ks_test(draws, lambda t: kummer_cdf(p, t), level=1e-3)
    print(f"{p}: proposal G({env.shape:.3g}, {env.rate:.3g}), acceptance {env.acceptance:.3f}, KS p = {rep.p_value:.3f}")
