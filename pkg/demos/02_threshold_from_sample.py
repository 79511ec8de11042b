"""Pick a similarity threshold for the top 10% from a sample.

The density of sampled similarity indexes is estimated with a bounded
Gaussian kernel, and the threshold is the point with 10% of the mass above
it.  With fewer than 30 values the plain sample quantile is used instead.
"""

import numpy as np

from hisim.kde import empirical_threshold, threshold_for

rng = np.random.default_rng(12)
low = rng.beta(6, 4, 360)
high = rng.beta(40, 2, 40)
sample = np.concatenate([low, high])

thr, model = threshold_for(sample, 0.1, seed=0)
print(f"bandwidth chosen by cross-validation: {model.bandwidth:.4f}")
print(f"threshold for the top 10%:            {thr:.4f}")
print(f"sample 90th percentile:               {empirical_threshold(sample, 0.1):.4f}")
print(f"share of sample above the threshold:  {np.mean(sample >= thr):.3f}")

small, _ = threshold_for(sample[:20], 0.1)
print(f"with only 20 values (quantile path):  {small:.4f}")
