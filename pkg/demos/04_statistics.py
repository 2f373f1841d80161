"""
Rank and variance tests on mean intensity
=========================================

Levene (median centred), D'Agostino-Pearson normality and Kruskal-Wallis,
combined into the (a)-(f) reading.
"""

import numpy as np

from sigscore.stats import kruskal_wallis, mean_intensity, run_pipeline
from sigscore.textures import texture_family

# small hand example: H is exactly 27/7
print("H on {1,2,3} vs {4,5,6}:", kruskal_wallis([1, 2, 3], [4, 5, 6]))

original = np.array([mean_intensity(img) for img in texture_family("blobs", 60, 64, seed=1)])
close = np.array([mean_intensity(img) for img in texture_family("blobs", 60, 64, seed=2)])
distinct = np.array([mean_intensity(img) for img in texture_family("checkers", 60, 64, seed=3)])

for name, synthetic in [("blobs vs blobs", close), ("blobs vs checkers", distinct)]:
    print(f"--- {name}")
    print(run_pipeline(original, synthetic).pretty())
