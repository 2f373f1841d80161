"""
PCA-adaptive t-SNE and PCA(2) + k-means
=======================================

Flattened images are reduced to the principal axes covering 99% of the
variance, then laid out in 2-D.  Separately, a PCA plane is clustered.
"""

import numpy as np

from sigscore.embed import kmeans, pca2, pca_adaptive_tsne
from sigscore.textures import texture_family

imgs = np.concatenate([texture_family("blobs", 60, 32, seed=1),
                       texture_family("checkers", 60, 32, seed=2)])
labels = np.r_[np.zeros(60, int), np.ones(60, int)]

emb = pca_adaptive_tsne(imgs, perplexity=30, seed=0)
print("t-SNE metadata:", emb.metadata())
centres = [emb.coords[labels == c].mean(axis=0) for c in (0, 1)]
print("family centres in the layout:", np.round(centres, 2))

plane = pca2(imgs.reshape(len(imgs), -1))
clusters = kmeans(plane, k=2, seed=0)
agree = max(np.mean(clusters.assignments == labels), np.mean(clusters.assignments != labels))
print(f"k-means on the PCA plane matches the families on {agree:.0%} of images")
print("inertia per Lloyd step:", np.round(clusters.history, 3))
