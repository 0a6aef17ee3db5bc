# Constrained Multiplicative Weights Package
