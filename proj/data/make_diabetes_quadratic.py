#!/usr/bin/env python3
"""Builds diabetes_quadratic.csv: the quadratic expansion of the diabetes
benchmark (442 observations). Base covariates are standardized to sample
variance one, then all pairwise interactions and squares are appended and
standardized the same way. The square of the binary sex covariate is constant
after centering and is dropped, leaving 10 + 45 + 9 = 64 columns plus the
raw response y."""

import numpy as np
from sklearn.datasets import load_diabetes

NAMES = ["age", "sex", "bmi", "map", "tc", "ldl", "hdl", "tch", "ltg", "glu"]


def standardize(col):
    centered = col - col.mean()
    return centered / centered.std(ddof=1)


def main():
    raw = load_diabetes(scaled=False)
    X = raw.data.astype(float)
    y = raw.target.astype(float)
    n, p = X.shape
    assert (n, p) == (442, 10)

    base = np.column_stack([standardize(X[:, j]) for j in range(p)])
    cols, names = [base[:, j] for j in range(p)], list(NAMES)

    for a in range(p):
        for b in range(a + 1, p):
            cols.append(standardize(base[:, a] * base[:, b]))
            names.append(f"{NAMES[a]}:{NAMES[b]}")
    for a in range(p):
        if NAMES[a] == "sex":  # sex is binary, its square is constant
            continue
        cols.append(standardize(base[:, a] ** 2))
        names.append(f"{NAMES[a]}^2")

    assert len(cols) == 64
    with open("diabetes_quadratic.csv", "w") as f:
        f.write(",".join(names + ["y"]) + "\n")
        for i in range(n):
            f.write(",".join(repr(float(c[i])) for c in cols) + "," + repr(float(y[i])) + "\n")


if __name__ == "__main__":
    main()
