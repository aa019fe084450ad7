"""Replaying stored comparison matrices
==========================================

The ranking stage is exactly checkable on its own: feed a stored
reciprocal comparison matrix to the eigenvector step and read off the
winner.  The two matrices below are the golden fixtures this package
ships (also at tests/data/table3.tsv and table5.tsv for the
`predictsched compare --matrix` command).
"""

import numpy as np

from predictsched import principal_eigenvector, weights_from_binary_matrix

# 4 alternatives: conservative backfilling, the predictive policy,
# best-gap, and tabu search
FOUR = {
    "names": ["Cons BF", "DL", "BestGap", "TabuSearch"],
    "matrix": np.array(
        [
            [1, 0.053464727, 0.146786008, 0.2],
            [18.7039206, 1, 13.99131226, 1.902052263],
            [6.812638428, 0.071472924, 1, 0.502942619],
            [5, 0.525747909, 1.988298389, 1],
        ]
    ),
}

SIX = {
    "names": ["SmallestJF", "EASY BF", "PBS-Pro", "DL", "BestGap", "TabuSearch"],
    "matrix": np.array(
        [
            [1, 3.738761168, 2.570680305, 0.672726853, 0.714458873, 0.519489967],
            [0.267468275, 1, 0.547116287, 0.010761058, 0.007653458, 0.008980744],
            [0.389002086, 1.827764998, 1, 0.277450973, 0.212094044, 0.104856179],
            [1.486487414, 92.92766715, 3.604240378, 1, 1.140552745, 0.658719961],
            [1.399660691, 130.659892, 4.714889595, 0.876767869, 1, 0.229324149],
            [1.924964993, 111.3493506, 9.53687245, 1.51809579, 4.360639751, 1],
        ]
    ),
}

for table in (FOUR, SIX):
    names, matrix = table["names"], table["matrix"]
    # the signature structural property: entries come in reciprocal pairs
    worst = np.max(np.abs(matrix * matrix.T - 1.0))
    ranking = principal_eigenvector(matrix)
    print(f"{len(names)} alternatives   reciprocity residual {worst:.2g}")
    for name, value in zip(names, ranking.eigenvector):
        marker = "  <- winner" if name == names[ranking.winner] else ""
        print(f"  {name:12s} {value:.4f}{marker}")
    norm = np.linalg.norm(ranking.eigenvector)
    print(f"  eigenvector Euclidean norm: {norm:.6f}\n")

# the criterion weights used upstream of such matrices
binary = [[0.0, 0.5, 0.0], [0.5, 0.0, 1.0], [1.0, 0.0, 0.0]]
raw, normalized = weights_from_binary_matrix(binary)
print(f"binary-comparison row sums:  {raw.tolist()}")
print(f"normalized weights:          {[round(w, 4) for w in normalized.tolist()]}")
