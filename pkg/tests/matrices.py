"""Published kernel matrices, transcribed with the GF(4) encoding 1->1, alpha->2, alpha^2->3."""

RS22 = [[1, 0], [1, 1]]

RS33 = [[1, 1, 0], [2, 1, 0], [1, 1, 1]]

RM4 = [[1, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0], [1, 1, 1, 1]]

RM9 = [
    [1, 1, 0, 1, 1, 0, 0, 0, 0],
    [2, 1, 0, 2, 1, 0, 0, 0, 0],
    [1, 1, 1, 1, 1, 1, 0, 0, 0],
    [2, 2, 0, 1, 1, 0, 0, 0, 0],
    [1, 2, 0, 2, 1, 0, 0, 0, 0],
    [2, 2, 2, 1, 1, 1, 0, 0, 0],
    [1, 1, 0, 1, 1, 0, 1, 1, 0],
    [2, 1, 0, 2, 1, 0, 2, 1, 0],
    [1, 1, 1, 1, 1, 1, 1, 1, 1],
]

HERMITIAN8 = [
    [3, 2, 3, 2, 3, 2, 0, 0],
    [1, 3, 2, 1, 3, 2, 0, 0],
    [1, 1, 1, 1, 1, 1, 0, 0],
    [2, 1, 1, 3, 3, 2, 0, 0],
    [2, 2, 3, 3, 1, 1, 0, 0],
    [3, 2, 3, 2, 3, 2, 1, 0],
    [3, 3, 2, 2, 1, 1, 0, 0],
    [1, 1, 1, 1, 1, 1, 1, 1],
]

# column labels (x2, x1) of the Hermitian matrix
HERMITIAN8_POINTS_X2X1 = [(3, 3), (2, 3), (3, 2), (2, 2), (3, 1), (2, 1), (1, 0), (0, 0)]
