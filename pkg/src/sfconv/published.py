"""Published integer matrices for the SFC algorithms, verbatim.

Each entry is (B^T, G, A numerators, A denominator).  These are inputs to the
exactness gate in the catalog, not trusted values: two of them carry
transcription errors that the gate detects and the repair step fixes.
"""

SFC4_4X4_3X3_BT = [
    [ 0,  1,  1,  1,  1,  0],
    [ 0, -1,  1, -1,  1,  0],
    [ 0,  1, -1, -1,  1,  0],
    [ 0,  0, -1,  0,  1,  0],
    [ 0,  1,  0, -1,  0,  0],
    [ 1,  0,  0,  0, -1,  0],
    [ 0, -1,  0,  0,  0,  1],
]
SFC4_4X4_3X3_G = [
    [ 1,  1,  1],
    [ 1, -1,  1],
    [ 1, -1, -1],
    [ 1,  0, -1],
    [ 0, -1,  0],
    [ 1,  0,  0],
    [ 0,  0,  1],
]
SFC4_4X4_3X3_A = [
    [ 1,  1,  1,  1],
    [ 1, -1,  1, -1],
    [ 0,  2,  0, -2],
    [ 2, -2, -2,  2],
    [-2, -2,  2,  2],
    [ 4,  0,  0,  0],
    [ 0,  0,  0,  4],
]

SFC6_6X6_3X3_BT = [
    [ 0,  1,  1,  1,  1,  1,  1,  0],
    [ 0,  1,  1,  0, -1, -1,  0,  0],
    [ 0,  0, -1, -1,  0,  1,  1,  0],
    [ 0,  1,  0, -1, -1,  0,  1,  0],
    [ 0,  1,  0, -1,  1,  0, -1,  0],
    [ 0,  0, -1,  1,  0, -1,  1,  0],
    [ 0,  1, -1,  0,  1, -1,  0,  0],
    [ 0,  1, -1,  1,  1, -1,  1,  0],
    [ 1,  0,  0,  0,  0,  0, -1,  0],
    [ 0, -1,  0,  0,  0,  0,  0,  1],
]
SFC6_6X6_3X3_G = [
    [ 1,  1,  1],
    [ 0,  1,  1],
    [-1, -1,  0],
    [-1,  0,  1],
    [-1,  0,  1],
    [ 1, -1,  0],
    [ 0, -1,  1],
    [ 1, -1,  1],
    [ 1,  0,  0],
    [ 0,  0,  1],
]
SFC6_6X6_3X3_A = [
    [ 1,  1,  1,  1,  1,  1],
    [ 2,  1, -1, -2, -1,  1],
    [-1,  1,  2,  1, -1, -2],
    [-1, -2, -1,  1,  2,  1],
    [ 1, -2,  1,  1, -2,  1],
    [ 1,  1, -2,  1,  1, -2],
    [-2,  1,  1, -2,  1,  1],
    [-1,  1, -1,  1, -1,  1],
    [ 6,  0,  0,  0,  0,  0],
    [ 0,  0,  0,  0,  0,  6],
]

SFC6_7X7_3X3_BT = [
    [ 0,  1,  1,  1,  1,  1,  1,  0,  0],
    [ 0,  1,  1,  0, -1, -1,  0,  0,  0],
    [ 0,  0, -1, -1,  0,  1,  1,  0,  0],
    [ 0,  1,  0, -1, -1,  0,  1,  0,  0],
    [ 0,  1,  0, -1,  1,  0, -1,  0,  0],
    [ 0,  0, -1,  1,  0, -1,  1,  0,  0],
    [ 0,  1, -1,  0,  1, -1,  0,  0,  0],
    [ 0,  1, -1,  1, -1,  1, -1,  0,  0],
    [ 1,  0,  0,  0,  0,  0, -1,  0,  0],
    [ 0, -1,  0,  0,  0,  0,  0,  1,  0],
    [ 0, -1,  0,  0,  0,  0,  0,  1,  0],
    [ 0,  0, -1,  0,  0,  0,  0,  0,  1],
]
SFC6_7X7_3X3_G = [
    [ 1,  1,  1],
    [ 0,  1,  1],
    [-1, -1,  0],
    [-1,  0,  1],
    [-1,  0,  1],
    [ 1, -1,  0],
    [ 0, -1,  1],
    [ 1, -1,  1],
    [ 1,  0,  0],
    [ 0,  0,  1],
    [ 0,  1,  0],
    [ 0,  0,  1],
]
SFC6_7X7_3X3_A = [
    [ 1,  1,  1,  1,  1,  1,  1],
    [ 2,  1, -1, -2, -1,  1,  2],
    [-1,  1,  2,  1, -1, -2, -1],
    [-1, -2, -1,  1,  2,  1, -1],
    [ 1, -2,  1,  1, -2,  1,  1],
    [ 1,  1, -2,  1,  1, -2,  1],
    [-2,  1,  1, -2,  1,  1, -2],
    [-1,  1, -1,  1, -1,  1, -1],
    [ 6,  0,  0,  0,  0,  0,  0],
    [ 0,  0,  0,  0,  0,  6,  0],
    [ 0,  0,  0,  0,  0,  0,  6],
    [ 0,  0,  0,  0,  0,  0,  6],
]

SFC6_6X6_5X5_BT = [
    [ 0,  0,  1,  1,  1,  1,  1,  1,  0,  0],
    [ 0,  0,  1,  1,  0, -1, -1,  0,  0,  0],
    [ 0,  0,  0, -1, -1,  0,  1,  1,  0,  0],
    [ 0,  0,  1,  0, -1, -1,  0,  1,  0,  0],
    [ 0,  0,  1,  0, -1,  1,  0, -1,  0,  0],
    [ 0,  0,  0, -1,  1,  0, -1,  1,  0,  0],
    [ 0,  0,  1, -1,  0,  1, -1,  0,  0,  0],
    [ 0,  0,  1, -1,  1, -1,  1, -1,  0,  0],
    [ 1,  0,  0,  0,  0,  0, -1,  0,  0,  0],
    [ 0,  1,  0,  0,  0,  0,  0, -1,  0,  0],
    [ 0,  1,  0,  0,  0,  0,  0, -1,  0,  0],
    [ 0,  0, -1,  0,  0,  0,  0,  0,  1,  0],
    [ 0,  0, -1,  0,  0,  0,  0,  0,  1,  0],
    [ 0,  0,  0, -1,  0,  0,  0,  0,  0,  1],
]
SFC6_6X6_5X5_G = [
    [ 1,  1,  1,  1,  1],
    [-1, -1,  0,  1,  1],
    [ 1,  0, -1, -1,  0],
    [ 0, -1, -1,  0,  1],
    [ 0,  1, -1,  0,  1],
    [-1,  0,  1, -1,  0],
    [-1,  1,  0, -1,  1],
    [ 1, -1,  1, -1,  1],
    [ 1,  0,  0,  0,  0],
    [ 1,  0,  0,  0,  0],
    [ 0,  1,  0,  0,  0],
    [ 0,  0,  0,  1,  0],
    [ 0,  0,  0,  0,  1],
    [ 0,  0,  0,  0,  1],
]
SFC6_6X6_5X5_A = [
    [ 1,  1,  1,  1,  1,  1,  1],
    [ 1, -1, -2, -1,  1,  2, -1],
    [ 1,  2,  1, -1, -2, -1,  2],
    [-2, -1,  1,  2,  1, -1, -1],
    [-2,  1,  1, -2,  1,  1,  1],
    [ 1, -2,  1,  1, -2,  1, -2],
    [ 1,  1, -2,  1,  1, -2,  1],
    [ 1, -1,  1, -1,  1, -1, -1],
    [ 6,  0,  0,  0,  0,  0,  0],
    [ 6,  0,  0,  0,  0,  0,  0],
    [ 0,  6,  0,  0,  0,  0,  0],
    [ 0,  0,  0,  0,  0,  6,  0],
    [ 0,  0,  0,  0,  0,  0,  6],
    [ 0,  0,  0,  0,  0,  0,  6],
]

# Second printed A for the 7x7 output tile; rows 2 and 6 differ from the reference listing.
SFC6_7X7_3X3_A_ALTERNATE = [
    [ 1,  1,  1,  1,  1,  1,  1],
    [ 2,  1, -1, -2, -1,  1,  2],
    [-1,  1,  1,  1, -1, -2, -1],
    [-1, -2, -1,  1,  2,  1, -1],
    [ 1, -2,  1,  1, -2,  1,  1],
    [ 1,  1, -2,  1,  1, -2,  1],
    [-2,  1,  2, -2,  1,  1, -2],
    [-1,  1, -1,  1, -1,  1, -1],
    [ 6,  0,  0,  0,  0,  0,  0],
    [ 0,  0,  0,  0,  0,  6,  0],
    [ 0,  0,  0,  0,  0,  0,  6],
    [ 0,  0,  0,  0,  0,  0,  6],
]

PUBLISHED = {
    "sfc4-4x4-3x3": dict(N=4, M=4, R=3, BT=SFC4_4X4_3X3_BT, G=SFC4_4X4_3X3_G, A=SFC4_4X4_3X3_A, den=4),
    "sfc6-6x6-3x3": dict(N=6, M=6, R=3, BT=SFC6_6X6_3X3_BT, G=SFC6_6X6_3X3_G, A=SFC6_6X6_3X3_A, den=6),
    "sfc6-7x7-3x3": dict(N=6, M=7, R=3, BT=SFC6_7X7_3X3_BT, G=SFC6_7X7_3X3_G, A=SFC6_7X7_3X3_A, den=6),
    "sfc6-6x6-5x5": dict(N=6, M=6, R=5, BT=SFC6_6X6_5X5_BT, G=SFC6_6X6_5X5_G, A=SFC6_6X6_5X5_A, den=6),
}

# Alternate published variants that are also run through the gate.
ALTERNATES = {
    "sfc6-7x7-3x3": [dict(N=6, M=7, R=3, BT=SFC6_7X7_3X3_BT, G=SFC6_7X7_3X3_G,
                          A=SFC6_7X7_3X3_A_ALTERNATE, den=6, source="alternate")],
}
